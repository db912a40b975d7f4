//! Discriminating transverse-field Ising chains that differ only in their coupling.
//!
//! The crate covers exact dense states for short chains, a free-fermion
//! backend for long even chains, Helstrom and Chernoff error measures, and
//! the information metrics that control them.

pub mod discrimination;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod optimize;
pub mod params;
pub mod spin;

pub use discrimination::{
    bures_metric, helstrom_error, matrix_power, metric_pair, n_copy_error, pure_error, qcb, qcb_metric,
    DiscriminationResult, IsingFamily, MetricPair, ReferenceTable, StateSource,
};
pub use error::{Error, Result};
pub use fermion::{critical_scaling_fit, ground_overlap, metric_thermal, metric_zero_t, thermal_scaling_exponent, MetricValue};
pub use optimize::{
    minimize_scalar, optimal_field_metric, optimal_field_pe, verify_scaling, Backend, Bracket, FieldOptimum,
    ScalingRelation, ScalingReport,
};
pub use params::{Beta, ModelParams};
pub use spin::{build_hamiltonian, ground_state, spectrum, state, thermal_state, DensityMatrix, Parity};
