//! Binary discrimination of density matrices: Helstrom error, quantum
//! Chernoff bound, n-copy error and the QCB and Bures metrics.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::fermion::MetricValue;
use crate::linalg::{kron_power, neumaier_sum, trace_norm, SpectralDecomposition, SymmetricMatrix, MAX_DENSE_DIM};
use crate::optimize::{minimize_scalar, Bracket};
use crate::params::{Beta, ModelParams};
use crate::spin::{state, DensityMatrix};

/// Eigenvalues above `-NEGATIVE_TOL` are clamped to zero.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// Tolerance of the `s`-minimization in the Chernoff bound.
pub const QCB_S_TOL: f64 = 1e-8;

/// A pair `(m, n)` contributes to a metric only if `ρ_m + ρ_n` exceeds this.
pub const SUPPORT_TOL: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationResult {
    pub p_error: f64,
    pub qcb: f64,
    pub s_star: f64,
}

/// Expansion coefficients of the rescaled error `Q(J)` near `J = 1` and `J → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub size: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
}

impl ReferenceRow {
    /// `−log(1 − 4A²)`, the Chernoff bound as `J → 0`.
    pub fn chernoff_limit(&self) -> f64 {
        -(1.0 - 4.0 * self.a * self.a).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    rows: [ReferenceRow; 3],
}

impl ReferenceTable {
    pub fn new() -> Self {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let s14 = 14f64.sqrt();
        Self {
            rows: [
                ReferenceRow { size: 2, alpha: 0.125, beta: 1.0 / (2.0 * s2), gamma: 1.0 / (4.0 * s2), a: 1.0 / (2.0 * s2) },
                ReferenceRow { size: 3, alpha: s3 / 8.0, beta: s3 / 8.0, gamma: 5.0 * s3 / 32.0, a: s3 / 4.0 },
                // No closed form is known for alpha_4.
                ReferenceRow { size: 4, alpha: 0.306, beta: 1.0 / (2.0 * s14), gamma: 23.0 / (28.0 * s14), a: s14 / 8.0 },
            ],
        }
    }

    pub fn rows(&self) -> &[ReferenceRow] {
        &self.rows
    }

    pub fn row(&self, size: usize) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.size == size)
    }
}

impl Default for ReferenceTable {
    fn default() -> Self {
        Self::new()
    }
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn check_prior(z1: f64) -> Result<()> {
    if !(z1 > 0.0 && z1 < 1.0) {
        return Err(invalid(format!("prior must lie in (0, 1), got {z1}")));
    }
    Ok(())
}

/// `P_e = ½(1 − ‖z₂ρ₂ − z₁ρ₁‖₁)` with `z₂ = 1 − z₁`.
pub fn helstrom_error(rho1: &DensityMatrix, rho2: &DensityMatrix, z1: f64) -> Result<f64> {
    check_dims(rho1, rho2)?;
    check_prior(z1)?;
    helstrom_from_entries(rho1.entries(), rho2.entries(), z1)
}

fn helstrom_from_entries(a: &SymmetricMatrix, b: &SymmetricMatrix, z1: f64) -> Result<f64> {
    let gamma = b.combine(1.0 - z1, a, -z1)?;
    let p = 0.5 * (1.0 - trace_norm(&gamma)?);
    Ok(p.clamp(0.0, 0.5))
}

/// `½(1 − √(1 − c²))` for pure states with overlap `c = |⟨ψ₁|ψ₂⟩|`.
pub fn pure_error(overlap: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(invalid(format!("overlap must lie in [0, 1], got {overlap}")));
    }
    Ok(0.5 * (1.0 - (1.0 - overlap * overlap).sqrt()))
}

fn check_exponent(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("exponent must lie in [0, 1], got {s}")));
    }
    Ok(())
}

/// `λ^s` with `0^s = 0` and `λ^0 = [λ > 0]`.
fn scalar_power(lambda: f64, s: f64) -> f64 {
    let lambda = if lambda < 0.0 { 0.0 } else { lambda };
    if lambda == 0.0 {
        0.0
    } else if s == 0.0 {
        1.0
    } else {
        lambda.powf(s)
    }
}

fn clamped_weights(decomp: &SpectralDecomposition) -> Result<Vec<f64>> {
    decomp.eigenvalues()
        .iter()
        .map(|&l| {
            if l < -NEGATIVE_TOL {
                Err(Error::NotDensityMatrix(format!("eigenvalue {l} below zero")))
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

/// `V·diag(λ^s)·Vᵀ`; at `s = 0` this is the support projector.
pub fn matrix_power(decomp: &SpectralDecomposition, s: f64) -> Result<SymmetricMatrix> {
    check_exponent(s)?;
    clamped_weights(decomp)?;
    Ok(decomp.map_eigenvalues(|l| scalar_power(l, s)))
}

/// `s ↦ Tr[ρ₁^s ρ₂^{1−s}]` evaluated as `Σ_ij p_i^s q_j^{1−s} (u_iᵀv_j)²`.
#[derive(Debug, Clone)]
pub struct ChernoffFunction {
    p: Vec<f64>,
    q: Vec<f64>,
    overlap2: DMatrix<f64>,
}

impl ChernoffFunction {
    pub fn new(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<Self> {
        check_dims(rho1, rho2)?;
        let p = clamped_weights(rho1.spectral())?;
        let q = clamped_weights(rho2.spectral())?;
        let o = rho1.spectral().eigenvectors().transpose() * rho2.spectral().eigenvectors();
        Ok(Self { p, q, overlap2: o.map(|x| x * x) })
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        check_exponent(s)?;
        let ps: Vec<f64> = self.p.iter().map(|&x| scalar_power(x, s)).collect();
        let qs: Vec<f64> = self.q.iter().map(|&x| scalar_power(x, 1.0 - s)).collect();
        let n = ps.len();
        Ok(neumaier_sum((0..n).filter(|&i| ps[i] != 0.0).flat_map(|i| {
            let (ps, qs, o) = (&ps, &qs, &self.overlap2);
            (0..n).filter(move |&j| qs[j] != 0.0).map(move |j| ps[i] * qs[j] * o[(i, j)])
        })))
    }
}

/// Chernoff bound `ξ = −log min_s Tr[ρ₁^s ρ₂^{1−s}]`, with the equal-prior
/// Helstrom error of the same pair.
pub fn qcb(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DiscriminationResult> {
    let chernoff = ChernoffFunction::new(rho1, rho2)?;
    let min = minimize_scalar(|s| chernoff.eval(s), Bracket::new(0.0, 1.0, QCB_S_TOL)?)?;
    Ok(DiscriminationResult {
        p_error: helstrom_error(rho1, rho2, 0.5)?,
        qcb: (-min.f.ln()).max(0.0),
        s_star: min.x,
    })
}

/// Equal-prior Helstrom error on `ρ₁^{⊗n}` versus `ρ₂^{⊗n}`.
///
/// Peak memory is a few dense `dⁿ × dⁿ` matrices, at most `4096²` doubles each.
pub fn n_copy_error(rho1: &DensityMatrix, rho2: &DensityMatrix, n: usize) -> Result<f64> {
    check_dims(rho1, rho2)?;
    if n == 0 {
        return Err(invalid("number of copies must be at least 1"));
    }
    let dim = (rho1.dim() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > MAX_DENSE_DIM as u128 {
        return Err(Error::SizeOutOfRange { size: n, min: 1, max: max_copies(rho1.dim()) });
    }
    if n == 1 {
        return helstrom_error(rho1, rho2, 0.5);
    }
    helstrom_from_entries(&kron_power(rho1.entries(), n), &kron_power(rho2.entries(), n), 0.5)
}

fn max_copies(dim: usize) -> usize {
    let mut n = 0;
    let mut d = 1usize;
    while d.saturating_mul(dim) <= MAX_DENSE_DIM {
        d *= dim;
        n += 1;
    }
    n
}

/// A one-parameter family `J ↦ ρ(J)`.
pub trait StateSource {
    fn state_at(&self, coupling: f64) -> Result<DensityMatrix>;
}

impl<F> StateSource for F
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    fn state_at(&self, coupling: f64) -> Result<DensityMatrix> {
        self(coupling)
    }
}

/// Dense Ising states at fixed field, size and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingFamily {
    pub field: f64,
    pub size: usize,
    pub beta: Beta,
}

impl IsingFamily {
    pub fn new(field: f64, size: usize, beta: Beta) -> Self {
        Self { field, size, beta }
    }

    pub fn params(&self, coupling: f64) -> Result<ModelParams> {
        ModelParams::new(coupling, self.field, self.size, self.beta)
    }
}

impl StateSource for IsingFamily {
    fn state_at(&self, coupling: f64) -> Result<DensityMatrix> {
        state(&self.params(coupling)?)
    }
}

/// Relative step for pure states, where the metric has no small weights to resolve.
pub const PURE_STEP: f64 = 1e-2;

/// Relative step for mixed states.
pub const MIXED_STEP: f64 = 1e-5;

/// Default finite-difference step: `10⁻²·J` for pure states, `10⁻⁵·max(1, J)` otherwise.
pub fn default_step(coupling: f64, pure: bool) -> f64 {
    if pure {
        PURE_STEP * coupling
    } else {
        MIXED_STEP * coupling.max(1.0)
    }
}

/// QCB and Bures metrics at one point, each split into diagonal (classical)
/// and off-diagonal (nonclassical) parts in the eigenbasis of `ρ(J)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPair {
    pub qcb: MetricValue,
    pub bures: MetricValue,
    pub step: f64,
}

impl MetricPair {
    /// `γ = ds²_QCB / ds²_B`.
    pub fn ratio(&self) -> f64 {
        self.qcb.total / self.bures.total
    }
}

/// `Vᵀ ρ' V` for the eigenvectors `V` of the base state.
fn rotate_into(basis: &DMatrix<f64>, other: &DensityMatrix) -> DMatrix<f64> {
    let o = basis.transpose() * other.spectral().eigenvectors();
    let mut scaled = o.clone();
    for (j, &w) in other.spectral().eigenvalues().iter().enumerate() {
        scaled.column_mut(j).scale_mut(w.max(0.0));
    }
    scaled * o.transpose()
}

fn central_difference(source: &dyn StateSource, coupling: f64, step: f64, basis: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let up = rotate_into(basis, &source.state_at(coupling + step)?);
    let down = rotate_into(basis, &source.state_at(coupling - step)?);
    Ok((up - down) / (2.0 * step))
}

/// Both metrics from one finite-difference derivative of `ρ(J)`.
///
/// `∂ρ` is a central difference with Richardson refinement over steps `δ` and
/// `δ/2`, expressed in the eigenbasis of `ρ(J)`. Pairs with `ρ_m + ρ_n` below
/// [`SUPPORT_TOL`] are dropped from both sums.
pub fn metric_pair(source: &dyn StateSource, coupling: f64, step: Option<f64>) -> Result<MetricPair> {
    if !(coupling.is_finite() && coupling > 0.0) {
        return Err(invalid(format!("coupling must be finite and > 0, got {coupling}")));
    }
    let base = source.state_at(coupling)?;
    let step = step.unwrap_or_else(|| default_step(coupling, base.is_pure()));
    if !(step > 0.0 && step < coupling) {
        return Err(invalid(format!("step must lie in (0, J), got {step}")));
    }
    let basis = base.spectral().eigenvectors();
    let coarse = central_difference(source, coupling, step, basis)?;
    let fine = central_difference(source, coupling, 0.5 * step, basis)?;
    let deriv = (fine * 4.0 - coarse) / 3.0;

    let p = clamped_weights(base.spectral())?;
    let n = p.len();
    let roots: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
    let mut terms = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for m in 0..n {
        for k in 0..n {
            if p[m] + p[k] < SUPPORT_TOL {
                continue;
            }
            let a2 = deriv[(m, k)] * deriv[(m, k)];
            let r = roots[m] + roots[k];
            let off = usize::from(m != k);
            terms[off].push(a2 / (r * r));
            terms[2 + off].push(a2 / (p[m] + p[k]));
        }
    }
    let [qc, qn, bc, bn] = terms.map(|t| 0.5 * neumaier_sum(t));
    Ok(MetricPair { qcb: MetricValue::new(qc, qn), bures: MetricValue::new(bc, bn), step })
}

/// `ds²_QCB/dJ² = ½ Σ |⟨φ_m|∂ρ|φ_n⟩|²/(√ρ_n + √ρ_m)²`.
pub fn qcb_metric(source: &dyn StateSource, coupling: f64, step: Option<f64>) -> Result<f64> {
    Ok(metric_pair(source, coupling, step)?.qcb.total)
}

/// `ds²_B/dJ² = ½ Σ |⟨φ_m|∂ρ|φ_n⟩|²/(ρ_n + ρ_m)`.
pub fn bures_metric(source: &dyn StateSource, coupling: f64, step: Option<f64>) -> Result<f64> {
    Ok(metric_pair(source, coupling, step)?.bures.total)
}
