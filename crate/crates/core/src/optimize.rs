//! Golden-section minimization, optimal-field searches and randomized
//! checks of the model's scaling laws.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrimination::{bures_metric, helstrom_error, pure_error, qcb_metric, IsingFamily};
use crate::error::{invalid, Error, Result};
use crate::fermion::{ground_overlap, metric_thermal, metric_zero_t};
use crate::params::{Beta, ModelParams};
use crate::spin::{spectrum, state, MAX_DENSE_SIZE};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Field used in place of `h = 0` for ground states, which are degenerate there.
pub const ZERO_FIELD_STANDIN: f64 = 1e-8;

/// Relative tolerance of the optimal-field searches.
pub const FIELD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
    tol: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("bracket needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if !(tol >= 1e-12 && tol.is_finite()) {
            return Err(invalid(format!("bracket tolerance must be >= 1e-12, got {tol}")));
        }
        Ok(Self { lo, hi, tol })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub f: f64,
    pub evaluations: usize,
}

/// Golden-section search down to an interval of width `tol`.
///
/// Both endpoints are evaluated and win ties against interior points only
/// when strictly better, so boundary minima are found.
pub fn minimize_scalar(mut f: impl FnMut(f64) -> Result<f64>, bracket: Bracket) -> Result<Minimum> {
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(x));
        }
        Ok(v)
    };
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let fa_end = eval(a)?;
    let fb_end = eval(b)?;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > bracket.tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut x, mut fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    for (xe, fe) in [(bracket.lo, fa_end), (bracket.hi, fb_end)] {
        if fe < fx {
            x = xe;
            fx = fe;
        }
    }
    Ok(Minimum { x, f: fx, evaluations })
}

/// Cells of the coarse scan that precedes the golden-section refinement in
/// the optimal-field searches.
pub const SCAN_CELLS: usize = 48;

/// Samples `f` on `cells + 1` evenly spaced points, then refines with
/// [`minimize_scalar`] on the two cells around the best sample.
///
/// Guards against a second local minimum inside the bracket, which occurs for
/// the finite-temperature metric of short chains at large coupling.
pub fn minimize_scanned(mut f: impl FnMut(f64) -> Result<f64>, bracket: Bracket, cells: usize) -> Result<Minimum> {
    if cells < 2 {
        return minimize_scalar(f, bracket);
    }
    let width = (bracket.hi - bracket.lo) / cells as f64;
    let point = |i: usize| if i == cells { bracket.hi } else { bracket.lo + width * i as f64 };
    let mut best = (0, f64::INFINITY);
    for i in 0..=cells {
        let x = point(i);
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(x));
        }
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = point(best.0.saturating_sub(1));
    let hi = point((best.0 + 1).min(cells));
    let tol = bracket.tol.min(0.5 * (hi - lo));
    let mut refined = minimize_scalar(&mut f, Bracket::new(lo, hi, tol.max(1e-12))?)?;
    refined.evaluations += cells + 1;
    if best.1 < refined.f {
        refined.x = point(best.0);
        refined.f = best.1;
    }
    Ok(refined)
}

/// Which implementation evaluates a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Fermion,
    /// Dense for `L ≤ 12`, fermionic otherwise.
    Auto,
}

impl Backend {
    pub fn resolve(self, size: usize) -> Result<Backend> {
        let chosen = match self {
            Backend::Auto if size <= MAX_DENSE_SIZE => Backend::Dense,
            Backend::Auto => Backend::Fermion,
            other => other,
        };
        if chosen == Backend::Fermion && !size.is_multiple_of(2) {
            return Err(invalid(format!("fermion backend needs even L, got {size}")));
        }
        if chosen == Backend::Dense && size > MAX_DENSE_SIZE {
            return Err(Error::SizeOutOfRange { size, min: 2, max: MAX_DENSE_SIZE });
        }
        Ok(chosen)
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Fermion => "fermion",
            Backend::Auto => "auto",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Backend::Dense),
            "fermion" => Ok(Backend::Fermion),
            "auto" => Ok(Backend::Auto),
            _ => Err(invalid(format!("unknown backend {s:?}"))),
        }
    }
}

fn effective_field(h: f64, beta: Beta) -> f64 {
    if beta.is_infinite() && h.abs() < ZERO_FIELD_STANDIN {
        ZERO_FIELD_STANDIN
    } else {
        h
    }
}

/// Equal-prior Helstrom error between couplings `j1` and `j2` at field `h`.
pub fn pair_error(j1: f64, j2: f64, h: f64, size: usize, beta: Beta, backend: Backend) -> Result<f64> {
    let h = effective_field(h, beta);
    match backend.resolve(size)? {
        Backend::Fermion => {
            if !beta.is_infinite() {
                return Err(invalid("fermion backend provides error probabilities only at zero temperature"));
            }
            pure_error(ground_overlap(j1, j2, h, size)?.min(1.0))
        }
        _ => {
            let a = state(&ModelParams::new(j1, h, size, beta)?)?;
            let b = state(&ModelParams::new(j2, h, size, beta)?)?;
            helstrom_error(&a, &b, 0.5)
        }
    }
}

/// Which information metric an optimal-field search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Qcb,
    Bures,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Qcb => "qcb",
            Metric::Bures => "bures",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qcb" => Ok(Metric::Qcb),
            "bures" => Ok(Metric::Bures),
            _ => Err(invalid(format!("unknown metric {s:?}"))),
        }
    }
}

/// QCB metric at one point; dense via finite differences, fermionic in closed form.
pub fn metric_value(coupling: f64, h: f64, size: usize, beta: Beta, backend: Backend) -> Result<f64> {
    metric_value_of(Metric::Qcb, coupling, h, size, beta, backend)
}

/// Like [`metric_value`] for either metric. The fermionic backend provides
/// the QCB metric only.
pub fn metric_value_of(kind: Metric, coupling: f64, h: f64, size: usize, beta: Beta, backend: Backend) -> Result<f64> {
    let h = effective_field(h, beta);
    match (backend.resolve(size)?, kind) {
        (Backend::Fermion, Metric::Bures) => Err(invalid("fermion backend provides the QCB metric only")),
        (Backend::Fermion, Metric::Qcb) => match beta {
            Beta::Infinite => metric_zero_t(coupling, h, size),
            Beta::Finite(b) => Ok(metric_thermal(coupling, h, b, size)?.total),
        },
        (_, Metric::Qcb) => qcb_metric(&IsingFamily::new(h, size, beta), coupling, None),
        (_, Metric::Bures) => bures_metric(&IsingFamily::new(h, size, beta), coupling, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptimum {
    pub field: f64,
    pub value: f64,
    pub evaluations: usize,
}

fn check_coupling(j: f64) -> Result<()> {
    if !(j.is_finite() && j > 0.0) {
        return Err(invalid(format!("coupling must be finite and > 0, got {j}")));
    }
    Ok(())
}

/// Field `h̃ ≥ 0` minimizing the Helstrom error, searched on `[0, 3·max(J₁, J₂)]`.
pub fn optimal_field_pe(j1: f64, j2: f64, size: usize, beta: Beta, backend: Backend) -> Result<FieldOptimum> {
    check_coupling(j1)?;
    check_coupling(j2)?;
    let scale = j1.max(j2);
    let bracket = Bracket::new(0.0, 3.0 * scale, FIELD_TOL * scale)?;
    optimal_field_pe_in(j1, j2, size, beta, backend, bracket)
}

pub fn optimal_field_pe_in(
    j1: f64,
    j2: f64,
    size: usize,
    beta: Beta,
    backend: Backend,
    bracket: Bracket,
) -> Result<FieldOptimum> {
    let backend = backend.resolve(size)?;
    let m = minimize_scanned(|h| pair_error(j1, j2, h, size, beta, backend), bracket, SCAN_CELLS)?;
    Ok(FieldOptimum { field: m.x, value: m.f, evaluations: m.evaluations })
}

/// Field `h* ≥ 0` maximizing the QCB metric, searched on `[0, 3J]`.
pub fn optimal_field_metric(coupling: f64, size: usize, beta: Beta, backend: Backend) -> Result<FieldOptimum> {
    check_coupling(coupling)?;
    let bracket = Bracket::new(0.0, 3.0 * coupling, FIELD_TOL * coupling)?;
    optimal_field_metric_in(Metric::Qcb, coupling, size, beta, backend, bracket)
}

pub fn optimal_field_metric_in(
    kind: Metric,
    coupling: f64,
    size: usize,
    beta: Beta,
    backend: Backend,
    bracket: Bracket,
) -> Result<FieldOptimum> {
    let backend = backend.resolve(size)?;
    let m = minimize_scanned(|h| Ok(-metric_value_of(kind, coupling, h, size, beta, backend)?), bracket, SCAN_CELLS)?;
    Ok(FieldOptimum { field: m.x, value: -m.f, evaluations: m.evaluations })
}

/// `γ = max_h ds²_QCB / max_h ds²_B` on the dense backend; each metric is
/// maximized over `h ∈ [0, 3J]` separately.
pub fn gamma_ratio_of_maxima(coupling: f64, size: usize, beta: Beta) -> Result<f64> {
    check_coupling(coupling)?;
    let bracket = Bracket::new(0.0, 3.0 * coupling, FIELD_TOL * coupling)?;
    let q = optimal_field_metric_in(Metric::Qcb, coupling, size, beta, Backend::Dense, bracket)?;
    let b = optimal_field_metric_in(Metric::Bures, coupling, size, beta, Backend::Dense, bracket)?;
    Ok(q.value / b.value)
}

/// Scaling laws checked by [`verify_scaling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRelation {
    /// `P_e(kJ₁, kJ₂, kh) = P_e(J₁, J₂, h)` for ground states.
    Sc1,
    /// `P_e(kJ₁, kJ₂, kh, β/k) = P_e(J₁, J₂, h, β)` for thermal states.
    Sc3,
    /// `g(kJ, kh, β/k) = g(J, h, β)/k²` for the fermionic thermal metric.
    Sc4,
    /// `E_n(kJ, kh) = k·E_n(J, h)` for the dense spectrum.
    SpectrumHomogeneity,
}

impl ScalingRelation {
    pub const ALL: [ScalingRelation; 4] =
        [ScalingRelation::Sc1, ScalingRelation::Sc3, ScalingRelation::Sc4, ScalingRelation::SpectrumHomogeneity];

    pub fn name(self) -> &'static str {
        match self {
            ScalingRelation::Sc1 => "SC1",
            ScalingRelation::Sc3 => "SC3",
            ScalingRelation::Sc4 => "SC4",
            ScalingRelation::SpectrumHomogeneity => "SPECTRUM_HOMOGENEITY",
        }
    }

    /// Pass threshold on the maximum violation.
    pub fn tolerance(self) -> f64 {
        1e-10
    }

    fn uses_fermions(self) -> bool {
        self == ScalingRelation::Sc4
    }
}

impl fmt::Display for ScalingRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalingRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScalingRelation::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown scaling relation {s:?}")))
    }
}

/// One random draw for a scaling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSample {
    pub j1: f64,
    pub j2: f64,
    pub field: f64,
    pub beta: f64,
    pub k: f64,
    pub size: usize,
}

impl ScalingSample {
    /// `J ∈ [0.2, 5]`, `h ∈ [0, 5]`, `β ∈ [0.05, 20]`, `k ∈ [0.5, 2]`;
    /// `L ∈ {2, 3, 4}` for dense relations and even `L ∈ [8, 64]` for fermionic ones.
    pub fn draw(relation: ScalingRelation, rng: &mut impl Rng) -> Self {
        let size = if relation.uses_fermions() {
            2 * rng.random_range(4..=32)
        } else {
            rng.random_range(2..=4)
        };
        ScalingSample {
            j1: rng.random_range(0.2..=5.0),
            j2: rng.random_range(0.2..=5.0),
            field: rng.random_range(0.0..=5.0),
            beta: rng.random_range(0.05..=20.0),
            k: rng.random_range(0.5..=2.0),
            size,
        }
    }
}

/// Violation of `relation` at one sample: absolute for error probabilities,
/// relative otherwise.
pub fn scaling_violation(relation: ScalingRelation, s: &ScalingSample) -> Result<f64> {
    let k = s.k;
    match relation {
        ScalingRelation::Sc1 => {
            let a = pair_error(s.j1, s.j2, s.field, s.size, Beta::Infinite, Backend::Dense)?;
            let b = pair_error(k * s.j1, k * s.j2, k * s.field, s.size, Beta::Infinite, Backend::Dense)?;
            Ok((a - b).abs())
        }
        ScalingRelation::Sc3 => {
            let beta = Beta::Finite(s.beta);
            let a = pair_error(s.j1, s.j2, s.field, s.size, beta, Backend::Dense)?;
            let b = pair_error(k * s.j1, k * s.j2, k * s.field, s.size, beta.rescale_temperature(k), Backend::Dense)?;
            Ok((a - b).abs())
        }
        ScalingRelation::Sc4 => {
            let a = metric_thermal(s.j1, s.field, s.beta, s.size)?.total;
            let b = metric_thermal(k * s.j1, k * s.field, s.beta / k, s.size)?.total;
            Ok((b * k * k - a).abs() / a.abs().max(f64::MIN_POSITIVE))
        }
        ScalingRelation::SpectrumHomogeneity => {
            let a = spectrum(&ModelParams::ground(s.j1, s.field, s.size)?)?;
            let b = spectrum(&ModelParams::ground(k * s.j1, k * s.field, s.size)?)?;
            let scale = a.energies().iter().fold(0.0_f64, |m, e| m.max(e.abs()));
            let diff = a
                .energies()
                .iter()
                .zip(b.energies())
                .fold(0.0_f64, |m, (x, y)| m.max((k * x - y).abs()));
            Ok(diff / (k * scale))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub relation: ScalingRelation,
    pub trials: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Checks `relation` on `trials` seeded random samples.
pub fn verify_scaling(relation: ScalingRelation, trials: usize, seed: u64) -> Result<ScalingReport> {
    if trials < 10 {
        return Err(invalid(format!("need at least 10 trials, got {trials}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation = 0.0_f64;
    for _ in 0..trials {
        let sample = ScalingSample::draw(relation, &mut rng);
        max_violation = max_violation.max(scaling_violation(relation, &sample)?);
    }
    Ok(ScalingReport { relation, trials, max_violation, pass: max_violation < relation.tolerance() })
}
