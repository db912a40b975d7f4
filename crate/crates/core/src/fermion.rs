//! Free-fermion backend for even chain lengths.
//!
//! Works on the antiperiodic momentum grid `k_n = (2n+1)π/L`,
//! `n = 0..L/2`, with `ε_k = J cos k + h`, `Δ_k = J sin k`,
//! `Λ_k = √(ε_k² + Δ_k²)` and Bogoliubov angle `θ_k = atan2(Δ_k, ε_k)`.
//! All momentum sums are compensated, so `L` up to `2·10⁵` is safe.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::linalg::neumaier_sum;

pub const MAX_FERMION_SIZE: usize = 200_000;

/// Momenta of the even-parity (antiperiodic) sector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    size: usize,
    momenta: Vec<f64>,
}

impl MomentumGrid {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

pub fn momentum_grid(size: usize) -> Result<MomentumGrid> {
    if !size.is_multiple_of(2) {
        return Err(invalid(format!("fermion backend needs even L, got {size}")));
    }
    if !(2..=MAX_FERMION_SIZE).contains(&size) {
        return Err(Error::SizeOutOfRange { size, min: 2, max: MAX_FERMION_SIZE });
    }
    let l = size as f64;
    let momenta = (0..size / 2).map(|n| (2 * n + 1) as f64 * PI / l).collect();
    Ok(MomentumGrid { size, momenta })
}

/// Single-particle data for one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub momentum: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub energy: f64,
    pub angle: f64,
    /// `∂Λ_k/∂J`
    pub d_energy: f64,
    /// `∂θ_k/∂J`
    pub d_angle: f64,
}

impl Mode {
    fn new(coupling: f64, field: f64, k: f64) -> Result<Self> {
        let (sin, cos) = k.sin_cos();
        let epsilon = coupling * cos + field;
        let delta = coupling * sin;
        let energy = epsilon.hypot(delta);
        if !(energy > 0.0) {
            return Err(Error::GaplessMode { momentum: k });
        }
        Ok(Mode {
            momentum: k,
            epsilon,
            delta,
            energy,
            angle: delta.atan2(epsilon),
            d_energy: (epsilon * cos + delta * sin) / energy,
            d_angle: field * sin / (energy * energy),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovData {
    coupling: f64,
    field: f64,
    modes: Vec<Mode>,
}

impl BogoliubovData {
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }
}

pub fn bogoliubov(coupling: f64, field: f64, grid: &MomentumGrid) -> Result<BogoliubovData> {
    if !coupling.is_finite() || coupling <= 0.0 {
        return Err(invalid(format!("coupling must be finite and > 0, got {coupling}")));
    }
    if !field.is_finite() {
        return Err(invalid(format!("field must be finite, got {field}")));
    }
    let modes = grid
        .momenta()
        .iter()
        .map(|&k| Mode::new(coupling, field, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(BogoliubovData { coupling, field, modes })
}

/// `|⟨ψ₀(J₁, h)|ψ₀(J₂, h)⟩| = Π_k cos((θ_k(J₁) − θ_k(J₂))/2)`.
pub fn ground_overlap(j1: f64, j2: f64, field: f64, size: usize) -> Result<f64> {
    let grid = momentum_grid(size)?;
    let a = bogoliubov(j1, field, &grid)?;
    let b = bogoliubov(j2, field, &grid)?;
    // Product via a log-sum keeps long chains from underflowing prematurely.
    let log_f = neumaier_sum(
        a.modes
            .iter()
            .zip(&b.modes)
            .map(|(x, y)| (0.5 * (x.angle - y.angle)).cos().ln()),
    );
    Ok(log_f.exp())
}

/// Zero-temperature metric `g_J = ¼ Σ_k h² sin²k / Λ_k⁴`.
pub fn metric_zero_t(coupling: f64, field: f64, size: usize) -> Result<f64> {
    let data = bogoliubov(coupling, field, &momentum_grid(size)?)?;
    Ok(0.25 * neumaier_sum(data.modes.iter().map(|m| m.d_angle * m.d_angle)))
}

/// Metric split into its Boltzmann-weight and eigenstate-rotation parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub classical: f64,
    pub nonclassical: f64,
    pub total: f64,
}

impl MetricValue {
    pub fn new(classical: f64, nonclassical: f64) -> Self {
        Self { classical, nonclassical, total: classical + nonclassical }
    }
}

/// `sech²(x)` without overflow for large `|x|`.
fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Finite-temperature metric
/// `g = (β²/32) Σ (∂Λ)²/cosh²(βΛ/2) + ¼ Σ tanh²(βΛ/2)(∂θ)²`.
pub fn metric_thermal(coupling: f64, field: f64, beta: f64, size: usize) -> Result<MetricValue> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(invalid(format!("inverse temperature must be finite and > 0, got {beta}")));
    }
    let data = bogoliubov(coupling, field, &momentum_grid(size)?)?;
    let classical = beta * beta / 32.0
        * neumaier_sum(data.modes.iter().map(|m| m.d_energy * m.d_energy * sech2(0.5 * beta * m.energy)));
    let nonclassical = 0.25
        * neumaier_sum(data.modes.iter().map(|m| {
            let t = (0.5 * beta * m.energy).tanh();
            t * t * m.d_angle * m.d_angle
        }));
    Ok(MetricValue::new(classical, nonclassical))
}

/// Least-squares fit `y ≈ Σ_j c_j x^{p_j}` for two basis powers; returns `(c_0, c_1)`.
fn fit_two_powers(xs: &[f64], ys: &[f64], powers: [i32; 2]) -> Result<(f64, f64)> {
    // Columns are scaled to unit norm before forming the normal equations.
    let cols: Vec<Vec<f64>> = powers.iter().map(|&p| xs.iter().map(|x| x.powi(p)).collect()).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let a: Vec<Vec<f64>> = cols.iter().zip(&norms).map(|(c, n)| c.iter().map(|v| v / n).collect()).collect();
    let dot = |u: &[f64], v: &[f64]| neumaier_sum(u.iter().zip(v).map(|(a, b)| a * b));
    let (g00, g01, g11) = (dot(&a[0], &a[0]), dot(&a[0], &a[1]), dot(&a[1], &a[1]));
    let (r0, r1) = (dot(&a[0], ys), dot(&a[1], ys));
    let det = g00 * g11 - g01 * g01;
    if !(det.abs() > 1e-14) {
        return Err(Error::DegenerateFit("basis columns are collinear".into()));
    }
    let c0 = (g11 * r0 - g01 * r1) / det;
    let c1 = (g00 * r1 - g01 * r0) / det;
    Ok((c0 / norms[0], c1 / norms[1]))
}

/// Fits `metric_zero_t(J, h = J, L) ≈ c₂ L² + c₁ L` over `sizes`; returns `(c₂, c₁)`.
pub fn critical_scaling_fit(coupling: f64, sizes: &[usize]) -> Result<(f64, f64)> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 distinct sizes, got {sizes:?}")));
    }
    if sizes.len() < 4 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("need at least 4 strictly increasing sizes"));
    }
    if sizes.iter().any(|&l| l < 64) {
        return Err(invalid("fit sizes must be at least 64"));
    }
    let xs: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let ys = sizes
        .iter()
        .map(|&l| metric_zero_t(coupling, coupling, l))
        .collect::<Result<Vec<_>>>()?;
    fit_two_powers(&xs, &ys, [2, 1])
}

/// Slope of `log g^{nc}` against `log β` at the critical field.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalScaling {
    pub exponent: f64,
    pub nonclassical: Vec<f64>,
    /// Set when the largest `β` exceeds `L/10`, outside the `1 ≪ β ≪ L` window.
    pub regime_warning: bool,
}

pub fn thermal_scaling_exponent(coupling: f64, size: usize, betas: &[f64]) -> Result<ThermalScaling> {
    if betas.len() < 2 {
        return Err(Error::DegenerateFit("need at least 2 temperatures".into()));
    }
    if betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(invalid("inverse temperatures must be finite and > 0"));
    }
    let nonclassical = betas
        .iter()
        .map(|&b| metric_thermal(coupling, coupling, b, size).map(|m| m.nonclassical))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let ly: Vec<f64> = nonclassical.iter().map(|g| g.ln()).collect();
    let (_, slope) = fit_two_powers(&lx, &ly, [0, 1])?;
    let max_beta = betas.iter().copied().fold(f64::MIN, f64::max);
    Ok(ThermalScaling {
        exponent: slope,
        nonclassical,
        regime_warning: max_beta > size as f64 / 10.0,
    })
}
