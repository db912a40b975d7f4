use std::f64::consts::PI;

use clap::ValueEnum;
use ising_discrim::discrimination::{metric_pair, qcb, qcb_metric, IsingFamily, ReferenceTable};
use ising_discrim::fermion::{metric_thermal, metric_zero_t};
use ising_discrim::optimize::{pair_error, ScalingRelation};
use ising_discrim::{state, verify_scaling, Backend, Beta, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{Record, Value};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Scaling,
    Metrics,
    Table,
    Asymptotics,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Scaling => "scaling",
            Suite::Metrics => "metrics",
            Suite::Table => "table",
            Suite::Asymptotics => "asymptotics",
        }
    }
}

const SCALING_TRIALS: usize = 50;

/// One row of the pass/fail table. `value` is the worst deviation found.
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value < tolerance }
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.push("check", Value::Text(self.name.clone()))
            .num("value", self.value)
            .num("tolerance", self.tolerance)
            .push("status", Value::Text(if self.pass { "PASS" } else { "FAIL" }.into()));
        r
    }
}

pub fn run(suite: Suite, seed: u64) -> Result<Vec<Check>, CliError> {
    match suite {
        Suite::Scaling => scaling(seed),
        Suite::Metrics => metrics(seed),
        Suite::Table => table(),
        Suite::Asymptotics => asymptotics(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn scaling(seed: u64) -> Result<Vec<Check>, CliError> {
    ScalingRelation::ALL
        .iter()
        .map(|&rel| {
            let report = verify_scaling(rel, SCALING_TRIALS, seed)?;
            Ok(Check::below(rel.name(), report.max_violation, rel.tolerance()))
        })
        .collect()
}

/// Ground-state metric of the `L = 2, 3, 4` chains in closed form.
fn closed_form_metric(j: f64, h: f64, size: usize) -> f64 {
    let (h2, j2) = (h * h, j * j);
    match size {
        2 => h2 / (4.0 * (h2 + j2).powi(2)),
        3 => 3.0 * h2 / (16.0 * (h2 - h * j + j2).powi(2)),
        _ => h2 * (h2 * h2 + 4.0 * h2 * j2 + j2 * j2) / (4.0 * (h2 * h2 + j2 * j2).powi(2)),
    }
}

fn metrics(seed: u64) -> Result<Vec<Check>, CliError> {
    let axis = [0.3, 0.7, 1.0, 1.6, 2.5, 4.0];
    let mut checks = Vec::new();
    for size in 2..=4 {
        let mut worst = 0.0_f64;
        for &j in &axis {
            for &h in &axis {
                let g = qcb_metric(&IsingFamily::new(h, size, Beta::Infinite), j, None)?;
                worst = worst.max(rel(g, closed_form_metric(j, h, size)));
            }
        }
        checks.push(Check::below(format!("dense ground-state metric L={size}"), worst, 1e-5));
    }
    for size in [2, 4] {
        let mut worst = 0.0_f64;
        for &j in &axis {
            for &h in &axis {
                worst = worst.max(rel(metric_zero_t(j, h, size)?, closed_form_metric(j, h, size)));
            }
        }
        checks.push(Check::below(format!("fermion ground-state metric L={size}"), worst, 1e-12));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slack = f64::INFINITY;
    for _ in 0..30 {
        let j = rng.random_range(0.2..=5.0);
        let h = rng.random_range(0.0..=5.0);
        let beta = rng.random_range(0.05..=20.0);
        let size = rng.random_range(2..=4);
        let p = metric_pair(&IsingFamily::new(h, size, Beta::Finite(beta)), j, None)?;
        slack = slack.min(p.qcb.total - 0.5 * p.bures.total).min(p.bures.total - p.qcb.total);
    }
    checks.push(Check { name: "Bures/2 <= QCB <= Bures (min slack)".into(), value: slack, tolerance: -1e-9, pass: slack >= -1e-9 });

    let mut worst = 0.0_f64;
    for j in [0.5, 1.0, 2.0] {
        for h in [0.4, 1.3, 2.5] {
            for beta in [1.0, 2.0, 5.0] {
                let fermion = metric_thermal(j, h, beta, 4)?.total;
                let dense = qcb_metric(&IsingFamily::new(h, 4, Beta::Finite(beta)), j, None)?;
                worst = worst.max(rel(fermion, dense));
            }
        }
    }
    checks.push(Check::below("thermal metric dense vs fermion L=4", worst, 1e-5));
    Ok(checks)
}

fn rescaled_error(j: f64, size: usize) -> Result<f64, CliError> {
    Ok(pair_error(1.0, j, j.sqrt(), size, Beta::Infinite, Backend::Dense)?)
}

fn table() -> Result<Vec<Check>, CliError> {
    let step = 1e-4;
    let mut checks = Vec::new();
    for row in ReferenceTable::new().rows() {
        let l = row.size;
        let q1 = rescaled_error(1.0, l)?;
        let up = (q1 - rescaled_error(1.0 + step, l)?) / step;
        let down = (q1 - rescaled_error(1.0 - step, l)?) / step;
        let alpha = 0.5 * (up + down);
        checks.push(Check::below(format!("cusp slope alpha L={l}"), (alpha - row.alpha).abs(), 1e-3));
        let plateau = rescaled_error(1e-6, l)?;
        checks.push(Check::below(format!("plateau 1/2 - A L={l}"), (plateau - (0.5 - row.a)).abs(), 1e-3));
    }
    Ok(checks)
}

fn chernoff_j_to_zero(j2: f64, size: usize, beta: Beta) -> Result<f64, CliError> {
    let h = j2.sqrt();
    let a = state(&ModelParams::new(1.0, h, size, beta)?)?;
    let b = state(&ModelParams::new(j2, h, size, beta)?)?;
    Ok(qcb(&a, &b)?.qcb)
}

fn asymptotics() -> Result<Vec<Check>, CliError> {
    let mut hot = 0.0_f64;
    for beta in [0.01, 0.05, 0.1] {
        hot = hot.max(rel(chernoff_j_to_zero(1e-6, 2, Beta::Finite(beta))?, beta * beta / 2.0));
    }
    let mut cold = 0.0_f64;
    for beta in [10.0_f64, 20.0, 50.0, 100.0] {
        cold = cold.max(rel(chernoff_j_to_zero(1e-6, 2, Beta::Finite(beta))?, 2f64.sqrt() / PI * (beta / 2.0).atan()));
    }
    let mut checks = vec![
        Check::below("xi0 high temperature beta^2/2", hot, 0.10),
        Check::below("xi0 low temperature sqrt2/pi atan(beta/2)", cold, 0.10),
    ];
    for row in ReferenceTable::new().rows() {
        // ξ(J) = ξ₀ + a√J + bJ + ...; three points in t = √J eliminate a and b.
        let xi: Vec<f64> = [1e-3, 2e-3, 4e-3]
            .iter()
            .map(|t: &f64| chernoff_j_to_zero(t * t, row.size, Beta::Infinite))
            .collect::<Result<_, _>>()?;
        let xi0 = (8.0 * xi[0] - 6.0 * xi[1] + xi[2]) / 3.0;
        checks.push(Check::below(format!("J->0 Chernoff limit L={}", row.size), (xi0 - row.chernoff_limit()).abs(), 1e-6));
    }
    Ok(checks)
}
