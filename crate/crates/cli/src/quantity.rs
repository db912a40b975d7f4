use clap::ValueEnum;
use ising_discrim::discrimination::{metric_pair, n_copy_error, qcb, IsingFamily};
use ising_discrim::fermion::{ground_overlap, metric_thermal, metric_zero_t, MetricValue};
use ising_discrim::linalg::trace_of_product;
use ising_discrim::optimize::{gamma_ratio_of_maxima, pair_error, ZERO_FIELD_STANDIN};
use ising_discrim::spin::{ground_state, state};
use ising_discrim::{optimal_field_metric, optimal_field_pe, Backend, Beta, ModelParams};

use crate::output::{Record, Value};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Pe,
    Qcb,
    Metric,
    Overlap,
    OptimalField,
    GammaRatio,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Pe => "pe",
            Quantity::Qcb => "qcb",
            Quantity::Metric => "metric",
            Quantity::Overlap => "overlap",
            Quantity::OptimalField => "optimal-field",
            Quantity::GammaRatio => "gamma-ratio",
        }
    }

    /// Whether the quantity compares two couplings rather than probing one.
    pub fn is_pair(self, point: &Point) -> bool {
        match self {
            Quantity::Pe | Quantity::Qcb | Quantity::Overlap => true,
            Quantity::Metric | Quantity::GammaRatio => false,
            Quantity::OptimalField => point.j.is_none(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Dense,
    Fermion,
    Auto,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Dense => Backend::Dense,
            BackendArg::Fermion => Backend::Fermion,
            BackendArg::Auto => Backend::Auto,
        }
    }
}

/// Fully specified evaluation point; unset couplings or field are usage errors
/// for the quantities that need them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub j: Option<f64>,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub h: Option<f64>,
    pub size: usize,
    pub beta: Beta,
    pub copies: usize,
    pub backend: Backend,
}

fn need(value: Option<f64>, flag: &str, quantity: Quantity) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{} needs --{flag}", quantity.name())))
}

impl Point {
    pub fn coupling(&self, q: Quantity) -> Result<f64, CliError> {
        need(self.j, "J", q)
    }

    pub fn couplings(&self, q: Quantity) -> Result<(f64, f64), CliError> {
        Ok((need(self.j1, "J1", q)?, need(self.j2, "J2", q)?))
    }

    pub fn field(&self, q: Quantity) -> Result<f64, CliError> {
        need(self.h, "h", q)
    }
}

/// Field actually used: a vanishing field at zero temperature leaves the
/// ground state degenerate and is replaced by a tiny positive one.
fn field_warning(h: f64, beta: Beta) -> Option<String> {
    (beta.is_infinite() && h.abs() < ZERO_FIELD_STANDIN).then(|| format!("h replaced by {ZERO_FIELD_STANDIN:e} to lift the ground-state degeneracy"))
}

fn effective_field(h: f64, beta: Beta) -> f64 {
    if field_warning(h, beta).is_some() {
        ZERO_FIELD_STANDIN
    } else {
        h
    }
}

fn finish(mut r: Record, backend: Backend, evaluations: usize, warning: Option<String>) -> Result<Record, CliError> {
    r.push("backend", Value::Text(backend.name().into()))
        .push("evaluations", Value::Int(evaluations))
        .push("warning", warning.map_or(Value::Missing, Value::Text));
    r.check_finite()?;
    Ok(r)
}

fn pair_header(j1: f64, j2: f64, h: f64, p: &Point) -> Record {
    let mut r = Record::new();
    r.num("J1", j1).num("J2", j2).num("h", h).push("L", Value::Int(p.size)).push("beta", Value::Beta(p.beta));
    r
}

fn single_header(j: f64, h: f64, p: &Point) -> Record {
    let mut r = Record::new();
    r.num("J", j).num("h", h).push("L", Value::Int(p.size)).push("beta", Value::Beta(p.beta));
    r
}

fn dense_pair(j1: f64, j2: f64, h: f64, p: &Point) -> Result<(ising_discrim::DensityMatrix, ising_discrim::DensityMatrix), CliError> {
    let a = state(&ModelParams::new(j1, h, p.size, p.beta)?)?;
    let b = state(&ModelParams::new(j2, h, p.size, p.beta)?)?;
    Ok((a, b))
}

pub fn evaluate(q: Quantity, p: &Point) -> Result<Record, CliError> {
    match q {
        Quantity::Pe => pe(p),
        Quantity::Qcb => qcb_point(p),
        Quantity::Metric => metric(p),
        Quantity::Overlap => overlap(p),
        Quantity::OptimalField => optimal_field(p),
        Quantity::GammaRatio => gamma_ratio(p),
    }
}

fn pe(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::Pe;
    let (j1, j2) = p.couplings(q)?;
    let h = p.field(q)?;
    let backend = p.backend.resolve(p.size)?;
    let warning = field_warning(h, p.beta);
    let value = if p.copies > 1 {
        if backend != Backend::Dense {
            return Err(CliError::Usage("--n > 1 needs the dense backend".into()));
        }
        let he = effective_field(h, p.beta);
        let (a, b) = dense_pair(j1, j2, he, p)?;
        n_copy_error(&a, &b, p.copies)?
    } else {
        pair_error(j1, j2, h, p.size, p.beta, backend)?
    };
    let mut r = pair_header(j1, j2, h, p);
    r.push("n", Value::Int(p.copies)).num("p_error", value);
    finish(r, backend, 0, warning)
}

fn qcb_point(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::Qcb;
    let (j1, j2) = p.couplings(q)?;
    let h = p.field(q)?;
    let backend = p.backend.resolve(p.size)?;
    if backend != Backend::Dense {
        return Err(CliError::Usage("qcb needs the dense backend".into()));
    }
    let (a, b) = dense_pair(j1, j2, effective_field(h, p.beta), p)?;
    let res = qcb(&a, &b)?;
    let mut r = pair_header(j1, j2, h, p);
    r.num("p_error", res.p_error).num("qcb", res.qcb).num("s_star", res.s_star);
    finish(r, backend, 0, field_warning(h, p.beta))
}

/// QCB metric parts, plus the Bures metric where the dense backend provides it.
fn metric_parts(j: f64, h: f64, p: &Point, backend: Backend) -> Result<(MetricValue, Option<f64>), CliError> {
    let he = effective_field(h, p.beta);
    Ok(match (backend, p.beta) {
        (Backend::Fermion, Beta::Infinite) => (MetricValue::new(0.0, metric_zero_t(j, he, p.size)?), None),
        (Backend::Fermion, Beta::Finite(b)) => (metric_thermal(j, he, b, p.size)?, None),
        _ => {
            let pair = metric_pair(&IsingFamily::new(he, p.size, p.beta), j, None)?;
            (pair.qcb, Some(pair.bures.total))
        }
    })
}

fn metric(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::Metric;
    let j = p.coupling(q)?;
    let h = p.field(q)?;
    let backend = p.backend.resolve(p.size)?;
    let (m, bures) = metric_parts(j, h, p, backend)?;
    let mut r = single_header(j, h, p);
    r.num("classical", m.classical)
        .num("nonclassical", m.nonclassical)
        .num("total", m.total)
        .push("bures", bures.map_or(Value::Missing, Value::Num));
    finish(r, backend, 0, field_warning(h, p.beta))
}

fn overlap(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::Overlap;
    let (j1, j2) = p.couplings(q)?;
    let h = p.field(q)?;
    let backend = p.backend.resolve(p.size)?;
    let he = effective_field(h, Beta::Infinite);
    let value = match backend {
        Backend::Fermion => ground_overlap(j1, j2, he, p.size)?,
        _ => {
            let a = ground_state(&ModelParams::ground(j1, he, p.size)?)?;
            let b = ground_state(&ModelParams::ground(j2, he, p.size)?)?;
            trace_of_product(a.entries(), b.entries())?.clamp(0.0, 1.0).sqrt()
        }
    };
    let mut r = Record::new();
    r.num("J1", j1).num("J2", j2).num("h", h).push("L", Value::Int(p.size)).num("overlap", value);
    finish(r, backend, 0, field_warning(h, Beta::Infinite))
}

fn optimal_field(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::OptimalField;
    let backend = p.backend.resolve(p.size)?;
    let mut r = Record::new();
    let opt = if let Some(j) = p.j {
        let opt = optimal_field_metric(j, p.size, p.beta, backend)?;
        r.push("objective", Value::Text("qcb-metric".into())).num("J", j);
        opt
    } else {
        let (j1, j2) = p.couplings(q)?;
        let opt = optimal_field_pe(j1, j2, p.size, p.beta, backend)?;
        r.push("objective", Value::Text("pe".into())).num("J1", j1).num("J2", j2);
        opt
    };
    r.push("L", Value::Int(p.size))
        .push("beta", Value::Beta(p.beta))
        .num("h_opt", opt.field)
        .num("value", opt.value);
    finish(r, backend, opt.evaluations, None)
}

fn gamma_ratio(p: &Point) -> Result<Record, CliError> {
    let q = Quantity::GammaRatio;
    let j = p.coupling(q)?;
    let h = p.field(q)?;
    let backend = p.backend.resolve(p.size)?;
    if backend != Backend::Dense {
        return Err(CliError::Usage("gamma-ratio needs the dense backend".into()));
    }
    let pair = metric_pair(&IsingFamily::new(effective_field(h, p.beta), p.size, p.beta), j, None)?;
    let of_maxima = gamma_ratio_of_maxima(j, p.size, p.beta)?;
    let mut r = single_header(j, h, p);
    r.num("qcb_metric", pair.qcb.total)
        .num("bures_metric", pair.bures.total)
        .num("gamma", pair.ratio())
        .num("gamma_of_maxima", of_maxima);
    finish(r, backend, 0, field_warning(h, p.beta))
}
