use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use ising_discrim::{optimal_field_metric, optimal_field_pe, Beta};
use rayon::prelude::*;

use crate::output::{Record, Value};
use crate::quantity::{evaluate, Point, Quantity};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    J,
    J1,
    J2,
    H,
    L,
    Beta,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::J => "J",
            Param::J1 => "J1",
            Param::J2 => "J2",
            Param::H => "h",
            Param::L => "L",
            Param::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// `param:from:to:steps:lin|log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub param: Param,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, from, to, steps, spacing] = parts[..] else {
            return Err(format!("expected param:from:to:steps:lin|log, got {s:?}"));
        };
        let param = match param {
            "J" => Param::J,
            "J1" => Param::J1,
            "J2" => Param::J2,
            "h" => Param::H,
            "L" => Param::L,
            "beta" => Param::Beta,
            _ => return Err(format!("cannot sweep {param:?}; choose J, J1, J2, h, L or beta")),
        };
        let number = |t: &str| t.parse::<f64>().map_err(|_| format!("bad sweep bound {t:?}"));
        let (from, to) = (number(from)?, number(to)?);
        let steps: usize = steps.parse().map_err(|_| format!("bad step count {steps:?}"))?;
        let spacing = match spacing {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            _ => return Err(format!("spacing must be lin or log, got {spacing:?}")),
        };
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(format!("sweep needs finite bounds with from < to, got {from}..{to}"));
        }
        if steps < 2 {
            return Err(format!("sweep needs at least 2 steps, got {steps}"));
        }
        if spacing == Spacing::Log && from <= 0.0 {
            return Err(format!("log sweep needs a positive lower bound, got {from}"));
        }
        Ok(Sweep { param, from, to, steps, spacing })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{}:{}:{}:{}:{spacing}", self.param.name(), self.from, self.to, self.steps)
    }
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.from;
                }
                if i + 1 == self.steps {
                    return self.to;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.from + (self.to - self.from) * t,
                    Spacing::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * t).exp(),
                }
            })
            .collect()
    }

    fn apply(&self, base: &Point, x: f64) -> Result<Point, CliError> {
        let mut p = *base;
        match self.param {
            Param::J => p.j = Some(x),
            Param::J1 => p.j1 = Some(x),
            Param::J2 => p.j2 = Some(x),
            Param::H => p.h = Some(x),
            Param::Beta => p.beta = Beta::Finite(x),
            Param::L => {
                let size = x.round();
                if size < 2.0 {
                    return Err(CliError::Usage(format!("swept L must be at least 2, got {x}")));
                }
                p.size = size as usize;
            }
        }
        Ok(p)
    }
}

/// How the field follows the swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LockH {
    /// `h = √(J₁J₂)`.
    Geomean,
    /// The optimal field: minimum-error `h̃` for pairs, metric-maximizing `h*` otherwise.
    Hstar,
    None,
}

impl LockH {
    pub fn name(self) -> &'static str {
        match self {
            LockH::Geomean => "geomean",
            LockH::Hstar => "hstar",
            LockH::None => "none",
        }
    }
}

fn lock_field(lock: LockH, q: Quantity, p: &mut Point) -> Result<usize, CliError> {
    match lock {
        LockH::None => Ok(0),
        _ if q == Quantity::OptimalField => Err(CliError::Usage("optimal-field scans need --lock-h none".into())),
        LockH::Geomean => {
            if !q.is_pair(p) {
                return Err(CliError::Usage(format!("--lock-h geomean needs a two-coupling quantity, not {}", q.name())));
            }
            let (j1, j2) = p.couplings(q)?;
            p.h = Some((j1 * j2).sqrt());
            Ok(0)
        }
        LockH::Hstar => {
            let opt = if q.is_pair(p) {
                let (j1, j2) = p.couplings(q)?;
                optimal_field_pe(j1, j2, p.size, p.beta, p.backend)?
            } else {
                optimal_field_metric(p.coupling(q)?, p.size, p.beta, p.backend)?
            };
            p.h = Some(opt.field);
            Ok(opt.evaluations)
        }
    }
}

fn row(q: Quantity, sweep: &Sweep, lock: LockH, base: &Point, x: f64) -> Result<Record, CliError> {
    let mut p = sweep.apply(base, x)?;
    let lock_evals = lock_field(lock, q, &mut p)?;
    let mut r = evaluate(q, &p)?;
    if let Some(Value::Int(n)) = r.get("evaluations") {
        let total = n + lock_evals;
        r.set("evaluations", Value::Int(total));
    }
    Ok(r)
}

/// Evaluates `q` along `sweep`; rows keep sweep order whatever the thread count.
pub fn run(q: Quantity, sweep: &Sweep, lock: LockH, base: &Point, threads: Option<usize>) -> Result<Vec<Record>, CliError> {
    if lock != LockH::None && sweep.param == Param::H {
        return Err(CliError::Usage("cannot sweep h while --lock-h fixes it".into()));
    }
    let xs = sweep.values();
    let work = || xs.par_iter().map(|&x| row(q, sweep, lock, base, x)).collect::<Result<Vec<_>, _>>();
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Compute(format!("cannot start thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_spaces_sweeps() {
        let s: Sweep = "J2:0.01:100:5:log".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 5);
        assert!((v[1] - 0.1).abs() < 1e-15 && (v[2] - 1.0).abs() < 1e-15);
        assert_eq!(v[4], 100.0);
        let s: Sweep = "h:0:2:3:lin".parse().unwrap();
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0]);
        assert_eq!(s.to_string(), "h:0:2:3:lin");
    }

    #[test]
    fn rejects_bad_sweeps() {
        for bad in ["J:1:2:3", "x:1:2:3:lin", "J:2:1:3:lin", "J:0:1:3:log", "J:1:2:1:lin", "J:a:2:3:lin", "J:1:2:3:cubic"] {
            assert!(bad.parse::<Sweep>().is_err(), "{bad}");
        }
    }
}
