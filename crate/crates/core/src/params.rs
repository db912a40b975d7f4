use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Inverse temperature. `Infinite` selects ground states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }

    /// Multiplies the temperature by `k`, i.e. divides `β` by `k`.
    pub fn rescale_temperature(self, k: f64) -> Beta {
        match self {
            Beta::Finite(b) => Beta::Finite(b / k),
            Beta::Infinite => Beta::Infinite,
        }
    }

    pub(crate) fn validate(self) -> Result<()> {
        match self {
            Beta::Finite(b) if !(b.is_finite() && b > 0.0) => {
                Err(invalid(format!("inverse temperature must be finite and > 0, got {b}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Beta::Infinite);
        }
        let b: f64 = t
            .parse()
            .map_err(|_| invalid(format!("cannot parse inverse temperature '{s}'")))?;
        let beta = Beta::Finite(b);
        beta.validate()?;
        Ok(beta)
    }
}

/// Physical configuration of a periodic transverse-field Ising chain
/// `H = -J Σ σˣ_k σˣ_{k+1} - h Σ σᶻ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    coupling: f64,
    field: f64,
    size: usize,
    beta: Beta,
}

impl ModelParams {
    pub fn new(coupling: f64, field: f64, size: usize, beta: Beta) -> Result<Self> {
        if !coupling.is_finite() || coupling <= 0.0 {
            return Err(invalid(format!("coupling must be finite and > 0, got {coupling}")));
        }
        if !field.is_finite() {
            return Err(invalid(format!("field must be finite, got {field}")));
        }
        if size < 2 {
            return Err(Error::SizeOutOfRange { size, min: 2, max: usize::MAX });
        }
        beta.validate()?;
        Ok(Self { coupling, field, size, beta })
    }

    pub fn ground(coupling: f64, field: f64, size: usize) -> Result<Self> {
        Self::new(coupling, field, size, Beta::Infinite)
    }

    pub fn thermal(coupling: f64, field: f64, size: usize, beta: f64) -> Result<Self> {
        Self::new(coupling, field, size, Beta::Finite(beta))
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(coupling, self.field, self.size, self.beta)
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.coupling, field, self.size, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_params() {
        assert!(ModelParams::ground(0.0, 1.0, 4).is_err());
        assert!(ModelParams::ground(-1.0, 1.0, 4).is_err());
        assert!(ModelParams::ground(1.0, f64::NAN, 4).is_err());
        assert!(ModelParams::ground(1.0, 1.0, 1).is_err());
        assert!(ModelParams::thermal(1.0, 1.0, 4, 0.0).is_err());
        assert!(ModelParams::thermal(1.0, 1.0, 4, f64::INFINITY).is_err());
        assert!(ModelParams::ground(1.0, -2.0, 2).is_ok());
    }

    #[test]
    fn parses_beta() {
        assert_eq!("inf".parse::<Beta>().unwrap(), Beta::Infinite);
        assert_eq!("2.5".parse::<Beta>().unwrap(), Beta::Finite(2.5));
        assert!("-1".parse::<Beta>().is_err());
        assert!("abc".parse::<Beta>().is_err());
    }
}
