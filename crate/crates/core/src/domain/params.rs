use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension, subcritical power and frequency of
/// `-Δu + ωu = u^p + u^{(d+2)/(d-2)}`.
///
/// With `critical == false` the Sobolev-critical term is dropped, which gives
/// the classical single-power problem `-ΔU + ωU = U^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub d: u32,
    pub p: f64,
    pub omega: f64,
    #[serde(default = "default_true")]
    pub critical: bool,
}

fn default_true() -> bool {
    true
}

/// `(d+2)/(d-2)`, the critical power.
pub fn critical_power(d: u32) -> f64 {
    let d = d as f64;
    (d + 2.0) / (d - 2.0)
}

/// `2d/(d-2)`, the Sobolev exponent.
pub fn sobolev_exponent(d: u32) -> f64 {
    let d = d as f64;
    2.0 * d / (d - 2.0)
}

pub fn check_dimension(d: u32) -> Result<()> {
    if d < 3 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

impl ProblemParams {
    pub fn new(d: u32, p: f64, omega: f64) -> Result<Self> {
        let params = ProblemParams { d, p, omega, critical: true };
        params.validate()?;
        Ok(params)
    }

    /// The single-power problem without the critical term.
    pub fn subcritical_only(d: u32, p: f64, omega: f64) -> Result<Self> {
        let params = ProblemParams { d, p, omega, critical: false };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.d)?;
        let q = critical_power(self.d);
        if !(self.p.is_finite() && self.p > 1.0 && self.p < q) {
            return Err(Error::InvalidParameter(format!(
                "need 1 < p < (d+2)/(d-2) = {q}, got p = {}",
                self.p
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need omega > 0, got {}",
                self.omega
            )));
        }
        if self.gamma() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma = 4 - (d-2)(p-1) = {} is not positive",
                self.gamma()
            )));
        }
        Ok(())
    }

    /// Existence range for ground states: `d = 3` needs `3 < p < 5`.
    pub fn check_existence_range(&self) -> Result<()> {
        self.validate()?;
        if self.critical && self.d == 3 && self.p <= 3.0 {
            return Err(Error::InvalidParameter(format!(
                "for d = 3 ground states are only guaranteed for 3 < p < 5, got p = {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    pub fn q_crit(&self) -> f64 {
        critical_power(self.d)
    }

    pub fn two_star(&self) -> f64 {
        sobolev_exponent(self.d)
    }

    pub fn gamma(&self) -> f64 {
        4.0 - (self.dim() - 2.0) * (self.p - 1.0)
    }

    /// Coefficient in front of the critical term (1 or 0).
    pub fn critical_coeff(&self) -> f64 {
        if self.critical {
            1.0
        } else {
            0.0
        }
    }

    /// Nonlinearity `g(u) = u^p + c·u^q` for `u >= 0`, with the negative part clipped.
    pub fn nonlinearity(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        u.powf(self.p) + self.critical_coeff() * u.powf(self.q_crit())
    }

    /// Derivative `g'(u)`.
    pub fn nonlinearity_deriv(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let q = self.q_crit();
        self.p * u.powf(self.p - 1.0) + self.critical_coeff() * q * u.powf(q - 1.0)
    }

    /// Right-hand side of the radial ODE `u'' + (d-1)/r u' = ωu - g(u)`.
    pub fn source(&self, u: f64) -> f64 {
        self.omega * u - self.nonlinearity(u)
    }

    /// Natural length scale of the core, `M^{-2/(d-2)}` for central height `M`.
    pub fn core_scale(&self, m: f64) -> f64 {
        m.powf(-2.0 / (self.dim() - 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_exponents() {
        let pp = ProblemParams::new(5, 2.0, 1.0).unwrap();
        assert!((pp.q_crit() - 7.0 / 3.0).abs() < 1e-15);
        assert!((pp.two_star() - 10.0 / 3.0).abs() < 1e-15);
        assert!((pp.gamma() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ProblemParams::new(2, 2.0, 1.0), Err(Error::InvalidDimension(2)));
        assert!(ProblemParams::new(5, 7.0 / 3.0, 1.0).is_err());
        assert!(ProblemParams::new(5, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(5, 2.0, 0.0).is_err());
        assert!(ProblemParams::new(5, 2.0, f64::NAN).is_err());
    }

    #[test]
    fn d3_existence_range() {
        let pp = ProblemParams::new(3, 2.0, 1.0).unwrap();
        assert!(pp.check_existence_range().is_err());
        let pp = ProblemParams::new(3, 4.0, 1.0).unwrap();
        assert!(pp.check_existence_range().is_ok());
    }
}
