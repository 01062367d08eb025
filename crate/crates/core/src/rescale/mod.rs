//! Critical rescaling `Φ̃(x) = M^{-1} Φ(M^{-2/(d-2)} x)`, the Kelvin transform
//! and distances to the Talenti bubble.

mod distance;
mod kelvin;

pub use distance::{h1dot_distance, lq_distance, pair_integral, talenti_distance, DistanceNorm};
pub use kelvin::kelvin;

use serde::{Deserialize, Serialize};

use crate::domain::functionals::talenti_grid;
use crate::domain::params::ProblemParams;
use crate::domain::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::radial_ode::{ode_residual, RadialEquation, ShootingResult};

/// A ground state in critical variables: `-ΔΦ̃ + αΦ̃ = βΦ̃^p + Φ̃^{(d+2)/(d-2)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledState {
    pub m_omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub profile: RadialProfile,
    pub params: ProblemParams,
}

impl RescaledState {
    /// The formal `ω → ∞` limit: `Φ̃ = W`, `α = β = 0`.
    pub fn talenti_limit(params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        Ok(RescaledState {
            m_omega: f64::INFINITY,
            alpha: 0.0,
            beta: 0.0,
            profile: RadialProfile::talenti(talenti_grid(params.d)?)?,
            params: *params,
        })
    }

    /// Equation satisfied by the rescaled profile.
    pub fn equation(&self) -> RadialEquation {
        RadialEquation {
            d: self.params.d,
            omega: self.alpha,
            p: self.params.p,
            p_coeff: self.beta,
            q: self.params.q_crit(),
            q_coeff: self.params.critical_coeff(),
        }
    }

    /// Max relative pointwise residual of the rescaled ODE on the grid.
    pub fn residual(&self) -> f64 {
        ode_residual(&self.profile, &self.equation(), 1.0)
    }

    /// Both sides of `(α/d)‖Φ̃‖² = (2* - (p+1))/(2*(p+1)) β ‖Φ̃‖_{p+1}^{p+1}`.
    pub fn mass_identity(&self) -> Result<(f64, f64)> {
        let d = self.params.dim();
        let p1 = self.params.p + 1.0;
        let ts = self.params.two_star();
        let mass = self.profile.power_integral(2.0)?;
        let lp1 = self.profile.power_integral(p1)?;
        Ok((self.alpha / d * mass, (ts - p1) / (ts * p1) * self.beta * lp1))
    }
}

/// `α = ω M^{-4/(d-2)}` and `β = M^{p-1-4/(d-2)}`.
pub fn rescaled_coefficients(params: &ProblemParams, m: f64) -> (f64, f64) {
    let e = 4.0 / (params.dim() - 2.0);
    (params.omega * m.powf(-e), m.powf(params.p - 1.0 - e))
}

/// `ω - M^{p-1} - M^{4/(d-2)}`, nonpositive at the centre of any positive solution.
pub fn central_margin(params: &ProblemParams, m: f64) -> f64 {
    params.omega - m.powf(params.p - 1.0) - params.critical_coeff() * m.powf(4.0 / (params.dim() - 2.0))
}

/// Rescale a located ground state to critical variables.
pub fn rescale(result: &ShootingResult, params: &ProblemParams) -> Result<RescaledState> {
    params.validate()?;
    if result.params != *params {
        return Err(Error::InvalidInput("shooting result belongs to different parameters".into()));
    }
    let m = result.m_star;
    let lambda = m.powf(-2.0 / (params.dim() - 2.0));
    let profile = result.profile.dilated(1.0 / m, lambda)?;
    let (alpha, beta) = rescaled_coefficients(params, m);
    Ok(RescaledState { m_omega: m, alpha, beta, profile, params: *params })
}
