use serde::{Deserialize, Serialize};

use crate::domain::grid::RadialGrid;
use crate::domain::params::{check_dimension, critical_power, ProblemParams};
use crate::domain::profile::RadialProfile;
use crate::domain::talenti::lambda_w_unchecked;
use crate::error::{Error, Result};

/// Action, Nehari and Pohozaev functionals of a profile, plus the four norms
/// they are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub action: f64,
    pub nehari: f64,
    pub pohozaev: f64,
    pub i_func: f64,
    pub grad_sq: f64,
    pub mass: f64,
    pub lp1: f64,
    pub l2s: f64,
}

impl FunctionalReport {
    /// Assemble the functionals from `‖∇u‖², ‖u‖², ‖u‖_{p+1}^{p+1}, ‖u‖_{2*}^{2*}`.
    pub fn from_norms(params: &ProblemParams, grad_sq: f64, mass: f64, lp1: f64, l2s: f64) -> Self {
        let p1 = params.p + 1.0;
        let ts = params.two_star();
        let om = params.omega;
        let c = params.critical_coeff();
        let action = 0.5 * grad_sq + 0.5 * om * mass - lp1 / p1 - c * l2s / ts;
        let nehari = grad_sq + om * mass - lp1 - c * l2s;
        let pohozaev = grad_sq / ts + 0.5 * om * mass - lp1 / p1 - c * l2s / ts;
        let i_func = action - nehari / p1;
        FunctionalReport { action, nehari, pohozaev, i_func, grad_sq, mass, lp1, l2s }
    }

    /// Scale used for "relative" statements about functionals that vanish.
    pub fn scale(&self, params: &ProblemParams) -> f64 {
        self.grad_sq + params.omega * self.mass + self.lp1 + self.l2s
    }

    pub fn nehari_rel(&self, params: &ProblemParams) -> f64 {
        self.nehari.abs() / self.scale(params)
    }

    pub fn pohozaev_rel(&self, params: &ProblemParams) -> f64 {
        self.pohozaev.abs() / self.scale(params)
    }
}

/// Compute all functionals of `u` by radial quadrature (grid + core + tail).
pub fn functionals(u: &RadialProfile, params: &ProblemParams) -> Result<FunctionalReport> {
    params.validate()?;
    if u.dim() != params.d {
        return Err(Error::InvalidInput(format!(
            "profile dimension {} does not match d = {}",
            u.dim(),
            params.d
        )));
    }
    let grad_sq = u.grad_sq()?;
    let mass = u.power_integral(2.0)?;
    let lp1 = u.power_integral(params.p + 1.0)?;
    let l2s = u.power_integral(params.two_star())?;
    Ok(FunctionalReport::from_norms(params, grad_sq, mass, lp1, l2s))
}

/// `N_ω(λ u)` as a function of `λ`, given the norms of `u`.
pub fn nehari_along_ray(report: &FunctionalReport, params: &ProblemParams, lambda: f64) -> f64 {
    let a = report.grad_sq + params.omega * report.mass;
    lambda * lambda * a
        - lambda.powf(params.p + 1.0) * report.lp1
        - params.critical_coeff() * lambda.powf(params.two_star()) * report.l2s
}

/// The unique `λ > 0` with `N_ω(λ u) = 0`.
pub fn nehari_scale(u: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    let report = functionals(u, params)?;
    nehari_scale_from_report(&report, params)
}

/// Root of `λ ↦ a - λ^{p-1} b - λ^{2*-2} c` (the Nehari functional divided by `λ²`).
pub fn nehari_scale_from_report(report: &FunctionalReport, params: &ProblemParams) -> Result<f64> {
    let a = report.grad_sq + params.omega * report.mass;
    let b = report.lp1;
    let c = params.critical_coeff() * report.l2s;
    if !(a > 0.0) || (b <= 0.0 && c <= 0.0) {
        return Err(Error::InvalidInput("Nehari scaling needs a nonzero profile".into()));
    }
    let pm1 = params.p - 1.0;
    let sm2 = params.two_star() - 2.0;
    // h is strictly decreasing in s = ln λ.
    let h = |s: f64| a - (pm1 * s).exp() * b - (sm2 * s).exp() * c;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while h(lo) <= 0.0 {
        lo *= 2.0;
        if lo < -1e4 {
            return Err(Error::InvalidInput("Nehari scaling bracket underflow".into()));
        }
    }
    while h(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::InvalidInput("Nehari scaling bracket overflow".into()));
        }
    }
    // Newton with bisection safeguard.
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let hs = h(s);
        if hs > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let dh = -pm1 * (pm1 * s).exp() * b - sm2 * (sm2 * s).exp() * c;
        let mut next = s - hs / dh;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 1e-15 * (1.0 + s.abs()) || hi - lo < 1e-15 {
            s = next;
            break;
        }
        s = next;
    }
    Ok(s.exp())
}

/// Both sides of `∫ W^q ΛW dx = -(4-(d-2)(q-1))/(2(q+1)) ‖W‖_{q+1}^{q+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub norm: f64,
}

impl WeightedIdentity {
    /// Relative discrepancy, measured against `‖W‖_{q+1}^{q+1}` when both sides vanish.
    pub fn discrepancy(&self) -> f64 {
        let scale = self.rhs.abs().max(self.lhs.abs());
        if scale > 1e-12 * self.norm {
            (self.lhs - self.rhs).abs() / scale
        } else {
            (self.lhs - self.rhs).abs() / self.norm
        }
    }
}

/// Quadrature grid used for closed-form bubble integrals.
pub fn talenti_grid(d: u32) -> Result<RadialGrid> {
    RadialGrid::geometric(d, 1e-5, 1e4, 16000)
}

pub fn lemma45_check(d: u32, q: f64) -> Result<WeightedIdentity> {
    check_dimension(d)?;
    let qc = critical_power(d);
    if !(q >= 1.0 && q <= qc + 1e-14) {
        return Err(Error::OutOfRange(format!("need 1 <= q <= (d+2)/(d-2) = {qc}, got {q}")));
    }
    let dd = d as f64;
    // Both integrands decay like r^{-(d-2)(q+1)}.
    if (dd - 2.0) * (q + 1.0) <= dd {
        return Err(Error::DivergentNorm(format!(
            "W^(q+1) is not integrable for d = {d}, q = {q}"
        )));
    }
    let w = RadialProfile::talenti(talenti_grid(d)?)?;
    let norm = w.power_integral(q + 1.0)?;
    let lhs = w.integrate(|r, u, _| u.powf(q) * lambda_w_unchecked(dd, r));
    let coeff = -(4.0 - (dd - 2.0) * (q - 1.0)) / (2.0 * (q + 1.0));
    Ok(WeightedIdentity { lhs, rhs: coeff * norm, norm })
}

/// `‖W‖_{L^m}^m` by quadrature on the standard bubble grid.
pub fn talenti_power_norm(d: u32, m: f64) -> Result<f64> {
    let w = RadialProfile::talenti(talenti_grid(d)?)?;
    w.power_integral(m)
}

/// `‖∇W‖²`, which equals `σ^{d/2}` with `σ` the sharp Sobolev constant.
pub fn talenti_grad_sq(d: u32) -> Result<f64> {
    let w = RadialProfile::talenti(talenti_grid(d)?)?;
    w.grad_sq()
}
