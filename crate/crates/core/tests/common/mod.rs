//! Closed-form integrals of the Talenti bubble through the Beta function,
//! independent of the library's quadrature.
#![allow(dead_code)]

use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

pub fn sphere_area(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// `∫₀^∞ r^{k-1} (1 + r²/a)^{-s} dr = a^{k/2}/2 · B(k/2, s - k/2)`.
fn radial_moment(k: f64, a: f64, s: f64) -> f64 {
    0.5 * a.powf(k / 2.0) * beta(k / 2.0, s - k / 2.0)
}

/// `‖W‖_m^m` over `ℝ^d`.
pub fn w_power_norm(d: u32, m: f64) -> f64 {
    let dd = d as f64;
    sphere_area(d) * radial_moment(dd, dd * (dd - 2.0), m * (dd - 2.0) / 2.0)
}

/// `‖∇W‖²`, from `W' = -(r/d)(1 + r²/(d(d-2)))^{-d/2}`.
pub fn w_grad_sq(d: u32) -> f64 {
    let dd = d as f64;
    sphere_area(d) * radial_moment(dd + 2.0, dd * (dd - 2.0), dd) / (dd * dd)
}

/// `2(p+1)/γ · ‖W‖₂² / ‖W‖_{p+1}^{p+1}`.
pub fn limit_constant(d: u32, p: f64) -> f64 {
    let dd = d as f64;
    let gamma_exp = 4.0 - (dd - 2.0) * (p - 1.0);
    2.0 * (p + 1.0) / gamma_exp * w_power_norm(d, 2.0) / w_power_norm(d, p + 1.0)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
