use serde::{Deserialize, Serialize};

use crate::domain::profile::RadialProfile;
use crate::rescale::RescaledState;

/// `sup_i (1 + r_i)^{d-2} u(r_i)` over the grid nodes.
pub fn decay_sup(u: &RadialProfile) -> f64 {
    let s = u.dim() as f64 - 2.0;
    u.grid()
        .nodes()
        .iter()
        .zip(u.values())
        .map(|(&r, &v)| (1.0 + r).powf(s) * v)
        .fold(0.0, f64::max)
}

/// `sup_i ω^{1/4} r_i^{(d-1)/2} |u(r_i)|` over the grid nodes.
pub fn pointwise_decay_sup(u: &RadialProfile, omega: f64) -> f64 {
    let s = 0.5 * (u.dim() as f64 - 1.0);
    u.grid()
        .nodes()
        .iter()
        .zip(u.values())
        .map(|(&r, &v)| omega.powf(0.25) * r.powf(s) * v.abs())
        .fold(0.0, f64::max)
}

/// Smallest constant in `Φ̃(r) <= C₀ α^{(d-2)/4} e^{-√α r/2}` for `r >= L₀/√α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpDecayCheck {
    pub l0: f64,
    pub c0: f64,
    /// Number of radii the bound was evaluated at.
    pub checked: usize,
    /// The ratio to the envelope decays at the far end, so `C₀` is attained
    /// at finite radius and the rate `√α/2` is confirmed.
    pub holds: bool,
}

/// Scan the profile beyond `L₀ α^{-1/2}` (`L₀ = 1`), on the grid and along the
/// tail model out to `50 α^{-1/2}`.
pub fn exp_decay_check(state: &RescaledState) -> ExpDecayCheck {
    let l0 = 1.0;
    let a = state.alpha;
    if !(a > 0.0) {
        return ExpDecayCheck { l0, c0: 0.0, checked: 0, holds: true };
    }
    let d = state.params.dim();
    let k = a.sqrt();
    let r_min = l0 / k;
    let r_max = 50.0 / k;
    let prof = &state.profile;
    let mut radii: Vec<f64> = prof.grid().nodes().iter().copied().filter(|&r| r >= r_min).collect();
    let mut r = radii.last().copied().unwrap_or(r_min).max(r_min);
    while r < r_max {
        r *= 1.01;
        radii.push(r);
    }
    let scale = a.powf((d - 2.0) / 4.0);
    let ratios: Vec<f64> = radii.iter().map(|&r| prof.eval(r).0 / (scale * (-0.5 * k * r).exp())).collect();
    let c0 = ratios.iter().copied().fold(0.0, f64::max);
    let quarter = &ratios[ratios.len() * 3 / 4..];
    let holds = c0.is_finite() && quarter.windows(2).all(|w| w[1] <= w[0]) && *ratios.last().unwrap_or(&0.0) < c0;
    ExpDecayCheck { l0, c0, checked: radii.len(), holds }
}
