use serde::{Deserialize, Serialize};

use crate::domain::grid::RadialGrid;
use crate::domain::profile::{mapped_integral, RadialProfile};
use crate::error::{Error, Result};
use crate::rescale::RescaledState;

/// Norm in which a distance to the bubble is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceNorm {
    H1Dot,
    Lq(f64),
}

impl std::fmt::Display for DistanceNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistanceNorm::H1Dot => write!(f, "H1dot"),
            DistanceNorm::Lq(q) => write!(f, "L{q}"),
        }
    }
}

/// `∫ f(r, u, u', v, v') dx` for two radial profiles, on the finer of the two
/// log-spacings spanning both grids, plus core and tail pieces evaluated from
/// the profiles' models.
pub fn pair_integral<F>(u: &RadialProfile, v: &RadialProfile, f: F) -> Result<f64>
where
    F: Fn(f64, f64, f64, f64, f64) -> f64,
{
    if u.dim() != v.dim() {
        return Err(Error::InvalidInput(format!("dimensions differ: {} vs {}", u.dim(), v.dim())));
    }
    let (gu, gv) = (u.grid(), v.grid());
    let r_first = gu.first().min(gv.first());
    let r_last = gu.last().max(gv.last());
    let step = gu.log_step().min(gv.log_step());
    let grid = RadialGrid::with_log_step(u.dim(), r_first, r_last, step)?;
    let g = |r: f64| {
        let (a, da) = u.eval(r);
        let (b, db) = v.eval(r);
        f(r, a, da, b, db)
    };
    let body = grid.integrate(g);
    let core = mapped_integral(u.dim(), r_first, -1.0, g);
    let tail = mapped_integral(u.dim(), r_last, 1.0, g);
    Ok(body + core + tail)
}

/// `‖∇(u - v)‖`.
pub fn h1dot_distance(u: &RadialProfile, v: &RadialProfile) -> Result<f64> {
    u.check_gradient_integrable()?;
    v.check_gradient_integrable()?;
    Ok(pair_integral(u, v, |_, _, du, _, dv| (du - dv).powi(2))?.max(0.0).sqrt())
}

/// `‖u - v‖_{L^q}`.
pub fn lq_distance(u: &RadialProfile, v: &RadialProfile, q: f64) -> Result<f64> {
    u.check_power_integrable(q, &format!("L^{q} distance"))?;
    v.check_power_integrable(q, &format!("L^{q} distance"))?;
    Ok(pair_integral(u, v, |_, a, _, b, _| (a - b).abs().powf(q))?.powf(1.0 / q))
}

/// Distances from `Φ̃` to `W` in `Ḣ¹` and in `L^q` for each `q > d/(d-2)`.
pub fn talenti_distance(state: &RescaledState, norms: &[DistanceNorm]) -> Result<Vec<(DistanceNorm, f64)>> {
    let d = state.params.dim();
    let w = RadialProfile::talenti(crate::domain::functionals::talenti_grid(state.params.d)?)?;
    norms
        .iter()
        .map(|&norm| {
            let dist = match norm {
                DistanceNorm::H1Dot => h1dot_distance(&state.profile, &w)?,
                DistanceNorm::Lq(q) => {
                    if !(q > d / (d - 2.0)) {
                        return Err(Error::OutOfRange(format!(
                            "L^q distance needs q > d/(d-2) = {}, got {q}",
                            d / (d - 2.0)
                        )));
                    }
                    lq_distance(&state.profile, &w, q)?
                }
            };
            Ok((norm, dist))
        })
        .collect()
}
