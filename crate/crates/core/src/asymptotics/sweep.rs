use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::decay::{decay_sup, exp_decay_check, pointwise_decay_sup};
use crate::asymptotics::linear_fit;
use crate::cache::{solve_cached, ProfileCache};
use crate::domain::functionals::{functionals, talenti_grad_sq, talenti_power_norm};
use crate::domain::params::ProblemParams;
use crate::error::{Error, Result};
use crate::radial_ode::ShootOptions;
use crate::rescale::{rescale, talenti_distance, DistanceNorm};

/// One `ω` of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub m_star: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_over_alpha: f64,
    pub h1dot_dist: f64,
    /// `None` when `W ∉ L²` (`d <= 4`).
    pub l2_dist: Option<f64>,
    pub decay_sup: f64,
    pub exp_tail_ok: bool,
    /// `C₀` of the exponential envelope.
    pub exp_tail_c0: f64,
    /// `‖∇Φ‖² / ‖∇W‖²`, at most one.
    pub grad_ratio: f64,
    /// `ω^{1/2} ‖Φ‖₂`.
    pub mass_scaled: f64,
    /// `sup ω^{1/4} r^{(d-1)/2} Φ(r)`.
    pub pointwise_sup: f64,
    pub nehari_rel: f64,
    pub pohozaev_rel: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub shoot: ShootOptions,
    pub cache: Option<ProfileCache>,
}

fn sweep_row(params: &ProblemParams, opts: &SweepOptions, w_grad: f64) -> Result<SweepRow> {
    let res = solve_cached(opts.cache.as_ref(), params, &opts.shoot)?;
    let rep = functionals(&res.profile, params)?;
    let st = rescale(&res, params)?;
    let mut norms = vec![DistanceNorm::H1Dot];
    let has_l2 = params.d >= 5;
    if has_l2 {
        norms.push(DistanceNorm::Lq(2.0));
    }
    let dist = talenti_distance(&st, &norms)?;
    let exp = exp_decay_check(&st);
    Ok(SweepRow {
        omega: params.omega,
        m_star: res.m_star,
        alpha: st.alpha,
        beta: st.beta,
        beta_over_alpha: st.beta / st.alpha,
        h1dot_dist: dist[0].1,
        l2_dist: has_l2.then(|| dist[1].1),
        decay_sup: decay_sup(&st.profile),
        exp_tail_ok: exp.holds,
        exp_tail_c0: exp.c0,
        grad_ratio: rep.grad_sq / w_grad,
        mass_scaled: params.omega.sqrt() * rep.mass.sqrt(),
        pointwise_sup: pointwise_decay_sup(&res.profile, params.omega),
        nehari_rel: rep.nehari_rel(params),
        pohozaev_rel: rep.pohozaev_rel(params),
        residual: res.ode_residual,
    })
}

/// Solve and diagnose each `ω` independently; failures stay attached to their row.
pub fn sweep(d: u32, p: f64, omegas: &[f64], opts: &SweepOptions) -> Result<Vec<(f64, Result<SweepRow>)>> {
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("omega list must be strictly increasing".into()));
    }
    let w_grad = talenti_grad_sq(d)?;
    let rows = omegas
        .par_iter()
        .map(|&om| {
            let row = ProblemParams::new(d, p, om).and_then(|pp| {
                pp.check_existence_range()?;
                sweep_row(&pp, opts, w_grad)
            });
            (om, row)
        })
        .collect();
    Ok(rows)
}

/// `lim β/α = 2(p+1)/(4-(d-2)(p-1)) · ‖W‖₂² / ‖W‖_{p+1}^{p+1}`.
pub fn limit_constant(d: u32, p: f64) -> Result<f64> {
    let pp = ProblemParams::new(d, p, 1.0)?;
    let dd = d as f64;
    if d < 5 {
        return Err(Error::DivergentNorm(format!("W is not in L^2 for d = {d}")));
    }
    if (dd - 2.0) * (p + 1.0) <= dd {
        return Err(Error::DivergentNorm(format!("W is not in L^{} for d = {d}", p + 1.0)));
    }
    let w2 = talenti_power_norm(d, 2.0)?;
    let wp = talenti_power_norm(d, p + 1.0)?;
    Ok(2.0 * (p + 1.0) / pp.gamma() * w2 / wp)
}

/// Intercept of `β/α ≈ L + c √α` fitted through the given rows.
pub fn extrapolate_ratio(rows: &[SweepRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let x: Vec<f64> = rows.iter().map(|r| r.alpha.sqrt()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.beta_over_alpha).collect();
    Some(linear_fit(&x, &y).1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_constant_domain() {
        assert!(matches!(limit_constant(4, 2.0), Err(Error::DivergentNorm(_))));
        assert!(matches!(limit_constant(5, 7.0 / 3.0), Err(Error::InvalidParameter(_))));
        let c = limit_constant(5, 2.0).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }

    #[test]
    fn rejects_unsorted_omegas() {
        assert!(sweep(5, 2.0, &[10.0, 1.0], &SweepOptions::default()).is_err());
    }
}
