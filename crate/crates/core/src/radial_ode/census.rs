use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::functionals::functionals;
use crate::domain::params::ProblemParams;
use crate::error::{Error, Result};
use crate::radial_ode::shoot::{classify, shoot_in_bracket, RadialEquation, ShootOptions, ShotClass};

/// Smallest admissible scan size.
pub const MIN_SAMPLES: usize = 100;

/// One refined undershoot-to-crossing transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusCandidate {
    pub m_star: f64,
    pub action: f64,
    pub nehari_rel: f64,
    pub pohozaev_rel: f64,
}

/// Scan of central heights with every sign change of the shot class refined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub params: ProblemParams,
    pub heights: Vec<f64>,
    pub classes: Vec<ShotClass>,
    /// Consecutive heights `(undershoot, crossing)` bracketing a transition.
    pub brackets: Vec<(f64, f64)>,
    pub candidates: Vec<CensusCandidate>,
    /// Brackets whose refinement failed, with the reason.
    pub failures: Vec<(f64, f64, String)>,
}

impl Census {
    /// Number of undershoot → crossing transitions along the scan.
    pub fn transitions(&self) -> usize {
        self.brackets.len()
    }

    /// Number of shots left inconclusive at scan resolution.
    pub fn inconclusive(&self) -> usize {
        self.classes.iter().filter(|c| matches!(c, ShotClass::Inconclusive { .. })).count()
    }

    /// Candidate with the smallest action.
    pub fn least_action(&self) -> Option<&CensusCandidate> {
        self.candidates.iter().min_by(|a, b| a.action.total_cmp(&b.action))
    }
}

/// Classify `samples` log-spaced heights in `[m_lo, m_hi]` in parallel and refine
/// each undershoot → crossing transition into a candidate solution.
///
/// Inconclusive shots and failed refinements are recorded, not fatal. The
/// parameters only need to be admissible, not inside the existence range.
pub fn ground_state_census(
    params: &ProblemParams,
    m_lo: f64,
    m_hi: f64,
    samples: usize,
    opts: &ShootOptions,
) -> Result<Census> {
    params.validate()?;
    if !(m_lo > 0.0 && m_hi > m_lo && samples >= MIN_SAMPLES) {
        return Err(Error::InvalidInput(format!(
            "census needs 0 < m_lo < m_hi and at least {MIN_SAMPLES} samples, got [{m_lo}, {m_hi}] x {samples}"
        )));
    }
    let eq = RadialEquation::from(params);
    let ratio = (m_hi / m_lo).ln() / (samples - 1) as f64;
    let heights: Vec<f64> = (0..samples).map(|i| m_lo * (ratio * i as f64).exp()).collect();
    let classes = heights
        .par_iter()
        .map(|&m| classify(&eq, m, &opts.shot))
        .collect::<Result<Vec<_>>>()?;

    let brackets: Vec<(f64, f64)> = (1..samples)
        .filter(|&i| !classes[i - 1].is_crossing() && classes[i].is_crossing())
        .map(|i| (heights[i - 1], heights[i]))
        .collect();
    let refined: Vec<Result<CensusCandidate>> = brackets
        .par_iter()
        .map(|&(lo, hi)| {
            let res = shoot_in_bracket(params, lo, hi, opts)?;
            let rep = functionals(&res.profile, params)?;
            Ok(CensusCandidate {
                m_star: res.m_star,
                action: rep.action,
                nehari_rel: rep.nehari_rel(params),
                pohozaev_rel: rep.pohozaev_rel(params),
            })
        })
        .collect();
    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for (r, &(lo, hi)) in refined.into_iter().zip(&brackets) {
        match r {
            Ok(c) => candidates.push(c),
            Err(e) => failures.push((lo, hi, e.to_string())),
        }
    }
    Ok(Census { params: *params, heights, classes, brackets, candidates, failures })
}
