//! Radial linearized operators and their spectrum near zero.

pub mod eigen;
mod operator;

pub use operator::{
    critical_linearization, free_operator, linearize, linearize_equation, linearize_rescaled, Boundary,
    OperatorOptions, PotentialSource, RadialOperator,
};

use serde::{Deserialize, Serialize};

use crate::domain::profile::RadialProfile;
use crate::error::{Error, Result};

/// Eigenpair residual bound enforced on every reported pair.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Eigenvalues of smallest magnitude with their eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ordered by `|λ|`.
    pub eigenvalues: Vec<f64>,
    /// `‖(L - λ)φ‖ / ‖φ‖` in the weighted norm.
    pub residuals: Vec<f64>,
    /// Eigenfunctions at the operator's nodes, normalized in `L²`.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub nodes: Vec<f64>,
    /// `min |λ|`.
    pub gap: f64,
    pub negative_count: usize,
    pub radius: f64,
    pub intervals: usize,
    /// Relative change of the gap under grid doubling, when computed.
    pub refinement_delta: Option<f64>,
}

fn eigen_report(op: &RadialOperator, k: usize) -> Result<SpectrumReport> {
    let t = op.symmetric_matrix();
    let (pairs, negative_count) = eigen::nearest_to_zero(&t, k, 0.1 * RESIDUAL_TOL)?;
    let mut eigenvalues = Vec::new();
    let mut residuals = Vec::new();
    let mut eigenfunctions = Vec::new();
    for p in pairs {
        // ψ = V^{1/2} φ, and ‖ψ‖ = 1 is the weighted norm of φ.
        let phi: Vec<f64> = p.vector.iter().zip(&op.volumes).map(|(x, v)| x / v.sqrt()).collect();
        let lphi = op.apply(&phi);
        let diff: Vec<f64> = lphi.iter().zip(&phi).map(|(a, b)| a - p.value * b).collect();
        let residual = op.norm(&diff) / op.norm(&phi);
        if residual > RESIDUAL_TOL {
            return Err(Error::IterationLimit(format!(
                "eigenpair λ = {:e} has residual {residual:e} > {RESIDUAL_TOL:e}",
                p.value
            )));
        }
        eigenvalues.push(p.value);
        residuals.push(residual);
        eigenfunctions.push(phi);
    }
    let gap = eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Ok(SpectrumReport {
        eigenvalues,
        residuals,
        eigenfunctions,
        nodes: op.nodes.clone(),
        gap,
        negative_count,
        radius: op.radius,
        intervals: op.intervals,
        refinement_delta: None,
    })
}

/// The `k` eigenpairs closest to zero, plus the gap change under grid doubling.
pub fn spectrum_near_zero(op: &RadialOperator, k: usize) -> Result<SpectrumReport> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("need k >= 3 eigenpairs, got {k}")));
    }
    let mut rep = eigen_report(op, k)?;
    let fine = eigen_report(&op.refined(2)?, k)?;
    rep.refinement_delta = Some((fine.gap - rep.gap).abs() / rep.gap.max(f64::MIN_POSITIVE));
    Ok(rep)
}

/// `‖L φ‖ / ‖φ‖` for a candidate kernel element sampled at the nodes.
pub fn kernel_witness_check(op: &RadialOperator, candidate: &RadialProfile) -> Result<f64> {
    let phi = op.sample(candidate);
    let n = op.norm(&phi);
    if !(n > 0.0) {
        return Err(Error::InvalidInput("kernel candidate vanishes on the grid".into()));
    }
    Ok(op.norm(&op.apply(&phi)) / n)
}

/// The eigenpair best aligned with a candidate direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMatch {
    pub eigenvalue: f64,
    /// `|<φ, c>| / (‖φ‖ ‖c‖)`.
    pub overlap: f64,
    /// `‖φ/‖φ‖ ∓ c/‖c‖‖` with the sign chosen to align.
    pub rel_l2_error: f64,
    pub index: usize,
}

/// Identify the eigenfunction closest to `candidate` among the reported pairs.
pub fn match_eigenfunction(op: &RadialOperator, rep: &SpectrumReport, candidate: &RadialProfile) -> Result<KernelMatch> {
    let c = op.sample(candidate);
    let cn = op.norm(&c);
    if !(cn > 0.0) {
        return Err(Error::InvalidInput("candidate vanishes on the grid".into()));
    }
    let mut best: Option<KernelMatch> = None;
    for (i, phi) in rep.eigenfunctions.iter().enumerate() {
        let pn = op.norm(phi);
        let dot = op.inner(phi, &c) / (pn * cn);
        let s = dot.signum();
        let diff: Vec<f64> = phi.iter().zip(&c).map(|(a, b)| a / pn - s * b / cn).collect();
        let m = KernelMatch { eigenvalue: rep.eigenvalues[i], overlap: dot.abs(), rel_l2_error: op.norm(&diff), index: i };
        if best.map_or(true, |b| m.overlap > b.overlap) {
            best = Some(m);
        }
    }
    best.ok_or_else(|| Error::NotFound("no eigenpairs to match".into()))
}
