use serde::{Deserialize, Serialize};

use crate::domain::grid::sphere_area;
use crate::domain::params::ProblemParams;
use crate::domain::profile::RadialProfile;
use crate::domain::talenti::talenti_unchecked;
use crate::error::{Error, Result};
use crate::radial_ode::RadialEquation;
use crate::rescale::RescaledState;
use crate::spectral::eigen::SymTridiagonal;

/// Condition at the outer radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// `φ(R) = 0`.
    Dirichlet,
    /// `φ'(R) = -(d-2)/R φ(R)`, matching the decaying harmonic `r^{-(d-2)}`.
    DecayingHarmonic,
    /// Decaying harmonic corrected for a potential `V ≈ -K r^{-4}`: the zero-energy
    /// solution `r^{-(d-2)}(1 - K/(2d) r^{-2})` gives `φ'/φ = -(d-2)/R - V(R) R/d`.
    DecayingZeroEnergy,
}

/// Where the potential comes from, so the operator can be rebuilt on a finer grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialSource {
    /// `ω - g'(u)` for a profile of a radial equation.
    Profile { profile: RadialProfile, omega: f64, p: f64, p_coeff: f64, q: f64, q_coeff: f64 },
    /// `-(d+2)/(d-2) W^{4/(d-2)}`.
    CriticalTalenti,
    /// A constant.
    Constant(f64),
}

impl PotentialSource {
    fn eval(&self, d: f64, r: f64) -> f64 {
        match self {
            PotentialSource::Profile { profile, omega, p, p_coeff, q, q_coeff } => {
                let u = profile.eval(r).0.max(0.0);
                let mut v = *omega;
                if *p_coeff != 0.0 {
                    v -= p_coeff * p * u.powf(p - 1.0);
                }
                if *q_coeff != 0.0 {
                    v -= q_coeff * q * u.powf(q - 1.0);
                }
                v
            }
            PotentialSource::CriticalTalenti => {
                let q = (d + 2.0) / (d - 2.0);
                -q * talenti_unchecked(d, r).powf(q - 1.0)
            }
            PotentialSource::Constant(c) => *c,
        }
    }
}

/// Grid and boundary choices for a discretized operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorOptions {
    /// Number of intervals between `0` and `R`.
    pub intervals: usize,
    /// Outer radius; `None` lets the builder choose.
    pub radius: Option<f64>,
    pub boundary: Boundary,
}

impl OperatorOptions {
    /// Defaults for the critical linearization at `W`: a ball of radius 100 with
    /// the corrected decaying far-field condition.
    pub fn critical() -> Self {
        OperatorOptions { intervals: 8000, radius: Some(100.0), boundary: Boundary::DecayingZeroEnergy }
    }
}

impl Default for OperatorOptions {
    fn default() -> Self {
        OperatorOptions { intervals: 4000, radius: None, boundary: Boundary::Dirichlet }
    }
}

/// `-Δ_rad + V(r)` by finite volumes on `r_i = ℓ(e^{ih} - 1)`, `i = 0..=N`,
/// `r_N = R`. Cell `i` spans the midpoints around `r_i`; the generalized
/// problem `Aφ = λ Vφ` is stored symmetrized as `V^{-1/2} A V^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub dim: u32,
    /// Radii of the unknowns (`r_0 = 0`; `r_N` only for the Robin condition).
    pub nodes: Vec<f64>,
    pub potential: Vec<f64>,
    /// Cell volumes `V_i`.
    pub volumes: Vec<f64>,
    pub radius: f64,
    pub length_scale: f64,
    pub boundary: Boundary,
    pub intervals: usize,
    /// Stiffness part `A` (without the potential) as a tridiagonal.
    stiffness: SymTridiagonal,
    source: PotentialSource,
}

impl RadialOperator {
    pub fn build(
        dim: u32,
        source: PotentialSource,
        length_scale: f64,
        radius: f64,
        intervals: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        if !(length_scale > 0.0 && radius > 0.0 && radius.is_finite() && intervals >= 8) {
            return Err(Error::InvalidInput(format!(
                "operator grid needs ℓ > 0, R > 0 and at least 8 intervals, got ℓ = {length_scale}, R = {radius}, N = {intervals}"
            )));
        }
        let d = dim as f64;
        let area = sphere_area(dim);
        let h = (1.0 + radius / length_scale).ln() / intervals as f64;
        let mut r: Vec<f64> = (0..=intervals).map(|i| length_scale * (h * i as f64).exp_m1()).collect();
        r[intervals] = radius;
        let unknowns = match boundary {
            Boundary::Dirichlet => intervals,
            Boundary::DecayingHarmonic | Boundary::DecayingZeroEnergy => intervals + 1,
        };
        let mid = |i: usize| 0.5 * (r[i] + r[i + 1]);
        let mut volumes = Vec::with_capacity(unknowns);
        for i in 0..unknowns {
            let lo = if i == 0 { 0.0 } else { mid(i - 1) };
            let hi = if i < intervals { mid(i) } else { radius };
            volumes.push(area * (hi.powf(d) - lo.powf(d)) / d);
        }
        let flux = |i: usize| area * mid(i).powf(d - 1.0) / (r[i + 1] - r[i]);
        let mut diag = vec![0.0; unknowns];
        let mut off = vec![0.0; unknowns - 1];
        for i in 0..intervals {
            let a = flux(i);
            diag[i] += a;
            if i + 1 < unknowns {
                diag[i + 1] += a;
                off[i] = -a;
            }
        }
        match boundary {
            Boundary::Dirichlet => {}
            Boundary::DecayingHarmonic => diag[intervals] += (d - 2.0) * area * radius.powf(d - 2.0),
            Boundary::DecayingZeroEnergy => {
                let kappa = (d - 2.0) / radius + source.eval(d, radius) * radius / d;
                diag[intervals] += kappa * area * radius.powf(d - 1.0);
            }
        }
        let nodes = r[..unknowns].to_vec();
        let potential: Vec<f64> = nodes.iter().map(|&x| source.eval(d, x)).collect();
        if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("potential is not finite at r = {:e}", nodes[i])));
        }
        Ok(RadialOperator {
            dim,
            nodes,
            potential,
            volumes,
            radius,
            length_scale,
            boundary,
            intervals,
            stiffness: SymTridiagonal { diag, off },
            source,
        })
    }

    /// Same operator with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::build(
            self.dim,
            self.source.clone(),
            self.length_scale,
            self.radius,
            self.intervals * factor,
            self.boundary,
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `V^{-1/2} (A + V·diag(q)) V^{-1/2}`.
    pub fn symmetric_matrix(&self) -> SymTridiagonal {
        let s: Vec<f64> = self.volumes.iter().map(|v| 1.0 / v.sqrt()).collect();
        let diag = (0..self.len()).map(|i| self.stiffness.diag[i] * s[i] * s[i] + self.potential[i]).collect();
        let off = (0..self.len() - 1).map(|i| self.stiffness.off[i] * s[i] * s[i + 1]).collect();
        SymTridiagonal { diag, off }
    }

    /// `(Lφ)_i = ((Aφ)_i + V_i q_i φ_i) / V_i` at the unknowns.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let a = self.stiffness.matvec(phi);
        (0..self.len()).map(|i| a[i] / self.volumes[i] + self.potential[i] * phi[i]).collect()
    }

    /// `(Σ V_i f_i g_i)`, the discrete `L²(R^d)` inner product on the ball.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.volumes.iter().zip(f.iter().zip(g)).map(|(v, (a, b))| v * a * b).sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).max(0.0).sqrt()
    }

    /// A profile sampled at the unknowns.
    pub fn sample(&self, u: &RadialProfile) -> Vec<f64> {
        self.nodes.iter().map(|&r| u.eval(r).0).collect()
    }
}

/// Radius beyond which `u < floor·u(0)`, searched geometrically from `ℓ`.
fn decay_radius(u: &RadialProfile, length: f64, floor: f64) -> f64 {
    let u0 = u.value_at_origin().abs().max(f64::MIN_POSITIVE);
    let mut r = length;
    for _ in 0..4000 {
        if u.eval(r).0.abs() < floor * u0 {
            return r;
        }
        r *= 1.01;
    }
    r
}

/// Natural core length `(ω + |g'(u(0))|)^{-1/2}`.
fn core_length(eq: &RadialEquation, u0: f64) -> f64 {
    let rate = eq.omega.abs()
        + eq.p_coeff.abs() * eq.p * u0.powf(eq.p - 1.0)
        + eq.q_coeff.abs() * eq.q * u0.powf(eq.q - 1.0);
    1.0 / rate.max(f64::MIN_POSITIVE).sqrt()
}

/// Linearization `ω - a p u^{p-1} - b q u^{q-1}` of a radial equation at `u`.
pub fn linearize_equation(u: &RadialProfile, eq: &RadialEquation, opts: &OperatorOptions) -> Result<RadialOperator> {
    if u.dim() != eq.d {
        return Err(Error::InvalidInput(format!("profile dimension {} does not match d = {}", u.dim(), eq.d)));
    }
    let length = core_length(eq, u.value_at_origin());
    let radius = opts.radius.unwrap_or_else(|| decay_radius(u, length, 1e-10).max(10.0 * length));
    let source = PotentialSource::Profile {
        profile: u.clone(),
        omega: eq.omega,
        p: eq.p,
        p_coeff: eq.p_coeff,
        q: eq.q,
        q_coeff: eq.q_coeff,
    };
    RadialOperator::build(eq.d, source, length, radius, opts.intervals, opts.boundary)
}

/// `L_u = -Δ + ω - p u^{p-1} - (d+2)/(d-2) u^{4/(d-2)}` (critical term dropped
/// when `params.critical` is false).
pub fn linearize(u: &RadialProfile, params: &ProblemParams, opts: &OperatorOptions) -> Result<RadialOperator> {
    params.validate()?;
    linearize_equation(u, &RadialEquation::from(params), opts)
}

/// The linearization in critical variables, `-Δ + α - pβΦ̃^{p-1} - q Φ̃^{q-1}`.
pub fn linearize_rescaled(state: &RescaledState, opts: &OperatorOptions) -> Result<RadialOperator> {
    linearize_equation(&state.profile, &state.equation(), opts)
}

/// `-Δ - (d+2)/(d-2) W^{4/(d-2)}` on the ball of radius `R`.
pub fn critical_linearization(d: u32, opts: &OperatorOptions) -> Result<RadialOperator> {
    crate::domain::params::check_dimension(d)?;
    let radius = opts.radius.unwrap_or(100.0);
    RadialOperator::build(d, PotentialSource::CriticalTalenti, 1.0, radius, opts.intervals, opts.boundary)
}

/// `-Δ + c` on the ball of radius `R`.
pub fn free_operator(d: u32, c: f64, opts: &OperatorOptions) -> Result<RadialOperator> {
    crate::domain::params::check_dimension(d)?;
    let radius = opts.radius.unwrap_or(10.0);
    RadialOperator::build(d, PotentialSource::Constant(c), 1.0, radius, opts.intervals, opts.boundary)
}
