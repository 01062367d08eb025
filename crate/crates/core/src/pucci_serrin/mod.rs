//! The Pucci–Serrin uniqueness condition for `f(u) = −ωu + u^p + u^q`.
//!
//! The condition `d/du[F/f] ≥ (d−2)/(2d)` is equivalent to
//! `g(u) := q f(u)² − (q+1) F(u) f′(u) ≥ 0`, and `g` expands into five powers:
//!
//! ```text
//! g(u) = A₂ω²u² + A_{p+1}ωu^{p+1} + A_{q+1}ωu^{q+1} + A_{2p}u^{2p} + A_{p+q}u^{p+q}
//! ```
//!
//! With `r = u^{p−1}/ω`, the first, second and fourth terms are `ω²u² Q(r)` for the
//! quadratic `Q(r) = A₂ + A_{p+1}r + A_{2p}r²`. So nonnegative `A_{q+1}`, `A_{p+q}` and
//! `min_{r≥0} Q` give `g ≥ 0` for every `u` and `ω` at once.

pub mod exact;
pub mod interval;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::params::check_dimension;
use crate::error::{Error, Result};
use exact::{ExactCoefficients, QMinimum, Rational};
use interval::Interval;

/// The five coefficients of `g` in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsCoefficients {
    pub a2: f64,
    pub a_p1: f64,
    pub a_q1: f64,
    pub a_2p: f64,
    pub a_pq: f64,
}

impl PsCoefficients {
    pub fn as_array(&self) -> [f64; 5] {
        [self.a2, self.a_p1, self.a_q1, self.a_2p, self.a_pq]
    }
}

fn critical(d: u32) -> f64 {
    (d as f64 + 2.0) / (d as f64 - 2.0)
}

fn check_params(d: u32, p: f64) -> Result<()> {
    check_dimension(d)?;
    let q = critical(d);
    if !(p.is_finite() && p > 1.0) || p == q {
        return Err(Error::InvalidParameter(format!("need p > 1 and p != q = {q}, got p = {p}")));
    }
    Ok(())
}

/// Coefficients in floating point, together with their exact values when
/// `p` is a small-denominator rational.
///
/// `p > q` is accepted: `g` is still well defined, but `A_{2p}` is then negative.
pub fn ps_coefficients(d: u32, p: f64) -> Result<(PsCoefficients, Option<ExactCoefficients>)> {
    check_params(d, p)?;
    if let Some(pr) = exact::rational_from_f64(p) {
        let c = exact::exact_coefficients(d, &pr);
        let f = PsCoefficients {
            a2: exact::to_f64(&c.a2),
            a_p1: exact::to_f64(&c.a_p1),
            a_q1: exact::to_f64(&c.a_q1),
            a_2p: exact::to_f64(&c.a_2p),
            a_pq: exact::to_f64(&c.a_pq),
        };
        return Ok((f, Some(c)));
    }
    let q = critical(d);
    Ok((
        PsCoefficients {
            a2: (q - 1.0) / 2.0,
            a_p1: ((p * p - 3.0 * p - 2.0) * q + p * p + p + 2.0) / (2.0 * (p + 1.0)),
            a_q1: (q - 1.0) * (q - 2.0) / 2.0,
            a_2p: (q - p) / (p + 1.0),
            a_pq: (q - p) * (p + 1.0 - q) / (p + 1.0),
        },
        None,
    ))
}

/// `(f(u), F(u), f′(u))`.
pub fn f_parts(u: f64, d: u32, p: f64, omega: f64) -> (f64, f64, f64) {
    let q = critical(d);
    let (up, uq) = (u.powf(p), u.powf(q));
    let f = -omega * u + up + uq;
    let big_f = -0.5 * omega * u * u + up * u / (p + 1.0) + uq * u / (q + 1.0);
    let df = -omega + p * u.powf(p - 1.0) + q * u.powf(q - 1.0);
    (f, big_f, df)
}

/// `g(u) = q f(u)² − (q+1) F(u) f′(u)`, evaluated directly.
pub fn g_eval(u: f64, d: u32, p: f64, omega: f64) -> f64 {
    let q = critical(d);
    let (f, big_f, df) = f_parts(u, d, p, omega);
    q * f * f - (q + 1.0) * big_f * df
}

/// `q f² + (q+1)|F f′|`: the size of the two summands of [`g_eval`], the natural
/// scale for its rounding error.
pub fn g_direct_magnitude(u: f64, d: u32, p: f64, omega: f64) -> f64 {
    let q = critical(d);
    let (f, big_f, df) = f_parts(u, d, p, omega);
    q * f * f + (q + 1.0) * (big_f * df).abs()
}

fn expansion_terms(u: f64, d: u32, p: f64, omega: f64, c: &PsCoefficients) -> [f64; 5] {
    let q = critical(d);
    [
        c.a2 * omega * omega * u * u,
        c.a_p1 * omega * u.powf(p + 1.0),
        c.a_q1 * omega * u.powf(q + 1.0),
        c.a_2p * u.powf(2.0 * p),
        c.a_pq * u.powf(p + q),
    ]
}

/// `g(u)` through the five-term expansion.
pub fn g_expansion(u: f64, d: u32, p: f64, omega: f64, c: &PsCoefficients) -> f64 {
    expansion_terms(u, d, p, omega, c).iter().sum()
}

/// `g(u) / Σ|terms|`, in `[−1, 1]`.
pub fn g_normalized(u: f64, d: u32, p: f64, omega: f64, c: &PsCoefficients) -> f64 {
    let t = expansion_terms(u, d, p, omega, c);
    let s: f64 = t.iter().map(|x| x.abs()).sum();
    if s == 0.0 {
        0.0
    } else {
        t.iter().sum::<f64>() / s
    }
}

/// Interval enclosure of the expansion: coefficient and exponent enclosures,
/// plus the power of `ω` carried by each term.
#[derive(Debug, Clone, Copy)]
struct IntervalModel {
    coeffs: [Interval; 5],
    exps: [Interval; 5],
    omega_pow: [i32; 5],
}

impl IntervalModel {
    fn new(d: u32, p: f64, exact: Option<&ExactCoefficients>) -> Self {
        let one = Interval::point(1.0);
        let two = Interval::point(2.0);
        let q = Interval::from_rational(&exact::critical_power_exact(d));
        let (coeffs, pi) = match exact {
            Some(c) => (
                [&c.a2, &c.a_p1, &c.a_q1, &c.a_2p, &c.a_pq].map(Interval::from_rational),
                Interval::from_rational(&c.p),
            ),
            None => {
                let pi = Interval::point(p);
                let p1 = pi.add(one);
                let qm1 = q.sub(one);
                let a_p1 = pi
                    .mul(pi)
                    .sub(Interval::point(3.0).mul(pi))
                    .sub(two)
                    .mul(q)
                    .add(pi.mul(pi))
                    .add(pi)
                    .add(two)
                    .div(two.mul(p1));
                let qmp = q.sub(pi);
                (
                    [
                        qm1.div(two),
                        a_p1,
                        qm1.mul(q.sub(two)).div(two),
                        qmp.div(p1),
                        qmp.mul(p1.sub(q)).div(p1),
                    ],
                    pi,
                )
            }
        };
        let exps = [two, pi.add(one), q.add(one), two.mul(pi), pi.add(q)];
        IntervalModel { coeffs, exps, omega_pow: [2, 1, 1, 0, 0] }
    }

    fn enclose(&self, u: Interval, omega: f64) -> Interval {
        let w = Interval::point(omega);
        let mut acc = Interval::point(0.0);
        for k in 0..5 {
            let mut t = self.coeffs[k].mul(u.powf(self.exps[k]));
            for _ in 0..self.omega_pow[k] {
                t = t.mul(w);
            }
            acc = acc.add(t);
        }
        acc
    }
}

/// Scan controls. The default range is `[10⁻¹⁶ u_hi, u_hi]` with
/// `u_hi = max(2Φ(0), 10 ω^{1/(p−1)})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub per_decade: u32,
    pub u_lo: Option<f64>,
    pub u_hi: Option<f64>,
    /// Central height of a computed ground state, if one is at hand.
    pub phi0: Option<f64>,
    /// Subdivision budget per scan cell for the interval pass.
    pub cell_budget: u32,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec { per_decade: 10_000, u_lo: None, u_hi: None, phi0: None, cell_budget: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// A point with `g(u) < 0`, confirmed by an interval enclosure of `g(u)` that
/// lies below zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: f64,
    pub u: f64,
    pub g: f64,
    pub g_upper: f64,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GMin {
    pub u: f64,
    pub g: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub u_lo: f64,
    pub u_hi: f64,
    pub per_decade: u32,
    pub points: usize,
    pub cells_certified: usize,
    pub cells_negative: usize,
    pub cells_unresolved: usize,
}

/// Exact data at rational `p`, as `n/d` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    pub p: String,
    pub q: String,
    pub a2: String,
    pub a_p1: String,
    pub a_q1: String,
    pub a_2p: String,
    pub a_pq: String,
    /// `min_{r≥0} Q(r)`, absent when `Q` is unbounded below.
    pub q_min: Option<String>,
    pub q_min_at: Option<String>,
    pub case_formula: Option<String>,
    pub case_value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSCheckReport {
    pub d: u32,
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    pub coefficients: PsCoefficients,
    pub exact: Option<ExactSummary>,
    pub verdict: Verdict,
    pub g_min: GMin,
    pub scan: ScanSummary,
    pub certificate: String,
    pub witness: Option<Witness>,
    pub remark_witness: Option<Witness>,
    pub hint: Option<String>,
}

fn summarize(d: u32, c: &ExactCoefficients) -> ExactSummary {
    let qm = exact::q_minimum(c);
    let (q_min, q_min_at) = match &qm {
        QMinimum::AtOrigin(v) => (Some(exact::fmt(v)), Some("0".to_string())),
        QMinimum::Vertex { value, at } => (Some(exact::fmt(value)), Some(exact::fmt(at))),
        QMinimum::Unbounded => (None, None),
    };
    let case = exact::case_polynomial(d, &c.p);
    ExactSummary {
        p: exact::fmt(&c.p),
        q: exact::fmt(&c.q),
        a2: exact::fmt(&c.a2),
        a_p1: exact::fmt(&c.a_p1),
        a_q1: exact::fmt(&c.a_q1),
        a_2p: exact::fmt(&c.a_2p),
        a_pq: exact::fmt(&c.a_pq),
        q_min,
        q_min_at,
        case_formula: case.as_ref().map(|(f, _)| f.to_string()),
        case_value: case.as_ref().map(|(_, v)| exact::fmt(v)),
    }
}

/// `A_{q+1} ≥ 0`, `A_{p+q} ≥ 0` and `min Q ≥ 0`: `g ≥ 0` on `[0, ∞)` for all `ω ≥ 0`.
fn exact_certificate(c: &ExactCoefficients) -> Option<String> {
    use num_traits::Signed;
    let qm = exact::q_minimum(c);
    if c.a_q1.is_negative() || c.a_pq.is_negative() || !qm.nonnegative() {
        return None;
    }
    let how = match &qm {
        QMinimum::AtOrigin(_) => "A_{p+1} >= 0 so min Q = A_2".to_string(),
        QMinimum::Vertex { value, .. } => format!("exact discriminant: min Q = {}", exact::fmt(value)),
        QMinimum::Unbounded => unreachable!(),
    };
    Some(format!(
        "exact evaluation at rational p = {}: A_(q+1) = {} >= 0, A_(p+q) = {} >= 0, {how} >= 0; g >= 0 for all u >= 0 and omega >= 0",
        exact::fmt(&c.p),
        exact::fmt(&c.a_q1),
        exact::fmt(&c.a_pq),
    ))
}

enum Cell {
    Certified,
    Negative(f64),
    Unresolved(f64),
}

/// Bisect `[a, b]` geometrically until each piece has an enclosure of one sign.
fn resolve_cell(model: &IntervalModel, omega: f64, a: f64, b: f64, budget: u32) -> Cell {
    let mut stack = vec![(a, b)];
    let mut used = 0;
    while let Some((lo, hi)) = stack.pop() {
        used += 1;
        let e = model.enclose(Interval::new(lo, hi), omega);
        if e.lo >= 0.0 {
            continue;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let at = model.enclose(Interval::point(mid), omega);
        if at.hi < 0.0 {
            return Cell::Negative(mid);
        }
        if used >= budget || !(mid > lo && mid < hi) {
            return Cell::Unresolved(mid);
        }
        stack.push((lo, mid));
        stack.push((mid, hi));
    }
    Cell::Certified
}

fn witness_at(model: &IntervalModel, d: u32, p: f64, omega: f64, c: &PsCoefficients, u: f64) -> Option<Witness> {
    let e = model.enclose(Interval::point(u), omega);
    (e.hi < 0.0).then(|| Witness { omega, u, g: g_expansion(u, d, p, omega, c), g_upper: e.hi, alpha: None })
}

/// Checks `g ≥ 0` for one `(d, p, ω)`.
///
/// At rational `p` the verdict "holds" comes from the exact coefficient test;
/// otherwise from an interval enclosure of `g` over every cell of the scan.
/// "fails" always carries a point whose enclosure of `g` is negative.
pub fn check_condition(d: u32, p: f64, omega: f64, scan: &ScanSpec) -> Result<PSCheckReport> {
    let (coeffs, exact_c) = ps_coefficients(d, p)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("need omega > 0, got {omega}")));
    }
    if scan.per_decade == 0 {
        return Err(Error::InvalidInput("per_decade must be positive".into()));
    }
    let q = critical(d);
    let u_hi = scan
        .u_hi
        .unwrap_or_else(|| (10.0 * omega.powf(1.0 / (p - 1.0))).max(2.0 * scan.phi0.unwrap_or(0.0)));
    let u_lo = scan.u_lo.unwrap_or(u_hi * 1e-16);
    if !(u_lo > 0.0 && u_hi > u_lo && u_hi.is_finite()) {
        return Err(Error::InvalidInput(format!("bad scan range [{u_lo:e}, {u_hi:e}]")));
    }
    let n = ((u_hi / u_lo).log10() * scan.per_decade as f64).ceil() as usize + 1;
    let step = (u_hi / u_lo).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| if i + 1 == n { u_hi } else { u_lo * (step * i as f64).exp() }).collect();
    let normalized: Vec<f64> = grid.par_iter().map(|&u| g_normalized(u, d, p, omega, &coeffs)).collect();
    let (imin, &gn_min) = normalized
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("scan has at least two points");
    let g_min = GMin { u: grid[imin], g: g_expansion(grid[imin], d, p, omega, &coeffs), normalized: gn_min };

    let model = IntervalModel::new(d, p, exact_c.as_ref());
    let certified = exact_c.as_ref().and_then(exact_certificate);
    let budget = if certified.is_some() { 1 } else { scan.cell_budget.max(1) };
    let cells: Vec<Cell> = (0..n - 1)
        .into_par_iter()
        .map(|i| resolve_cell(&model, omega, grid[i], grid[i + 1], budget))
        .collect();
    let mut summary = ScanSummary {
        u_lo,
        u_hi,
        per_decade: scan.per_decade,
        points: n,
        cells_certified: 0,
        cells_negative: 0,
        cells_unresolved: 0,
    };
    let mut negative = None;
    let mut unresolved = None;
    for cell in &cells {
        match cell {
            Cell::Certified => summary.cells_certified += 1,
            Cell::Negative(u) => {
                summary.cells_negative += 1;
                negative.get_or_insert(*u);
            }
            Cell::Unresolved(u) => {
                summary.cells_unresolved += 1;
                unresolved.get_or_insert(*u);
            }
        }
    }
    let witness = witness_at(&model, d, p, omega, &coeffs, g_min.u)
        .or_else(|| negative.and_then(|u| witness_at(&model, d, p, omega, &coeffs, u)));
    let remark_witness = if d >= 7 && witness.is_some() { remark_c1_witness(d, p).ok() } else { None };

    let mut hint = None;
    let (verdict, certificate) = match (&certified, &witness) {
        (Some(text), None) => (Verdict::Holds, text.clone()),
        (Some(_), Some(w)) => {
            hint = Some(format!("exact certificate contradicts the enclosure at u = {:e}", w.u));
            (Verdict::Inconclusive, "conflicting exact and interval evidence".to_string())
        }
        (None, Some(w)) => (
            Verdict::Fails,
            format!("interval enclosure of g at u = {:e} lies below zero (upper bound {:e})", w.u, w.g_upper),
        ),
        (None, None) if summary.cells_unresolved == 0 => (
            Verdict::Holds,
            format!(
                "interval enclosure over [{u_lo:e}, {u_hi:e}], {} log-spaced points per decade: all {} cells have g >= 0",
                scan.per_decade,
                n - 1
            ),
        ),
        (None, None) => {
            hint = Some(format!(
                "{} cells near u = {:e} could not be resolved; raise per_decade or cell_budget",
                summary.cells_unresolved,
                unresolved.unwrap_or(g_min.u)
            ));
            (Verdict::Inconclusive, "partial interval enclosure".to_string())
        }
    };
    if verdict == Verdict::Holds && gn_min < -1e-12 {
        return Err(Error::InvalidInput(format!(
            "float scan reached normalized g = {gn_min:e} under a holding certificate"
        )));
    }
    Ok(PSCheckReport {
        d,
        p,
        q,
        omega,
        coefficients: coeffs,
        exact: exact_c.as_ref().map(|c| summarize(d, c)),
        verdict,
        g_min,
        scan: summary,
        certificate,
        witness,
        remark_witness,
        hint,
    })
}

/// The failing point for `d ≥ 7`: with `α` midway between `1/(q−1)` and `1/(p−1)`,
/// doubles `ω` from 1 until the enclosure of `g(ω^α)` is negative.
pub fn remark_c1_witness(d: u32, p: f64) -> Result<Witness> {
    if d < 7 {
        return Err(Error::InvalidParameter(format!("the witness search needs d >= 7, got d = {d}")));
    }
    let (coeffs, exact_c) = ps_coefficients(d, p)?;
    let q = critical(d);
    let alpha = 0.5 * (1.0 / (q - 1.0) + 1.0 / (p - 1.0));
    let model = IntervalModel::new(d, p, exact_c.as_ref());
    let mut omega: f64 = 1.0;
    while omega <= 1e16 {
        let u = omega.powf(alpha);
        if let Some(w) = witness_at(&model, d, p, omega, &coeffs, u) {
            return Ok(Witness { alpha: Some(alpha), ..w });
        }
        omega *= 2.0;
    }
    Err(Error::NotFound(format!("no negative g(omega^alpha) for omega <= 1e16 (d = {d}, p = {p})")))
}

/// The `p → 1` end of the quadratic-form analysis, outside the admissible range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDiagnostic {
    pub d: u32,
    pub q_min: Option<String>,
    pub case_formula: Option<String>,
    pub case_value: Option<String>,
    pub zero_margin: bool,
}

pub fn p_one_limit(d: u32) -> Result<BoundaryDiagnostic> {
    check_dimension(d)?;
    let one = exact::rat(1, 1);
    let c = exact::exact_coefficients(d, &one);
    let qm = exact::q_minimum(&c);
    let case = exact::case_polynomial(d, &one);
    let zero = |x: &Rational| num_traits::Zero::is_zero(x);
    Ok(BoundaryDiagnostic {
        d,
        q_min: qm.value().map(exact::fmt),
        case_formula: case.as_ref().map(|(f, _)| f.to_string()),
        case_value: case.as_ref().map(|(_, v)| exact::fmt(v)),
        zero_margin: qm.value().is_some_and(zero),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_vanishes_at_zero_and_omega_zero_is_nonnegative() {
        assert_eq!(g_eval(0.0, 5, 2.0, 3.0), 0.0);
        for d in 3..=6 {
            let q = critical(d);
            // p >= q - 1 keeps A_(p+q) >= 0.
            let p = (q - 0.5).max(1.1);
            for &u in &[0.1, 1.0, 7.0] {
                assert!(g_eval(u, d, p, 0.0) >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ps_coefficients(5, 1.0).is_err());
        assert!(ps_coefficients(6, 2.0).is_err());
        assert!(ps_coefficients(2, 1.5).is_err());
        assert!(remark_c1_witness(6, 1.5).is_err());
    }

    #[test]
    fn d4_p2_certificate_uses_the_discriminant() {
        let rep = check_condition(4, 2.0, 7.0, &ScanSpec { per_decade: 200, ..Default::default() }).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.exact.as_ref().unwrap().q_min.as_deref(), Some("2/3"));
        assert!(rep.certificate.contains("2/3"));
    }

    #[test]
    fn irrational_p_goes_through_the_interval_scan() {
        let p = std::f64::consts::SQRT_2 + 0.5;
        let rep = check_condition(5, p, 10.0, &ScanSpec { per_decade: 500, ..Default::default() }).unwrap();
        assert!(rep.exact.is_none());
        assert_eq!(rep.verdict, Verdict::Holds, "{rep:?}");
        assert_eq!(rep.scan.cells_unresolved, 0);
    }

    #[test]
    fn d7_witness() {
        let w = remark_c1_witness(7, 1.5).unwrap();
        assert_eq!(w.alpha, Some(1.625));
        assert!(w.g < 0.0 && w.g_upper < 0.0);
        assert!(g_eval(w.u, 7, 1.5, w.omega) < 0.0);
    }

    #[test]
    fn p_one_limit_in_d6_has_zero_margin() {
        let b = p_one_limit(6).unwrap();
        assert!(b.zero_margin);
        assert_eq!(b.case_value.as_deref(), Some("0"));
        // Q degenerates to a perfect square at p = 1 in every dimension.
        for d in 3..=8 {
            assert!(p_one_limit(d).unwrap().zero_margin, "d = {d}");
        }
    }
}
