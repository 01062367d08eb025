//! Exact rational arithmetic for the coefficients of `g`, the quadratic form
//! `Q(r)` and the per-dimension polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Recover a small-denominator rational (denominator at most 10⁶) that rounds
/// to `x`, by continued fractions. `None` if there is none.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..48 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let (h, k) = (ai * h1 + h0, ai * k1 + k0);
        if k > 1_000_000 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        if h as f64 / k as f64 == x {
            return Some(Rational::new(BigInt::from(h), BigInt::from(k)));
        }
        let frac = y - a;
        if frac <= 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

pub fn critical_power_exact(d: u32) -> Rational {
    rat(d as i64 + 2, d as i64 - 2)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `n/d`, or `n` for integers.
pub fn fmt(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// The five coefficients in `g(u) = A₂ω²u² + A_{p+1}ωu^{p+1} + A_{q+1}ωu^{q+1} + A_{2p}u^{2p} + A_{p+q}u^{p+q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCoefficients {
    pub p: Rational,
    pub q: Rational,
    pub a2: Rational,
    pub a_p1: Rational,
    pub a_q1: Rational,
    pub a_2p: Rational,
    pub a_pq: Rational,
}

pub fn exact_coefficients(d: u32, p: &Rational) -> ExactCoefficients {
    let q = critical_power_exact(d);
    let one = Rational::one();
    let two = rat(2, 1);
    let p1 = p + &one;
    let a2 = (&q - &one) / &two;
    let a_p1 = ((p * p - rat(3, 1) * p - &two) * &q + p * p + p + &two) / (&two * &p1);
    let a_q1 = (&q - &one) * (&q - &two) / &two;
    let a_2p = (&q - p) / &p1;
    let a_pq = (&q - p) * (&p1 - &q) / &p1;
    ExactCoefficients { p: p.clone(), q, a2, a_p1, a_q1, a_2p, a_pq }
}

/// One monomial `c · ω^k · u^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub u_exp: Rational,
    pub omega_exp: u32,
    pub coeff: Rational,
}

type Poly = BTreeMap<(Rational, u32), Rational>;

fn poly(terms: &[(Rational, u32, Rational)]) -> Poly {
    let mut out = Poly::new();
    for (e, k, c) in terms {
        *out.entry((e.clone(), *k)).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn mul(a: &Poly, b: &Poly, scale: &Rational) -> Poly {
    let mut out = Poly::new();
    for ((ea, ka), ca) in a {
        for ((eb, kb), cb) in b {
            *out.entry((ea + eb, ka + kb)).or_insert_with(Rational::zero) += ca * cb * scale;
        }
    }
    out
}

fn add(mut a: Poly, b: Poly) -> Poly {
    for (k, c) in b {
        *a.entry(k).or_insert_with(Rational::zero) += c;
    }
    a.retain(|_, c| !c.is_zero());
    a
}

fn to_terms(p: Poly) -> Vec<Term> {
    p.into_iter().map(|((u_exp, omega_exp), coeff)| Term { u_exp, omega_exp, coeff }).collect()
}

/// Symbolic expansion of `q f² − (q+1) F f′` with `f = −ωu + u^p + u^q`,
/// collected by monomial.
pub fn symbolic_g(d: u32, p: &Rational) -> Vec<Term> {
    let q = critical_power_exact(d);
    let one = Rational::one();
    let f = poly(&[(one.clone(), 1, -one.clone()), (p.clone(), 0, one.clone()), (q.clone(), 0, one.clone())]);
    let big_f = poly(&[
        (rat(2, 1), 1, rat(-1, 2)),
        (p + &one, 0, one.clone() / (p + &one)),
        (&q + &one, 0, one.clone() / (&q + &one)),
    ]);
    let df = poly(&[(Rational::zero(), 1, -one.clone()), (p - &one, 0, p.clone()), (&q - &one, 0, q.clone())]);
    let g = add(mul(&f, &f, &q), mul(&big_f, &df, &-(&q + &one)));
    to_terms(g)
}

/// The closed-form five-term expansion, collected the same way.
pub fn a_expansion(c: &ExactCoefficients) -> Vec<Term> {
    let one = Rational::one();
    let two = rat(2, 1);
    to_terms(poly(&[
        (two.clone(), 2, c.a2.clone()),
        (&c.p + &one, 1, c.a_p1.clone()),
        (&c.q + &one, 1, c.a_q1.clone()),
        (&two * &c.p, 0, c.a_2p.clone()),
        (&c.p + &c.q, 0, c.a_pq.clone()),
    ]))
}

fn lcm_denominators(p: &Rational, q: &Rational) -> BigInt {
    p.denom().lcm(q.denom())
}

/// `s^(e·L)` for an exponent `e` with `e·L` integral.
fn pow_scaled(s: &Rational, e: &Rational, l: &BigInt) -> Option<Rational> {
    let n = e * Rational::from_integer(l.clone());
    if !n.is_integer() {
        return None;
    }
    let n = n.to_integer().to_i32()?;
    Some(s.pow(n))
}

/// Exact `(u, g_direct(u), g_expansion(u))` at `u = s^L`, where `L` clears the
/// denominators of `p` and `q`, so every power of `u` is rational.
pub fn exact_point(d: u32, p: &Rational, s: &Rational, omega: &Rational) -> Option<(Rational, Rational, Rational)> {
    let q = critical_power_exact(d);
    let l = lcm_denominators(p, &q);
    let one = Rational::one();
    let pw = |e: &Rational| pow_scaled(s, e, &l);
    let u = pw(&one)?;
    let (up, uq) = (pw(p)?, pw(&q)?);
    let f = -(omega * &u) + &up + &uq;
    let big_f = -(omega * &u * &u) / rat(2, 1) + &up * &u / (p + &one) + &uq * &u / (&q + &one);
    let df = -omega.clone() + p * pw(&(p - &one))? + &q * pw(&(&q - &one))?;
    let direct = &q * &f * &f - (&q + &one) * &big_f * &df;
    let c = exact_coefficients(d, p);
    let mut expanded = Rational::zero();
    for t in a_expansion(&c) {
        expanded += &t.coeff * omega.pow(t.omega_exp as i32) * pw(&t.u_exp)?;
    }
    Some((u, direct, expanded))
}

/// `min_{r ≥ 0} Q(r)` for `Q(r) = A₂ + A_{p+1} r + A_{2p} r²`.
#[derive(Debug, Clone, PartialEq)]
pub enum QMinimum {
    /// `A_{p+1} ≥ 0`: the minimum is `A₂`, attained at `r = 0`.
    AtOrigin(Rational),
    /// `A_{p+1} < 0`, `A_{2p} > 0`: the vertex value `A₂ − A_{p+1}²/(4A_{2p})`.
    Vertex { value: Rational, at: Rational },
    /// `A_{2p} ≤ 0` with a negative slope: unbounded below.
    Unbounded,
}

impl QMinimum {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            QMinimum::AtOrigin(v) | QMinimum::Vertex { value: v, .. } => Some(v),
            QMinimum::Unbounded => None,
        }
    }

    pub fn nonnegative(&self) -> bool {
        self.value().is_some_and(|v| !v.is_negative())
    }
}

pub fn q_minimum(c: &ExactCoefficients) -> QMinimum {
    if !c.a_p1.is_negative() {
        if c.a_2p.is_negative() {
            return QMinimum::Unbounded;
        }
        return QMinimum::AtOrigin(c.a2.clone());
    }
    if !c.a_2p.is_positive() {
        return QMinimum::Unbounded;
    }
    let four = rat(4, 1);
    let value = &c.a2 - &c.a_p1 * &c.a_p1 / (&four * &c.a_2p);
    let at = -&c.a_p1 / (rat(2, 1) * &c.a_2p);
    QMinimum::Vertex { value, at }
}

/// Sign-deciding polynomial of the low-dimensional case analyses, as a
/// `(formula, value)` pair.
pub fn case_polynomial(d: u32, p: &Rational) -> Option<(&'static str, Rational)> {
    let one = Rational::one();
    let i = |n: i64| rat(n, 1);
    let p2 = p * p;
    match d {
        3 => Some(("6p^2 - 14p - 8", i(6) * &p2 - i(14) * p - i(8))),
        4 => Some((
            "-p^4 + 4p^3 - 3p^2 - 2p + 2",
            -(&p2 * &p2) + i(4) * &p2 * p - i(3) * &p2 - i(2) * p + i(2),
        )),
        5 => {
            let pm = p - &one;
            Some(("(p-1)^2 (-25p^2 + 40p + 40)", &pm * &pm * (i(-25) * &p2 + i(40) * p + i(40))))
        }
        6 => {
            let t = i(3) * p + &one;
            Some(("8(p+1) - (2-p)(3p+1)^2", i(8) * (p + &one) - (i(2) - p) * &t * &t))
        }
        _ => None,
    }
}

/// `5p² − 9p − 4`, whose sign decides the `d = 5` branch.
pub fn d5_linear_coefficient(p: &Rational) -> Rational {
    rat(5, 1) * p * p - rat(9, 1) * p - rat(4, 1)
}

/// `9 − √161 < 10p < 9 + √161`, decided without square roots.
pub fn d5_between_roots(p: &Rational) -> bool {
    let t = rat(10, 1) * p - rat(9, 1);
    &t * &t < rat(161, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn continued_fractions_recover_small_rationals() {
        assert_eq!(rational_from_f64(4.0 / 3.0), Some(q(4, 3)));
        assert_eq!(rational_from_f64(1.5), Some(q(3, 2)));
        assert_eq!(rational_from_f64(7.0 / 3.0), Some(q(7, 3)));
        assert_eq!(rational_from_f64(2.0), Some(q(2, 1)));
        assert_eq!(rational_from_f64(std::f64::consts::PI), None);
    }

    #[test]
    fn worked_coefficients() {
        let c = exact_coefficients(3, &q(4, 1));
        assert_eq!(rat(2, 1) * (&c.p + rat(1, 1)) * &c.a_p1, q(32, 1));
        let c = exact_coefficients(5, &q(2, 1));
        assert_eq!(c.a_q1, q(2, 9));
        let c = exact_coefficients(6, &q(2, 1));
        assert!(c.a_pq.is_zero());
        assert!(c.a_2p.is_zero());
    }

    #[test]
    fn expansion_is_an_identity() {
        for d in 3..=9 {
            for p in [q(11, 10), q(4, 3), q(3, 2), q(2, 1), q(5, 2), q(4, 1), q(9, 2), q(7, 4)] {
                let c = exact_coefficients(d, &p);
                assert_eq!(symbolic_g(d, &p), a_expansion(&c), "d = {d}, p = {p}");
            }
        }
    }

    #[test]
    fn exact_points_agree() {
        for (d, p) in [(5, q(4, 3)), (5, q(2, 1)), (7, q(3, 2)), (3, q(9, 2))] {
            for s in [q(1, 3), q(1, 1), q(5, 4), q(3, 1)] {
                for w in [q(0, 1), q(1, 1), q(100, 1)] {
                    let (_, a, b) = exact_point(d, &p, &s, &w).unwrap();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn d4_minimum_at_p2() {
        let c = exact_coefficients(4, &q(2, 1));
        match q_minimum(&c) {
            QMinimum::Vertex { value, .. } => assert_eq!(value, q(2, 3)),
            other => panic!("{other:?}"),
        }
        assert_eq!(case_polynomial(4, &q(2, 1)).unwrap().1, q(2, 1));
    }

    #[test]
    fn case_polynomials_decide_the_sign_of_q() {
        // Each polynomial is a positive multiple of the relevant quantity.
        for k in 1..200 {
            let p = q(100 + k, 100);
            for d in 3..=6u32 {
                let qd = critical_power_exact(d);
                if p >= qd {
                    continue;
                }
                let c = exact_coefficients(d, &p);
                let (_, h) = case_polynomial(d, &p).unwrap();
                let one = rat(1, 1);
                let expected = match d {
                    3 => rat(2, 1) * (&p + &one) * &c.a_p1,
                    4 => {
                        let v = &c.a2 - &c.a_p1 * &c.a_p1 / (rat(4, 1) * &c.a_2p);
                        v * (&p + &one) * (rat(3, 1) - &p)
                    }
                    5 => {
                        let v = &c.a2 - &c.a_p1 * &c.a_p1 / (rat(4, 1) * &c.a_2p);
                        v * rat(12, 1) * (&p + &one) * (rat(7, 1) - rat(3, 1) * &p)
                    }
                    _ => {
                        let v = &c.a2 - &c.a_p1 * &c.a_p1 / (rat(4, 1) * &c.a_2p);
                        v * rat(16, 1) * (&p + &one)
                    }
                };
                assert_eq!(h, expected, "d = {d}, p = {p}");
            }
        }
    }

    #[test]
    fn d5_root_window() {
        // 5p² − 9p − 4 < 0 exactly on the open root window.
        for k in -300..=300 {
            let p = q(k, 100);
            assert_eq!(d5_linear_coefficient(&p).is_negative(), d5_between_roots(&p), "p = {p}");
        }
        for root in [(9.0 - 161f64.sqrt()) / 10.0, (9.0 + 161f64.sqrt()) / 10.0] {
            let a = (root * 1e6).floor() as i64;
            let (below, above) = (q(a, 1_000_000), q(a + 1, 1_000_000));
            assert_ne!(d5_between_roots(&below), d5_between_roots(&above));
        }
    }

    #[test]
    fn d6_h_is_monotone_from_zero() {
        assert!(case_polynomial(6, &q(1, 1)).unwrap().1.is_zero());
        let mut prev = Rational::zero();
        for k in 0..1000 {
            let p = q(1000 + k, 1000);
            let hp = rat(27, 1) * &p * &p - rat(24, 1) * &p - rat(3, 1);
            assert!(!hp.is_negative());
            let h = case_polynomial(6, &p).unwrap().1;
            assert!(h >= prev);
            prev = h;
        }
    }
}
