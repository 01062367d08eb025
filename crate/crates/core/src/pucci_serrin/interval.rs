//! Outward-rounded interval arithmetic, enough to enclose `g` on a cell.
//!
//! Every operation widens its float result by one ulp in each direction, and
//! `powf` by two, which covers the error of a faithfully rounded `pow`.

use super::exact::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn widen(lo: f64, hi: f64, ulps: u32) -> Interval {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..ulps {
        lo = lo.next_down();
        hi = hi.next_up();
    }
    Interval { lo, hi }
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn from_rational(x: &Rational) -> Self {
        let v = to_f64(x);
        widen(v, v, 1)
    }

    pub fn add(self, o: Self) -> Self {
        widen(self.lo + o.lo, self.hi + o.hi, 1)
    }

    pub fn sub(self, o: Self) -> Self {
        widen(self.lo - o.hi, self.hi - o.lo, 1)
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi, 1)
    }

    /// Requires `0 ∉ o`.
    pub fn div(self, o: Self) -> Self {
        assert!(o.lo > 0.0 || o.hi < 0.0, "interval division by an interval containing zero");
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi, 1)
    }

    /// `x^e` for `x ≥ 0`, `e > 0`; the corners bound the range because the
    /// map is monotone in each argument on that quadrant.
    pub fn powf(self, e: Self) -> Self {
        assert!(self.lo >= 0.0 && e.lo > 0.0);
        let c = [self.lo.powf(e.lo), self.lo.powf(e.hi), self.hi.powf(e.lo), self.hi.powf(e.hi)];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi, 2)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}
