use serde::{Deserialize, Serialize};

use crate::domain::grid::{simpson_weights, sphere_area, RadialGrid};
use crate::domain::talenti::{lambda_w_deriv, lambda_w_unchecked, talenti_deriv, talenti_unchecked};
use crate::error::{Error, Result};

/// Span of `ln r` covered by the mapped tail and core quadratures.
const MAPPED_SPAN: f64 = 50.0;
const MAPPED_INTERVALS: usize = 8000;

/// Radial functions with a known closed form, used as exact tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `W(r)`
    Talenti,
    /// `ΛW(r)`
    LambdaTalenti,
}

/// Model for `u(r)` beyond the last grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TailModel {
    /// `u(r) ≈ A r^{-s} e^{-k r}`.
    PowerExp { amplitude: f64, rate: f64, power: f64 },
    /// Exact closed form in dimension `dim`, multiplied by `scale`.
    Closed { form: ClosedForm, dim: u32, scale: f64 },
    /// Compact support: `u ≡ 0` beyond the grid.
    Zero,
}

impl TailModel {
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match *self {
            TailModel::PowerExp { amplitude, rate, power } => {
                if amplitude == 0.0 {
                    return (0.0, 0.0);
                }
                let u = amplitude * (-power * r.ln() - rate * r).exp();
                (u, -(rate + power / r) * u)
            }
            TailModel::Closed { form, dim, scale } => {
                let d = dim as f64;
                match form {
                    ClosedForm::Talenti => (scale * talenti_unchecked(d, r), scale * talenti_deriv(d, r)),
                    ClosedForm::LambdaTalenti => {
                        (scale * lambda_w_unchecked(d, r), scale * lambda_w_deriv(d, r))
                    }
                }
            }
            TailModel::Zero => (0.0, 0.0),
        }
    }

    /// Algebraic decay power `s` when the tail decays like `r^{-s}` only.
    pub fn algebraic_power(&self) -> Option<f64> {
        match *self {
            TailModel::PowerExp { rate, power, amplitude } if rate == 0.0 && amplitude != 0.0 => Some(power),
            TailModel::Closed { dim, .. } => Some(dim as f64 - 2.0),
            _ => None,
        }
    }

    /// `(A, k, s)` of the leading asymptotics `A r^{-s} e^{-k r}`.
    pub fn asymptotics(&self) -> (f64, f64, f64) {
        match *self {
            TailModel::PowerExp { amplitude, rate, power } => (amplitude, rate, power),
            TailModel::Closed { form, dim, scale } => {
                let d = dim as f64;
                let c = (d * (d - 2.0)).powf((d - 2.0) / 2.0);
                let a = match form {
                    ClosedForm::Talenti => c,
                    ClosedForm::LambdaTalenti => -0.5 * (d - 2.0) * c,
                };
                (scale * a, 0.0, d - 2.0)
            }
            TailModel::Zero => (0.0, 0.0, 0.0),
        }
    }

    /// `r ↦ a·T(λ r)`; closed forms only admit `λ = 1`.
    fn dilated(&self, amp: f64, lambda: f64) -> Result<TailModel> {
        match *self {
            TailModel::PowerExp { amplitude, rate, power } => Ok(TailModel::PowerExp {
                amplitude: amp * amplitude * lambda.powf(-power),
                rate: rate * lambda,
                power,
            }),
            TailModel::Closed { .. } if lambda == 1.0 => Ok(self.scaled(amp)),
            TailModel::Closed { .. } => {
                Err(Error::InvalidInput("closed-form tails cannot be dilated".into()))
            }
            TailModel::Zero => Ok(TailModel::Zero),
        }
    }

    fn scaled(&self, factor: f64) -> TailModel {
        match self.clone() {
            TailModel::PowerExp { amplitude, rate, power } => {
                TailModel::PowerExp { amplitude: amplitude * factor, rate, power }
            }
            TailModel::Closed { form, dim, scale } => TailModel::Closed { form, dim, scale: scale * factor },
            TailModel::Zero => TailModel::Zero,
        }
    }
}

/// Model for `u(r)` between the origin and the first grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoreModel {
    /// Even quadratic `a + b r²` matching value and slope at the first node.
    Flat,
    /// Kelvin image `r^{-(d-2)} T(1/r)` of a tail model `T`.
    KelvinImage { tail: TailModel },
}

/// A radial function sampled on a stretched grid, with closed-form models
/// inside the first node and beyond the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    derivs: Vec<f64>,
    tail: TailModel,
    core: CoreModel,
}

impl RadialProfile {
    pub fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        derivs: Vec<f64>,
        tail: TailModel,
        core: CoreModel,
    ) -> Result<Self> {
        if values.len() != grid.len() || derivs.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "profile has {} values and {} derivatives for {} nodes",
                values.len(),
                derivs.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().chain(&derivs).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite profile entry at index {i}")));
        }
        Ok(RadialProfile { grid, values, derivs, tail, core })
    }

    /// Sample `f(r) = (u, u')` on the grid.
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: RadialGrid, f: F, tail: TailModel) -> Result<Self> {
        let (values, derivs) = grid.nodes().iter().map(|&r| f(r)).unzip();
        Self::new(grid, values, derivs, tail, CoreModel::Flat)
    }

    /// `W` sampled on `grid`, with the exact closed form as tail.
    pub fn talenti(grid: RadialGrid) -> Result<Self> {
        let d = grid.dim() as f64;
        let tail = TailModel::Closed { form: ClosedForm::Talenti, dim: grid.dim(), scale: 1.0 };
        Self::from_fn(grid, |r| (talenti_unchecked(d, r), talenti_deriv(d, r)), tail)
    }

    /// `ΛW` sampled on `grid`, with the exact closed form as tail.
    pub fn lambda_talenti(grid: RadialGrid) -> Result<Self> {
        let d = grid.dim() as f64;
        let tail = TailModel::Closed { form: ClosedForm::LambdaTalenti, dim: grid.dim(), scale: 1.0 };
        Self::from_fn(grid, |r| (lambda_w_unchecked(d, r), lambda_w_deriv(d, r)), tail)
    }

    /// The zero function on `grid`.
    pub fn zero(grid: RadialGrid) -> Self {
        let n = grid.len();
        RadialProfile {
            grid,
            values: vec![0.0; n],
            derivs: vec![0.0; n],
            tail: TailModel::Zero,
            core: CoreModel::Flat,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> u32 {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    pub fn core(&self) -> &CoreModel {
        &self.core
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0) && self.tail.asymptotics().0 == 0.0
    }

    /// Strictly positive and strictly decreasing on the grid.
    pub fn is_positive_decreasing(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0) && self.values.windows(2).all(|w| w[1] < w[0])
    }

    /// `λ u`.
    pub fn scaled(&self, factor: f64) -> Self {
        let core = match &self.core {
            CoreModel::Flat => CoreModel::Flat,
            CoreModel::KelvinImage { tail } => CoreModel::KelvinImage { tail: tail.scaled(factor) },
        };
        RadialProfile {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            derivs: self.derivs.iter().map(|v| v * factor).collect(),
            tail: self.tail.scaled(factor),
            core,
        }
    }

    /// `r ↦ a·u(λ r)` on the grid `r_i / λ`.
    pub fn dilated(&self, amp: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite() && amp.is_finite()) {
            return Err(Error::InvalidInput(format!("bad dilation a = {amp}, λ = {lambda}")));
        }
        let d = self.dim() as f64;
        let core = match &self.core {
            CoreModel::Flat => CoreModel::Flat,
            // a (λr)^{-(d-2)} T(1/(λr)) is the Kelvin image of a λ^{-(d-2)} T(ρ/λ).
            CoreModel::KelvinImage { tail } => CoreModel::KelvinImage {
                tail: tail.dilated(amp * lambda.powf(-(d - 2.0)), 1.0 / lambda)?,
            },
        };
        Ok(RadialProfile {
            grid: self.grid.scaled(1.0 / lambda),
            values: self.values.iter().map(|v| amp * v).collect(),
            derivs: self.derivs.iter().map(|v| amp * lambda * v).collect(),
            tail: self.tail.dilated(amp, lambda)?,
            core,
        })
    }

    /// `(u(r), u'(r))` at any `r >= 0`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let nodes = self.grid.nodes();
        if r < nodes[0] {
            return self.eval_core(r);
        }
        if r > self.grid.last() {
            return self.tail.eval(r);
        }
        let i = self.grid.interval_of(r);
        let (r0, r1) = (nodes[i], nodes[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        // Cubic Hermite basis.
        let t2 = t * t;
        let t3 = t2 * t;
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let du = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (u, du)
    }

    fn eval_core(&self, r: f64) -> (f64, f64) {
        match &self.core {
            CoreModel::Flat => {
                let r0 = self.grid.first();
                let b = self.derivs[0] / (2.0 * r0);
                let a = self.values[0] - b * r0 * r0;
                (a + b * r * r, 2.0 * b * r)
            }
            CoreModel::KelvinImage { tail } => kelvin_of_tail(tail, self.dim(), r),
        }
    }

    /// `u(0)` as given by the core model.
    pub fn value_at_origin(&self) -> f64 {
        match &self.core {
            CoreModel::Flat => self.eval_core(0.0).0,
            CoreModel::KelvinImage { tail } => {
                let (a, k, s) = tail.asymptotics();
                let d = self.dim() as f64;
                if k == 0.0 && s == d - 2.0 {
                    a
                } else {
                    self.eval_core(self.grid.first() * 1e-12).0
                }
            }
        }
    }

    /// `∫_{R^d} f(r, u(r), u'(r)) dx` over grid, core and tail.
    pub fn integrate<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> f64 {
        let grid_part: f64 = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(self.values.iter().zip(&self.derivs))
            .map(|((&r, &w), (&u, &du))| w * f(r, u, du))
            .sum();
        grid_part + self.core_integral(&f) + self.tail_integral(&f)
    }

    /// Integral over `|x| > r_N` from the tail model.
    pub fn tail_integral<F: Fn(f64, f64, f64) -> f64>(&self, f: &F) -> f64 {
        if matches!(self.tail, TailModel::Zero) {
            return 0.0;
        }
        let r_end = self.grid.last();
        mapped_integral(self.dim(), r_end, 1.0, |r| {
            let (u, du) = self.tail.eval(r);
            f(r, u, du)
        })
    }

    /// Integral over `|x| < r_0` from the core model.
    pub fn core_integral<F: Fn(f64, f64, f64) -> f64>(&self, f: &F) -> f64 {
        let r0 = self.grid.first();
        match &self.core {
            CoreModel::Flat => {
                let n = 64;
                let h = r0 / n as f64;
                let area = sphere_area(self.dim());
                let d = self.dim() as i32;
                simpson_weights(n, h)
                    .into_iter()
                    .enumerate()
                    .map(|(i, w)| {
                        let r = i as f64 * h;
                        let (u, du) = self.eval_core(r);
                        w * area * r.powi(d - 1) * f(r, u, du)
                    })
                    .sum()
            }
            CoreModel::KelvinImage { .. } => mapped_integral(self.dim(), r0, -1.0, |r| {
                let (u, du) = self.eval_core(r);
                f(r, u, du)
            }),
        }
    }

    /// Fails when `∫ |u|^m` diverges because of an algebraic tail.
    pub fn check_power_integrable(&self, m: f64, what: &str) -> Result<()> {
        if let Some(s) = self.tail.algebraic_power() {
            let d = self.dim() as f64;
            if m * s <= d {
                return Err(Error::DivergentNorm(format!(
                    "{what}: integrand decays like r^-{:.6} in dimension {} (need exponent > d)",
                    m * s,
                    self.dim()
                )));
            }
        }
        Ok(())
    }

    /// Fails when `∫ |u'|²` diverges because of an algebraic tail.
    pub fn check_gradient_integrable(&self) -> Result<()> {
        if let Some(s) = self.tail.algebraic_power() {
            let d = self.dim() as f64;
            if 2.0 * (s + 1.0) <= d {
                return Err(Error::DivergentNorm(format!(
                    "gradient: |u'|^2 decays like r^-{:.6} in dimension {}",
                    2.0 * (s + 1.0),
                    self.dim()
                )));
            }
        }
        Ok(())
    }

    /// `‖∇u‖²`.
    pub fn grad_sq(&self) -> Result<f64> {
        self.check_gradient_integrable()?;
        Ok(self.integrate(|_, _, du| du * du))
    }

    /// `∫ |u|^m dx`.
    pub fn power_integral(&self, m: f64) -> Result<f64> {
        self.check_power_integrable(m, &format!("L^{m} norm"))?;
        Ok(self.integrate(|_, u, _| u.abs().powf(m)))
    }
}

/// Kelvin image `r^{-(d-2)} T(1/r)` of a tail model, with derivative.
pub(crate) fn kelvin_of_tail(tail: &TailModel, dim: u32, r: f64) -> (f64, f64) {
    let d = dim as f64;
    let rho = 1.0 / r;
    let (t, dt) = tail.eval(rho);
    let pw = r.powf(-(d - 2.0));
    (pw * t, -(d - 2.0) * pw / r * t - pw * rho * rho * dt)
}

/// `∫ g(r) |S^{d-1}| r^{d-1} dr` over `[r_start, ∞)` (`direction = 1`) or
/// `(0, r_start]` (`direction = -1`), in the variable `t = ±ln(r/r_start)`.
/// Any algebraic remainder past the mapped span is added in closed form.
pub(crate) fn mapped_integral<G: Fn(f64) -> f64>(dim: u32, r_start: f64, direction: f64, g: G) -> f64 {
    let n = MAPPED_INTERVALS;
    let h = MAPPED_SPAN / n as f64;
    let area = sphere_area(dim);
    let d = dim as i32;
    let integrand = |t: f64| {
        let r = r_start * (direction * t).exp();
        let v = g(r) * area * r.powi(d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let weights = simpson_weights(n, h);
    let mut total = 0.0;
    for (i, w) in weights.iter().enumerate() {
        total += w * integrand(i as f64 * h);
    }
    // Power-law remainder: G(t) ≈ G(T) e^{-β (t - T)}.
    let g_end = integrand(MAPPED_SPAN);
    let g_prev = integrand(MAPPED_SPAN - 1.0);
    if g_end != 0.0 && g_prev != 0.0 && g_end.signum() == g_prev.signum() {
        let beta = (g_prev / g_end).ln();
        if beta > 1e-3 {
            total += g_end / beta;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::talenti::talenti_unchecked;

    #[test]
    fn hermite_interpolation_is_accurate() {
        let grid = RadialGrid::geometric(5, 1e-3, 40.0, 4000).unwrap();
        let prof = RadialProfile::talenti(grid).unwrap();
        for &r in &[1.234e-3, 0.77, 3.3, 17.0, 39.9] {
            let (u, _) = prof.eval(r);
            assert!((u - talenti_unchecked(5.0, r)).abs() < 1e-12);
        }
        // Core and tail pieces.
        assert!((prof.eval(1e-5).0 - 1.0).abs() < 1e-9);
        assert!((prof.eval(100.0).0 - talenti_unchecked(5.0, 100.0)).abs() < 1e-15);
    }

    #[test]
    fn tail_integral_of_power_law() {
        // ∫_{|x|>R} r^{-6} dx in d = 5 equals |S^4| / R.
        let grid = RadialGrid::geometric(5, 0.5, 2.0, 10).unwrap();
        let tail = TailModel::PowerExp { amplitude: 1.0, rate: 0.0, power: 3.0 };
        let prof = RadialProfile::from_fn(grid, |_| (0.0, 0.0), tail).unwrap();
        let t = prof.tail_integral(&|_, u, _| u * u);
        let exact = sphere_area(5) / 2.0;
        assert!((t / exact - 1.0).abs() < 1e-10, "{t} vs {exact}");
    }

    #[test]
    fn divergent_norms_are_rejected() {
        let grid = RadialGrid::geometric(4, 1e-3, 10.0, 100).unwrap();
        let w = RadialProfile::talenti(grid).unwrap();
        assert!(matches!(w.power_integral(2.0), Err(Error::DivergentNorm(_))));
        assert!(w.power_integral(4.0).is_ok());
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let grid = RadialGrid::geometric(5, 1e-3, 10.0, 10).unwrap();
        let r = RadialProfile::new(grid, vec![1.0; 3], vec![0.0; 3], TailModel::Zero, CoreModel::Flat);
        assert!(r.is_err());
    }
}
