//! Dormand–Prince 5(4) embedded Runge–Kutta pair for two-component systems.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Relative/absolute tolerances of the step-size controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-12 }
    }
}

/// One accepted step `(r, y) -> (r + h, y_new)`.
pub struct Stepper<F> {
    rhs: F,
    control: StepControl,
    h: f64,
    k_first: Option<State>,
}

impl<F: Fn(f64, &State) -> State> Stepper<F> {
    pub fn new(rhs: F, control: StepControl, h0: f64) -> Self {
        Stepper { rhs, control, h: h0, k_first: None }
    }

    /// Advance from `r` towards at most `r_max`; returns the new radius and state.
    pub fn step(&mut self, r: f64, y: &State, r_max: f64) -> Result<(f64, State)> {
        let mut k = [[0.0; 2]; 7];
        k[0] = match self.k_first.take() {
            Some(k0) => k0,
            None => (self.rhs)(r, y),
        };
        loop {
            let clamp = self.h >= r_max - r;
            let h = if clamp { r_max - r } else { self.h };
            if !(h > 1e-14 * r.abs().max(1e-300)) {
                return Err(Error::Stiffness { r, h });
            }
            for s in 1..7 {
                let mut ys = *y;
                for j in 0..s {
                    ys[0] += h * A[s][j] * k[j][0];
                    ys[1] += h * A[s][j] * k[j][1];
                }
                k[s] = (self.rhs)(r + C[s] * h, &ys);
            }
            let mut y_new = *y;
            for j in 0..6 {
                y_new[0] += h * A[6][j] * k[j][0];
                y_new[1] += h * A[6][j] * k[j][1];
            }
            let mut err = 0.0;
            for c in 0..2 {
                let e: f64 = (0..7).map(|j| E[j] * k[j][c]).sum::<f64>() * h;
                let sc = self.control.atol + self.control.rtol * y[c].abs().max(y_new[c].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / 2.0).sqrt();
            if err.is_finite() && err <= 1.0 {
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !clamp || fac < 1.0 {
                    self.h = h * fac;
                }
                // FSAL: the last stage is the derivative at the new point.
                self.k_first = Some(k[6]);
                let r_new = if clamp { r_max } else { r + h };
                return Ok((r_new, y_new));
            }
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            self.h = h * fac;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_fifth_order() {
        let rhs = |_: f64, y: &State| [y[1], -y[0]];
        let mut st = Stepper::new(rhs, StepControl { rtol: 1e-12, atol: 1e-14 }, 1e-3);
        let (mut r, mut y) = (0.0, [1.0, 0.0]);
        while r < 10.0 {
            let (rn, yn) = st.step(r, &y, 10.0).unwrap();
            r = rn;
            y = yn;
        }
        assert_eq!(r, 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((y[1] + 10f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn bessel_type_singular_coefficient() {
        // u'' + (d-1)/r u' = u has the regular solution with u(0)=1,
        // u = Γ(d/2) (r/2)^{1-d/2} I_{d/2-1}(r); for d = 3 that is sinh(r)/r.
        let rhs = |r: f64, y: &State| [y[1], -2.0 / r * y[1] + y[0]];
        let r0: f64 = 1e-6;
        let mut y = [1.0 + r0 * r0 / 6.0, r0 / 3.0];
        let mut st = Stepper::new(rhs, StepControl::default(), r0);
        let mut r = r0;
        while r < 5.0 {
            let (rn, yn) = st.step(r, &y, 5.0).unwrap();
            r = rn;
            y = yn;
        }
        let exact = 5f64.sinh() / 5.0;
        assert!((y[0] / exact - 1.0).abs() < 1e-9);
    }
}
