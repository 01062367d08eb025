//! The Talenti bubble `W(r) = (1 + r²/(d(d-2)))^{-(d-2)/2}` and its scaling generator.

use crate::domain::params::check_dimension;
use crate::error::{Error, Result};

fn base(d: f64, r: f64) -> f64 {
    1.0 + r * r / (d * (d - 2.0))
}

fn check(d: u32, r: f64) -> Result<()> {
    check_dimension(d)?;
    if !(r >= 0.0) {
        return Err(Error::InvalidInput(format!("radius must be >= 0, got {r}")));
    }
    Ok(())
}

/// `W(r)`; the unique radial solution of `-ΔW = W^{(d+2)/(d-2)}` with `W(0) = 1`.
pub fn talenti(d: u32, r: f64) -> Result<f64> {
    check(d, r)?;
    Ok(talenti_unchecked(d as f64, r))
}

/// `ΛW(r) = (d-2)/2 W(r) + r W'(r)`.
pub fn lambda_w(d: u32, r: f64) -> Result<f64> {
    check(d, r)?;
    Ok(lambda_w_unchecked(d as f64, r))
}

pub(crate) fn talenti_unchecked(d: f64, r: f64) -> f64 {
    base(d, r).powf(-(d - 2.0) / 2.0)
}

/// `W'(r) = -(r/d) B^{-d/2}` with `B = 1 + r²/(d(d-2))`.
pub(crate) fn talenti_deriv(d: f64, r: f64) -> f64 {
    -(r / d) * base(d, r).powf(-d / 2.0)
}

pub(crate) fn talenti_second_deriv(d: f64, r: f64) -> f64 {
    let b = base(d, r);
    -b.powf(-d / 2.0) / d + r * r * b.powf(-d / 2.0 - 1.0) / (d * (d - 2.0))
}

pub(crate) fn lambda_w_unchecked(d: f64, r: f64) -> f64 {
    0.5 * (d - 2.0) * talenti_unchecked(d, r) + r * talenti_deriv(d, r)
}

/// `(ΛW)'(r) = d/2 W'(r) + r W''(r)`.
pub(crate) fn lambda_w_deriv(d: f64, r: f64) -> f64 {
    0.5 * d * talenti_deriv(d, r) + r * talenti_second_deriv(d, r)
}

/// The radius where `ΛW` changes sign, `r = sqrt(d(d-2))`.
pub fn lambda_w_zero(d: u32) -> Result<f64> {
    check_dimension(d)?;
    let d = d as f64;
    Ok((d * (d - 2.0)).sqrt())
}

/// Pointwise residual of `-W'' - (d-1)/r W' - W^{(d+2)/(d-2)}` at `r > 0`.
pub fn talenti_ode_residual(d: u32, r: f64) -> Result<f64> {
    check(d, r)?;
    let dd = d as f64;
    let q = (dd + 2.0) / (dd - 2.0);
    let lap = if r > 0.0 {
        talenti_second_deriv(dd, r) + (dd - 1.0) / r * talenti_deriv(dd, r)
    } else {
        dd * talenti_second_deriv(dd, 0.0)
    };
    Ok(-lap - talenti_unchecked(dd, r).powf(q))
}

/// Rescaled bubble `W_ε(r) = ε^{-(d-2)/4} W(r/√ε)`.
pub(crate) fn bubble(d: f64, eps: f64, r: f64) -> (f64, f64) {
    let s = eps.sqrt();
    let amp = eps.powf(-(d - 2.0) / 4.0);
    (amp * talenti_unchecked(d, r / s), amp / s * talenti_deriv(d, r / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(talenti(5, 0.0).unwrap(), 1.0);
        let v = talenti(5, 15f64.sqrt()).unwrap();
        assert!((v - 2f64.powf(-1.5)).abs() < 1e-15);
        let v = talenti(5, 1.0).unwrap();
        assert!((v - (16.0f64 / 15.0).powf(-1.5)).abs() < 1e-15);
        assert_eq!(talenti(2, 1.0), Err(Error::InvalidDimension(2)));
        assert!(talenti(5, -1.0).is_err());
    }

    #[test]
    fn lambda_w_at_origin_and_sign_change() {
        assert!((lambda_w(5, 0.0).unwrap() - 1.5).abs() < 1e-15);
        // Root scan of the closed form: exactly one sign change on (0, 1e4).
        for d in 3..=8 {
            let mut changes = 0;
            let mut prev = lambda_w(d, 1e-6).unwrap();
            let mut r = 1e-6;
            while r < 1e4 {
                r *= 1.001;
                let v = lambda_w(d, r).unwrap();
                if v.signum() != prev.signum() {
                    changes += 1;
                    let z = lambda_w_zero(d).unwrap();
                    assert!((r / z - 1.0).abs() < 2e-3);
                }
                prev = v;
            }
            assert_eq!(changes, 1, "d = {d}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for d in [3.0, 5.0, 7.0] {
            for &r in &[0.1, 1.0, 3.0, 20.0] {
                let h = 1e-5 * r;
                let fd = (talenti_unchecked(d, r + h) - talenti_unchecked(d, r - h)) / (2.0 * h);
                assert!((fd - talenti_deriv(d, r)).abs() < 1e-8);
                let fd2 = (talenti_deriv(d, r + h) - talenti_deriv(d, r - h)) / (2.0 * h);
                assert!((fd2 - talenti_second_deriv(d, r)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn lambda_w_is_scaling_derivative() {
        // d/dλ|_{λ=1} λ^{(d-2)/2} W(λ r)
        for d in 3..=7u32 {
            let dd = d as f64;
            for &r in &[0.0, 0.5, 2.0, 10.0] {
                let h = 1e-5;
                let s = |l: f64| l.powf((dd - 2.0) / 2.0) * talenti_unchecked(dd, l * r);
                let fd = (s(1.0 + h) - s(1.0 - h)) / (2.0 * h);
                assert!((fd - lambda_w(d, r).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ode_residual_is_roundoff() {
        for d in 3..=7 {
            let mut r = 1e-4;
            while r < 1e3 {
                assert!(talenti_ode_residual(d, r).unwrap().abs() < 1e-8);
                r *= 1.3;
            }
        }
    }
}
