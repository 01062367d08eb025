//! Large-ω sweeps, the limiting ratio `β/α`, decay diagnostics and the
//! energy expansion of cut-off bubbles.

mod apxa;
mod decay;
mod sweep;

pub use apxa::{apxa_expansion, cutoff, ApxAReport, RateFit, FIT_REGIME};
pub use decay::{decay_sup, exp_decay_check, pointwise_decay_sup, ExpDecayCheck};
pub use sweep::{extrapolate_ratio, limit_constant, sweep, SweepOptions, SweepRow};

/// Least-squares slope and intercept of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|t| 3.0 - 0.5 * t).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (c - 3.0).abs() < 1e-14);
    }
}
