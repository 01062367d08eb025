use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Area of the unit sphere `S^{d-1}` in `R^d`.
pub fn sphere_area(d: u32) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

/// Composite Simpson weights for `n_intervals` (even) equal intervals of width `h`.
pub(crate) fn simpson_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    debug_assert!(n_intervals >= 2 && n_intervals % 2 == 0);
    (0..=n_intervals)
        .map(|i| {
            let c = if i == 0 || i == n_intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Geometrically stretched radial grid `r_i = r_0 ρ^i`.
///
/// Weights are composite Simpson in `t = ln r` with the surface measure
/// `|S^{d-1}| r^{d-1} dr = |S^{d-1}| r^d dt` folded in, so `Σ w_i f(r_i)`
/// approximates `∫_{r_0 ≤ |x| ≤ r_N} f(|x|) dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    dim: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_step: f64,
}

impl RadialGrid {
    /// `intervals` is rounded up to the next even number.
    pub fn geometric(dim: u32, r_first: f64, r_last: f64, intervals: usize) -> Result<Self> {
        if !(r_first > 0.0 && r_last > r_first && r_last.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grid needs 0 < r_first < r_last, got [{r_first:e}, {r_last:e}]"
            )));
        }
        let n = intervals.max(2).div_ceil(2) * 2;
        let t0 = r_first.ln();
        let h = (r_last.ln() - t0) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| (t0 + h * i as f64).exp()).collect();
        nodes[0] = r_first;
        nodes[n] = r_last;
        Ok(Self::from_log_nodes(dim, nodes, h))
    }

    /// Grid with a prescribed log-spacing, covering at least `[r_first, r_last]`.
    pub fn with_log_step(dim: u32, r_first: f64, r_last: f64, log_step: f64) -> Result<Self> {
        let span = (r_last / r_first).ln();
        let intervals = (span / log_step).ceil().max(2.0) as usize;
        Self::geometric(dim, r_first, r_last, intervals)
    }

    fn from_log_nodes(dim: u32, nodes: Vec<f64>, h: f64) -> Self {
        let area = sphere_area(dim);
        let d = dim as i32;
        let weights = simpson_weights(nodes.len() - 1, h)
            .into_iter()
            .zip(&nodes)
            .map(|(w, &r)| w * area * r.powi(d))
            .collect();
        RadialGrid { dim, nodes, weights, log_step: h }
    }

    /// Keep nodes `0..=last` (the interval count must stay even).
    pub(crate) fn truncated(&self, last: usize) -> Self {
        debug_assert!(last % 2 == 0 && last >= 2);
        Self::from_log_nodes(self.dim, self.nodes[..=last].to_vec(), self.log_step)
    }

    /// The inversion image `r ↦ 1/r`, again a geometric grid (ascending).
    pub fn inverted(&self) -> Self {
        let nodes: Vec<f64> = self.nodes.iter().rev().map(|r| 1.0 / r).collect();
        Self::from_log_nodes(self.dim, nodes, self.log_step)
    }

    /// Same nodes, different ambient dimension.
    pub fn with_dim(&self, dim: u32) -> Self {
        Self::from_log_nodes(dim, self.nodes.clone(), self.log_step)
    }

    /// Nodes scaled by `factor` (`r_i ↦ factor·r_i`).
    pub fn scaled(&self, factor: f64) -> Self {
        let nodes = self.nodes.iter().map(|r| r * factor).collect();
        Self::from_log_nodes(self.dim, nodes, self.log_step)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    /// Index `i` with `r_i <= r < r_{i+1}`, clamped to valid intervals.
    pub fn interval_of(&self, r: f64) -> usize {
        let n = self.nodes.len();
        let guess = ((r / self.nodes[0]).ln() / self.log_step).floor();
        let mut i = if guess.is_finite() && guess > 0.0 { (guess as usize).min(n - 2) } else { 0 };
        while i > 0 && self.nodes[i] > r {
            i -= 1;
        }
        while i + 2 < n && self.nodes[i + 1] <= r {
            i += 1;
        }
        i
    }

    /// Exact volume of the shell `r_0 <= |x| <= r_N`.
    pub fn shell_volume(&self) -> f64 {
        let d = self.dim as i32;
        sphere_area(self.dim) * (self.last().powi(d) - self.first().powi(d)) / self.dim as f64
    }

    /// `Σ w_i f(r_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn weights_reproduce_shell_volume() {
        for d in 3..=7 {
            let g = RadialGrid::geometric(d, 1e-4, 50.0, 8000).unwrap();
            let vol = g.integrate(|_| 1.0);
            let rel = (vol - g.shell_volume()).abs() / g.shell_volume();
            assert!(rel < 1e-10, "d={d}: rel err {rel:e}");
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn interval_lookup() {
        let g = RadialGrid::geometric(5, 1e-3, 10.0, 100).unwrap();
        for &r in &[1e-3, 2.3e-3, 0.5, 9.99, 10.0] {
            let i = g.interval_of(r);
            assert!(g.nodes()[i] <= r && r <= g.nodes()[i + 1], "r={r} i={i}");
        }
    }

    #[test]
    fn rejects_degenerate_range() {
        assert!(RadialGrid::geometric(5, 1.0, 1.0, 10).is_err());
        assert!(RadialGrid::geometric(5, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn inversion_is_geometric() {
        let g = RadialGrid::geometric(5, 1e-2, 30.0, 200).unwrap();
        let gi = g.inverted();
        assert!((gi.first() - 1.0 / 30.0).abs() < 1e-15);
        let back = gi.inverted();
        for (a, b) in g.nodes().iter().zip(back.nodes()) {
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }
}
