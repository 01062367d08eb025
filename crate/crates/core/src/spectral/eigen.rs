//! Eigenpairs of symmetric tridiagonal matrices near a target, by Sturm-sequence
//! bisection and inverse iteration.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i] = T[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `‖T‖_∞`, an upper bound on every `|λ|`.
    pub fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + l + r
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.norm_bound());
        let mut count = 0;
        let mut piv = 1.0;
        for i in 0..self.len() {
            let b2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            piv = self.diag[i] - x - if i > 0 { b2 / piv } else { 0.0 };
            if piv == 0.0 {
                piv = -tiny;
            }
            if piv < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let bound = self.norm_bound();
        let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T - s I) x = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * (1.0 + self.norm_bound());
        // Rows hold up to three nonzeros after pivoting: (d, u1, u2).
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - s).collect();
        let mut u1: Vec<f64> = self.off.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut l: Vec<f64> = self.off.clone();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if l[i].abs() > d[i].abs() {
                // Swap rows i and i+1.
                let (ri_d, ri_u1, ri_u2, ri_b) = (d[i], u1[i], u2[i], x[i]);
                d[i] = l[i];
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                x[i] = x[i + 1];
                l[i] = ri_d;
                d[i + 1] = ri_u1;
                u1[i + 1] = ri_u2;
                x[i + 1] = ri_b;
            }
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let m = l[i] / d[i];
            d[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            x[i + 1] -= m * x[i];
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= u2[i] * x[i + 2];
            }
            x[i] = v / d[i];
        }
        x
    }
}

/// An eigenpair with its residual `‖Tψ - λψ‖ / ‖ψ‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Eigenvector for an eigenvalue already located to full precision, kept
/// orthogonal to `previous`.
pub fn inverse_iteration(t: &SymTridiagonal, lambda: f64, previous: &[Vec<f64>], tol: f64) -> Result<Eigenpair> {
    let n = t.len();
    let scale = t.norm_bound().max(f64::MIN_POSITIVE);
    let shift = lambda + 4.0 * f64::EPSILON * scale;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    for _ in 0..8 {
        let mut w = t.shifted_solve(shift, &v);
        for p in previous {
            let c: f64 = w.iter().zip(p).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        normalize(&mut w);
        v = w;
        let tv = t.matvec(&v);
        residual = tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual <= tol {
            return Ok(Eigenpair { value: lambda, vector: v, residual });
        }
    }
    Err(Error::IterationLimit(format!(
        "inverse iteration at λ = {lambda:e} stalled with residual {residual:e} (tolerance {tol:e}, n = {n})"
    )))
}

/// The `k` eigenpairs of smallest `|λ|`, ordered by `|λ|`.
pub fn nearest_to_zero(t: &SymTridiagonal, k: usize, tol: f64) -> Result<(Vec<Eigenpair>, usize)> {
    let n = t.len();
    let k = k.min(n);
    let negatives = t.count_below(0.0);
    let lo = negatives.saturating_sub(k);
    let hi = (negatives + k).min(n);
    let mut values: Vec<f64> = (lo..hi).map(|j| t.eigenvalue(j)).collect();
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    values.truncate(k);
    let mut pairs: Vec<Eigenpair> = Vec::with_capacity(k);
    for &lambda in &values {
        let prev: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
        pairs.push(inverse_iteration(t, lambda, &prev, tol)?);
    }
    Ok((pairs, negatives))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal { diag: vec![2.0; n], off: vec![-1.0; n - 1] }
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let n = 200;
        let t = laplacian(n);
        for j in [0, 1, 57, 199] {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(j) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn nearest_pairs_are_orthonormal_eigenvectors() {
        let n = 300;
        let mut t = laplacian(n);
        t.diag.iter_mut().for_each(|d| *d -= 0.5);
        let (pairs, neg) = nearest_to_zero(&t, 4, 1e-10).unwrap();
        let exact = |j: usize| 1.5 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        assert_eq!(neg, (0..n).filter(|&j| exact(j) < 0.0).count());
        for (a, p) in pairs.iter().enumerate() {
            assert!(p.residual < 1e-10);
            for q in &pairs[..a] {
                let dot: f64 = p.vector.iter().zip(&q.vector).map(|(x, y)| x * y).sum();
                assert!(dot.abs() < 1e-8);
            }
        }
        assert!(pairs.windows(2).all(|w| w[0].value.abs() <= w[1].value.abs()));
    }

    #[test]
    fn pivoted_solve_matches_matvec() {
        let t = SymTridiagonal { diag: vec![1e-3, 4.0, -2.0, 0.5, 3.0], off: vec![5.0, 1.0, -7.0, 2.0] };
        let b = [1.0, -2.0, 0.5, 3.0, 1.0];
        let x = t.shifted_solve(0.25, &b);
        let tx = t.matvec(&x);
        for i in 0..5 {
            assert!((tx[i] - 0.25 * x[i] - b[i]).abs() < 1e-12);
        }
    }
}
