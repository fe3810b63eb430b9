//! Spectral-radius estimation for nonnegative matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative inflation applied to a radius estimate before checking `t < 1/rho`.
pub const RHO_SAFETY_FACTOR: f64 = 1.0 + 1e-8;

/// The bracket must shrink by 10% over this many iterations or the run stops.
const STALL_WINDOW: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 20_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Rayleigh-quotient estimate, clipped into the Collatz-Wielandt bracket.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `||A x - rho x|| / ||x||` at the last iterate.
    pub residual: f64,
    /// Collatz-Wielandt upper bound `max_i (A x)_i / x_i`; valid for every
    /// positive iterate, converged or not.
    pub upper_bound: f64,
}

impl SpectralEstimate {
    /// The radius used to validate a Katz parameter: the inflated estimate
    /// when converged, otherwise the (also inflated) upper bound.
    pub fn validation_radius(&self) -> f64 {
        if self.converged {
            self.rho * RHO_SAFETY_FACTOR
        } else {
            self.upper_bound.max(self.rho) * RHO_SAFETY_FACTOR
        }
    }
}

/// Power iteration for the spectral radius of a nonnegative matrix given
/// only through its action `apply(v, out)`.
///
/// The iteration runs on `A + sigma I` with a small positive `sigma`, which
/// makes periodic (e.g. bipartite) irreducible matrices primitive without
/// moving the Perron vector. The start vector is `e/n` plus a seeded
/// perturbation of size `1e-3`. Convergence is declared when the
/// Collatz-Wielandt bracket `[min_i (Ax)_i/x_i, max_i (Ax)_i/x_i]` has width
/// at most `tol * max(1, rho)`; this never happens on reducible matrices
/// with a non-positive Perron vector, which then stop on stagnation with
/// `converged = false`.
pub fn spectral_radius<F>(apply: F, n: usize, opts: &SpectralOptions) -> SpectralEstimate
where
    F: Fn(&[f64], &mut [f64]),
{
    assert!(n > 0, "spectral_radius needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..n).map(|_| 1.0 / n as f64 + 1e-3 * rng.random::<f64>()).collect();
    normalize1(&mut x);
    let mut y = vec![0.0; n];

    apply(&x, &mut y);
    let row_mean = y.iter().sum::<f64>() / x.iter().sum::<f64>();
    if y.iter().all(|&v| v <= 0.0) {
        // A x = 0 for a positive x forces A = 0
        return SpectralEstimate { rho: 0.0, iterations: 1, converged: true, residual: 0.0, upper_bound: 0.0 };
    }
    let sigma = 0.1 * row_mean.max(f64::MIN_POSITIVE);

    let mut widths: Vec<f64> = Vec::new();
    let mut estimate = SpectralEstimate {
        rho: 0.0,
        iterations: 0,
        converged: false,
        residual: f64::INFINITY,
        upper_bound: f64::INFINITY,
    };
    for iter in 1..=opts.max_iter {
        if iter > 1 {
            apply(&x, &mut y);
        }
        let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
        for (&yi, &xi) in y.iter().zip(&x) {
            let r = yi.max(0.0) / xi;
            lower = lower.min(r);
            upper = upper.max(r);
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rho = (xy / xx).clamp(lower, upper);
        let residual = (x.iter().zip(&y).map(|(a, b)| (b - rho * a).powi(2)).sum::<f64>() / xx).sqrt();
        estimate = SpectralEstimate {
            rho,
            iterations: iter,
            converged: false,
            residual,
            upper_bound: upper.min(estimate.upper_bound),
        };
        let scale = rho.max(1.0);
        if upper - lower <= opts.tol * scale {
            estimate.converged = true;
            return estimate;
        }
        widths.push(upper - lower);
        if widths.len() > STALL_WINDOW && upper - lower > 0.9 * widths[widths.len() - 1 - STALL_WINDOW] {
            return estimate;
        }
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = (yi.max(0.0) + sigma * *xi).max(f64::MIN_POSITIVE);
        }
        normalize1(&mut x);
    }
    estimate
}

fn normalize1(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseMatrix;

    fn radius_of(m: &SparseMatrix) -> SpectralEstimate {
        spectral_radius(|v, out| m.mul_vec_into(v, out), m.n_rows(), &SpectralOptions::default())
    }

    #[test]
    fn rank_one_all_ones() {
        let m = SparseMatrix::from_dense(4, 4, &[1.0; 16], 0.0).unwrap();
        let est = radius_of(&m);
        assert!(est.converged);
        assert!((est.rho - 4.0).abs() < 1e-9);
    }

    #[test]
    fn bipartite_path() {
        let m = SparseMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        let est = radius_of(&m);
        assert!(est.converged);
        assert!((est.rho - 2f64.sqrt()).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn complete_loopless_k4() {
        let mut t = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    t.push((i, j, 1.0));
                }
            }
        }
        let est = radius_of(&SparseMatrix::from_triplets(4, 4, t).unwrap());
        assert!(est.converged);
        assert!((est.rho - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix() {
        let est = radius_of(&SparseMatrix::zeros(3, 3));
        assert_eq!(est.rho, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn reducible_reports_not_converged_with_valid_bound() {
        // triangle plus an isolated node
        let mut t = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    t.push((i, j, 1.0));
                }
            }
        }
        let m = SparseMatrix::from_triplets(4, 4, t).unwrap();
        let est = radius_of(&m);
        assert!(!est.converged);
        assert!(est.upper_bound >= 2.0 - 1e-12);
        assert!((est.rho - 2.0).abs() < 1e-6);
    }
}
