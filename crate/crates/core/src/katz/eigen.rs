//! Eigenvector centrality through the complement graph.

use super::{CentralityResult, Route};
use crate::error::{Error, Result};
use crate::graph::{ComplementView, LoopPolicy, SparseMatrix};
use crate::linalg::{solve_shifted, SolveOptions};

pub const STALL_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOptions {
    /// Stop when `||v_{k+1} - v_k||_1 <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Nonnegative start vector with unit sum; `e/n` when absent.
    pub start: Option<Vec<f64>>,
    /// Switch to iterating on `A + I` when the plain iteration stops
    /// contracting, as it does on periodic graphs such as bipartite ones.
    pub periodic_shift: bool,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, start: None, periodic_shift: true }
    }
}

/// Perron vector of `A` (unit 1-norm) from the complement adjacency `b`.
///
/// With loops the iteration is `v <- (e - B v) / (n - e^T B v)`; without
/// loops it is `v <- (e - v - B v) / (n - 1 - e^T B v)`.
pub fn eigenvector_centrality_complement(
    b: &SparseMatrix,
    loop_policy: LoopPolicy,
    opts: &PowerOptions,
) -> Result<CentralityResult> {
    let view = ComplementView::unweighted(b.clone(), loop_policy)?;
    eigenvector_centrality_view(&view, opts, |_, _| {})
}

/// Power iteration on `A = e u^T + sigma I - B` using only products with `B`.
///
/// Each iterate is `(e (u^T v) + sigma v - B v) / (n u^T v + sigma - e^T B v)`,
/// which reduces to the two complement iterations for `u = e`. If the step
/// `||v_{k+1} - v_k||_1` fails to halve over [`STALL_WINDOW`] iterations and
/// `periodic_shift` is set, `sigma` is raised by one for the rest of the run;
/// the `shift` certificate records this. `observer` sees every iterate. Reducible matrices are rejected up front because
/// their Perron vector need not be unique.
pub fn eigenvector_centrality_view<O>(view: &ComplementView, opts: &PowerOptions, mut observer: O) -> Result<CentralityResult>
where
    O: FnMut(usize, &[f64]),
{
    let n = view.n();
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::invalid("power iteration needs tol > 0 and max_iter >= 1"));
    }
    if !view.is_irreducible() {
        return Err(Error::NoConvergence(
            "graph is not strongly connected, so its Perron vector is not unique".into(),
        ));
    }
    let mut v = match &opts.start {
        Some(s) => {
            if s.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.len() });
            }
            if s.iter().any(|&x| !(x >= 0.0)) || (s.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("start vector must be nonnegative with unit sum"));
            }
            s.clone()
        }
        None => vec![1.0 / n as f64; n],
    };
    let b = view.sparse_part();
    let mut extra = 0.0;
    let mut steps: Vec<f64> = Vec::new();
    let mut bv = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut max_drift = 0.0f64;
    for iter in 1..=opts.max_iter {
        b.mul_vec_into(&v, &mut bv);
        let u_dot: f64 = view.u().iter().zip(&v).map(|(a, x)| a * x).sum();
        let ebv: f64 = bv.iter().sum();
        let shift = view.diagonal_shift() + extra;
        let denominator = n as f64 * u_dot + shift - ebv;
        if !(denominator > 0.0) {
            return Err(Error::NonPositiveDenominator(denominator));
        }
        for i in 0..n {
            next[i] = (u_dot + shift * v[i] - bv[i]) / denominator;
        }
        max_drift = max_drift.max((next.iter().sum::<f64>() - 1.0).abs());
        observer(iter, &next);
        let step: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        if step <= opts.tol {
            let rho = denominator - extra;
            return Ok(CentralityResult::new(v, 1.0 / rho, Route::PowerComplement)?
                .with("rho", rho)
                .with("shift", extra)
                .with("iterations", iter as f64)
                .with("max_normalization_error", max_drift));
        }
        steps.push(step);
        if opts.periodic_shift && extra == 0.0 && steps.len() > STALL_WINDOW {
            if step > 0.5 * steps[steps.len() - 1 - STALL_WINDOW] {
                extra = 1.0;
            }
        }
    }
    Err(Error::NoConvergence(format!("power iteration did not settle within {} iterations", opts.max_iter)))
}

/// Eigenvector-centrality ranking from a single sparse solve:
/// `(I + B/rho)^{-1} e` with loops, `(I + B/(rho + 1))^{-1} e` without.
pub fn eigenvector_centrality_resolvent(
    b: &SparseMatrix,
    rho_a: f64,
    loop_policy: LoopPolicy,
    opts: &SolveOptions,
) -> Result<CentralityResult> {
    if !(rho_a > 0.0) || !rho_a.is_finite() {
        return Err(Error::invalid(format!("rho(A) must be positive, got {rho_a}")));
    }
    let s = match loop_policy {
        LoopPolicy::WithLoops => 1.0 / rho_a,
        LoopPolicy::Loopless => 1.0 / (rho_a + 1.0),
    };
    let e = vec![1.0; b.n_rows()];
    let v = solve_shifted(b, s, &e, opts)?;
    Ok(CentralityResult::new(v, 1.0 / rho_a, Route::Resolvent)?
        .with("rho", rho_a)
        .with("complement_parameter", -s))
}
