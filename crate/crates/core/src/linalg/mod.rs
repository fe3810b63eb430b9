//! Sparse kernels, implicit products with complement views, shifted linear
//! solves, and spectral-radius estimation.

mod dense;
mod gmres;
mod spectral;

pub use dense::{DenseMatrix, LuFactor};
pub use spectral::{spectral_radius, SpectralEstimate, SpectralOptions, RHO_SAFETY_FACTOR};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ComplementView, SparseMatrix};

/// `M v` for a CSR matrix.
pub fn spmv(m: &SparseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    m.mul_vec(v)
}

/// `A v` for the dense matrix represented by `view`, in `O(n + nnz(B))`.
pub fn implicit_matvec(view: &ComplementView, v: &[f64]) -> Result<Vec<f64>> {
    view.matvec(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Dense LU with partial pivoting on the materialized system.
    DirectFactorization,
    /// Restarted GMRES on the sparse operator.
    Iterative,
    /// Dense LU for small systems, GMRES above [`AUTO_DENSE_MAX_N`] with a
    /// dense fallback if GMRES fails.
    Auto,
}

/// Systems up to this order are solved densely by [`SolveMethod::Auto`].
pub const AUTO_DENSE_MAX_N: usize = 256;
/// Largest order the dense fallback will attempt.
pub const DENSE_FALLBACK_MAX_N: usize = 5000;
const GMRES_RESTART: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Bound on `||(I + sB) x - rhs|| / ||rhs||`.
    pub tol: f64,
    /// Iteration cap for the iterative method; `None` means `10 n`.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { method: SolveMethod::Auto, tol: 1e-12, max_iter: None }
    }
}

impl SolveOptions {
    pub fn with_method(method: SolveMethod) -> Self {
        Self { method, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("solver tolerance must be positive"));
        }
        if self.max_iter == Some(0) {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Solves `(I + s B) x = rhs`.
///
/// The returned solution satisfies the relative residual bound `opts.tol`,
/// except that a dense factorization is also accepted when its normwise
/// backward error `||r|| / (||I + sB|| ||x|| + ||rhs||)` (infinity norms) is
/// within `opts.tol`. Near-singular systems cannot reach a small relative
/// residual in floating point.
pub fn solve_shifted(b: &SparseMatrix, s: f64, rhs: &[f64], opts: &SolveOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    let n = b.n_rows();
    if !b.is_square() {
        return Err(Error::DimensionMismatch { expected: n, got: b.n_cols() });
    }
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    if !s.is_finite() {
        return Err(Error::invalid("shift must be finite"));
    }
    if let Some(k) = rhs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    if s == 0.0 || b.nnz() == 0 {
        return Ok(rhs.to_vec());
    }
    match opts.method {
        SolveMethod::DirectFactorization => solve_dense(b, s, rhs, opts.tol),
        SolveMethod::Iterative => solve_iterative(b, s, rhs, opts),
        SolveMethod::Auto => {
            if n <= AUTO_DENSE_MAX_N {
                solve_dense(b, s, rhs, opts.tol)
            } else {
                match solve_iterative(b, s, rhs, opts) {
                    Err(Error::NotConverged { .. }) if n <= DENSE_FALLBACK_MAX_N => solve_dense(b, s, rhs, opts.tol),
                    other => other,
                }
            }
        }
    }
}

fn shifted_apply<'a>(b: &'a SparseMatrix, s: f64) -> impl Fn(&[f64], &mut [f64]) + 'a {
    move |v: &[f64], out: &mut [f64]| {
        b.mul_vec_into(v, out);
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = vi + s * *o;
        }
    }
}

/// Relative residual `||(I + sB) x - rhs|| / ||rhs||`.
pub fn shifted_residual(b: &SparseMatrix, s: f64, x: &[f64], rhs: &[f64]) -> f64 {
    let mut r = vec![0.0; rhs.len()];
    shifted_apply(b, s)(x, &mut r);
    let num: f64 = r.iter().zip(rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn solve_dense(b: &SparseMatrix, s: f64, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let lu = LuFactor::factor(DenseMatrix::shifted_identity(b, s))?;
    let mut x = lu.solve(rhs);
    let mut res = shifted_residual(b, s, &x, rhs);
    // iterative refinement
    for _ in 0..3 {
        if res <= tol {
            break;
        }
        let mut r = vec![0.0; rhs.len()];
        shifted_apply(b, s)(&x, &mut r);
        let corr_rhs: Vec<f64> = rhs.iter().zip(&r).map(|(a, b)| a - b).collect();
        let d = lu.solve(&corr_rhs);
        x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
        res = shifted_residual(b, s, &x, rhs);
    }
    if !res.is_finite() {
        return Err(Error::Singular);
    }
    if res > tol && backward_error(b, s, &x, rhs) > tol {
        return Err(Error::NotConverged { iterations: 0, residual: res });
    }
    Ok(x)
}

fn backward_error(b: &SparseMatrix, s: f64, x: &[f64], rhs: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut r = vec![0.0; rhs.len()];
    shifted_apply(b, s)(x, &mut r);
    r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri -= bi);
    let norm_m = (0..b.n_rows())
        .map(|i| {
            let (cols, vals) = b.row(i);
            let off: f64 = cols.iter().zip(vals).filter(|(&j, _)| j != i).map(|(_, v)| (s * v).abs()).sum();
            (1.0 + s * b.get(i, i)).abs() + off
        })
        .fold(0.0f64, f64::max);
    inf(&r) / (norm_m * inf(x) + inf(rhs))
}

fn solve_iterative(b: &SparseMatrix, s: f64, rhs: &[f64], opts: &SolveOptions) -> Result<Vec<f64>> {
    let n = rhs.len();
    let max_iter = opts.max_iter.unwrap_or(10 * n).max(1);
    let mut x = rhs.to_vec();
    let outcome = gmres::gmres(shifted_apply(b, s), rhs, &mut x, opts.tol, max_iter, GMRES_RESTART);
    if !outcome.relative_residual.is_finite() {
        return Err(Error::Singular);
    }
    if !outcome.converged {
        return Err(Error::NotConverged {
            iterations: outcome.iterations,
            residual: outcome.relative_residual,
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LoopPolicy;

    fn p3_complement() -> SparseMatrix {
        SparseMatrix::from_triplets(3, 3, vec![(0, 2, 1.0), (2, 0, 1.0)]).unwrap()
    }

    #[test]
    fn spmv_examples() {
        let id = SparseMatrix::identity(3);
        assert_eq!(spmv(&id, &[1.0, -2.0, 5.0]).unwrap(), vec![1.0, -2.0, 5.0]);
        let b = SparseMatrix::from_triplets(2, 2, vec![(1, 1, 1.0)]).unwrap();
        assert_eq!(spmv(&b, &[3.0, 5.0]).unwrap(), vec![0.0, 5.0]);
        let p3 = SparseMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(spmv(&p3, &[1.0; 3]).unwrap(), vec![1.0, 2.0, 1.0]);
        assert!(matches!(spmv(&p3, &[1.0; 2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn implicit_examples() {
        let full = ComplementView::unweighted(SparseMatrix::zeros(3, 3), LoopPolicy::WithLoops).unwrap();
        assert_eq!(implicit_matvec(&full, &[1.0; 3]).unwrap(), vec![3.0; 3]);
        let b = SparseMatrix::from_triplets(2, 2, vec![(1, 1, 1.0)]).unwrap();
        let v = ComplementView::weighted_loops(b, vec![1.0, 1.0]).unwrap();
        assert_eq!(implicit_matvec(&v, &[1.0, 1.0]).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn shifted_solve_examples() {
        for method in [SolveMethod::DirectFactorization, SolveMethod::Iterative, SolveMethod::Auto] {
            let opts = SolveOptions::with_method(method);
            let zero = SparseMatrix::zeros(4, 4);
            assert_eq!(solve_shifted(&zero, 3.0, &[1.0; 4], &opts).unwrap(), vec![1.0; 4]);

            let b = SparseMatrix::from_triplets(2, 2, vec![(1, 1, 1.0)]).unwrap();
            let x = solve_shifted(&b, 0.25, &[1.0; 2], &opts).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 0.8).abs() < 1e-14);

            let x = solve_shifted(&p3_complement(), 1.0 / 3.0, &[1.0; 3], &opts).unwrap();
            for (xi, want) in x.iter().zip([0.75, 1.0, 0.75]) {
                assert!((xi - want).abs() < 1e-14, "{method:?}: {x:?}");
            }
        }
    }

    #[test]
    fn singular_shift_detected() {
        // I - B with B = identity is the zero matrix
        let b = SparseMatrix::identity(3);
        let dense = solve_shifted(&b, -1.0, &[1.0; 3], &SolveOptions::with_method(SolveMethod::DirectFactorization));
        assert!(matches!(dense, Err(Error::Singular)));
        let iter = solve_shifted(&b, -1.0, &[1.0; 3], &SolveOptions::with_method(SolveMethod::Iterative));
        assert!(iter.is_err());
    }
}
