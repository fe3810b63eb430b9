//! Sparsified complements and certificates for exact ranking recovery.
//!
//! A weighted complement is typically dense with many small entries.
//! Dropping the entries `<= epsilon` gives a sparse `B0`, whose Katz vector
//! `w0` ranks the nodes like the exact vector `w` whenever
//! `epsilon < x / (t (c^T w) (1 + x))` and `t < 1/rho(A + epsilon e c^T)`,
//! where `x` is the gap ratio of `w` and `c` the defect vector of the
//! thresholding. Replacing `c^T w` by `e^T w` gives a cheaper, stronger
//! condition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, LoopPolicy, SparseMatrix, WeightScale};
use crate::katz::{complement_solve, katz_complement, CentralityResult, ComplementMode, KatzOptions, Route};
use crate::linalg::{spectral_radius, DenseMatrix, LuFactor};
use crate::ranking::{tau_or_one, TIE_RTOL};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedComplement {
    pub b0: SparseMatrix,
    pub epsilon: f64,
    pub dropped_count: usize,
    pub density_before: f64,
    pub density_after: f64,
}

impl ThresholdedComplement {
    /// Fraction of zero entries in `B0`.
    pub fn sparsity(&self) -> f64 {
        1.0 - self.density_after
    }
}

/// Drops every entry `B_ij <= epsilon`.
pub fn sparsify(b: &SparseMatrix, epsilon: f64) -> Result<ThresholdedComplement> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be finite and nonnegative, got {epsilon}")));
    }
    let b0 = b.filter(|_, _, v| v > epsilon);
    Ok(ThresholdedComplement {
        dropped_count: b.nnz() - b0.nnz(),
        density_before: b.density(),
        density_after: b0.density(),
        b0,
        epsilon,
    })
}

/// `c_j = max_i (B - B0)_ij / epsilon`.
pub fn defect_vector(b: &SparseMatrix, b0: &SparseMatrix, epsilon: f64) -> Result<Vec<f64>> {
    if b.n_rows() != b0.n_rows() || b.n_cols() != b0.n_cols() {
        return Err(Error::DimensionMismatch { expected: b.n_cols(), got: b0.n_cols() });
    }
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let mut dropped = vec![0.0f64; b.n_cols()];
    for (i, j, v) in b.iter() {
        let diff = v - b0.get(i, j);
        if diff < 0.0 {
            return Err(Error::invalid("B0 is not a thresholding of B: B0 exceeds B"));
        }
        dropped[j] = dropped[j].max(diff);
    }
    if b0.iter().any(|(i, j, _)| b.get(i, j) == 0.0) {
        return Err(Error::invalid("B0 is not a thresholding of B: extra entries"));
    }
    if dropped.iter().all(|&d| d == 0.0) {
        return Ok(dropped);
    }
    if epsilon == 0.0 {
        return Err(Error::invalid("epsilon = 0 but B0 differs from B"));
    }
    let c: Vec<f64> = dropped.iter().map(|d| d / epsilon).collect();
    if c.iter().any(|&cj| cj > 1.0 + 1e-12) {
        return Err(Error::invalid("B0 is not a thresholding of B at this epsilon"));
    }
    Ok(c)
}

/// `min_{i != j} |w_i - w_j| / max_i |w_i|`, by sorting.
///
/// Infinite for a single component, zero for any exact tie.
pub fn gap_ratio(w: &[f64]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::invalid("gap_ratio of an empty vector"));
    }
    if let Some(k) = w.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let mut sorted = w.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_gap = sorted.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    let max_abs = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if min_gap == 0.0 {
        return Ok(0.0);
    }
    Ok(min_gap / max_abs)
}

/// Right-hand side `x / (t s (1 + x))` of the epsilon conditions.
fn epsilon_bound(x: f64, t: f64, s: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let frac = if x.is_infinite() { 1.0 } else { x / (1.0 + x) };
    if s == 0.0 {
        f64::INFINITY
    } else {
        frac / (t * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdVariant {
    WithLoops,
    Loopless,
}

impl ThresholdVariant {
    pub fn loop_policy(&self) -> LoopPolicy {
        match self {
            Self::WithLoops => LoopPolicy::WithLoops,
            Self::Loopless => LoopPolicy::Loopless,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub epsilon: f64,
    pub t: f64,
    pub variant: ThresholdVariant,
    /// Gap ratio of the exact Katz vector; zero when the smallest gap is
    /// within the ranking tie tolerance.
    pub x: f64,
    pub c: Vec<f64>,
    pub c_dot_w: f64,
    pub e_dot_w: f64,
    pub rho_a: f64,
    /// Estimate of `rho(A + epsilon e c^T)`.
    pub rho_bound: f64,
    pub rho_bound_ok: bool,
    /// Largest admissible epsilon using `c^T w`; infinite when `c = 0`.
    /// Serialized as `null` when infinite.
    pub rhs_c: f64,
    /// Largest admissible epsilon using `e^T w`.
    pub rhs_e: f64,
    pub cond_c_ok: bool,
    pub cond_e_ok: bool,
    pub verdict: Verdict,
}

impl SufficiencyReport {
    /// Upper factor `1 + y/(1 - y)`, `y = (c^T w) epsilon t`, in
    /// `w <= w0 <= factor * w`.
    pub fn sandwich_factor(&self) -> f64 {
        let y = self.c_dot_w * self.epsilon * self.t;
        1.0 + y / (1.0 - y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub katz: KatzOptions,
    /// Largest `n` for which a dense solve is attempted when `B` is not
    /// sparse enough for the complement route.
    pub dense_budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { katz: KatzOptions::default(), dense_budget: 5000 }
    }
}

/// Evaluates the sufficient conditions for `B0` to reproduce the exact
/// Katz ranking of `g` at parameter `t`.
///
/// `b` is the exact complement of `g` (see
/// [`complement_weighted`](crate::graph::complement_weighted)) and `b0` its
/// thresholding at `epsilon`. The exact vector `w` comes from the
/// complement route when `nnz(B) <= n^2/4`, otherwise from a dense LU
/// solve, which is refused above `opts.dense_budget`.
pub fn check_sufficient(
    g: &Graph,
    b: &SparseMatrix,
    b0: &SparseMatrix,
    epsilon: f64,
    t: f64,
    variant: ThresholdVariant,
    opts: &CheckOptions,
) -> Result<SufficiencyReport> {
    let n = g.n();
    if b.n_rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.n_rows() });
    }
    let mode = ComplementMode::of(g.is_weighted(), variant.loop_policy());
    let scale = WeightScale::of(g);
    let view = mode.view(b, Some(&scale))?;
    let rho_a = match opts.katz.rho_hint {
        Some(r) => r,
        None => spectral_radius(|v, out| view.matvec_into(v, out), n, &opts.katz.spectral).rho,
    };
    let katz_opts = KatzOptions { rho_hint: Some(rho_a), ..opts.katz };

    let w = if b.nnz() <= n * n / 4 {
        katz_complement(b, t, mode, Some(&scale), &katz_opts)?.rescaled()
    } else {
        if n > opts.dense_budget {
            return Err(Error::DenseBudget { n, budget: opts.dense_budget });
        }
        if t * rho_a * crate::linalg::RHO_SAFETY_FACTOR >= 1.0 {
            return Err(Error::ParameterOutOfRange { t, bound: 1.0 / rho_a });
        }
        let mut m: Vec<f64> = view.to_dense().iter().map(|a| -t * a).collect();
        for i in 0..n {
            m[i * n + i] += 1.0;
        }
        LuFactor::factor(DenseMatrix::from_row_major(n, m)?)?.solve(&vec![1.0; n])
    };

    let c = defect_vector(b, b0, epsilon)?;
    // gaps the ranking treats as ties certify nothing
    let x = match gap_ratio(&w)? {
        x if x <= TIE_RTOL => 0.0,
        x => x,
    };
    let c_dot_w: f64 = c.iter().zip(&w).map(|(a, b)| a * b).sum();
    let e_dot_w: f64 = w.iter().sum();

    let rho_bound = if c.iter().all(|&cj| cj == 0.0) || epsilon == 0.0 {
        rho_a
    } else {
        let est = spectral_radius(
            |v, out| {
                view.matvec_into(v, out);
                let shift = epsilon * c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                out.iter_mut().for_each(|o| *o += shift);
            },
            n,
            &opts.katz.spectral,
        );
        if est.converged {
            est.rho
        } else {
            est.upper_bound
        }
    };
    let rho_bound_ok = t * rho_bound * crate::linalg::RHO_SAFETY_FACTOR < 1.0;
    let rhs_c = epsilon_bound(x, t, c_dot_w);
    let rhs_e = epsilon_bound(x, t, e_dot_w);
    let cond_c_ok = epsilon < rhs_c;
    let cond_e_ok = epsilon < rhs_e;
    let verdict = if rho_bound_ok && cond_c_ok { Verdict::Certified } else { Verdict::Uncertified };
    Ok(SufficiencyReport {
        epsilon,
        t,
        variant,
        x,
        c,
        c_dot_w,
        e_dot_w,
        rho_a,
        rho_bound,
        rho_bound_ok,
        rhs_c,
        rhs_e,
        cond_c_ok,
        cond_e_ok,
        verdict,
    })
}

/// Katz ranking from a thresholded complement: the complement route run on
/// `B0` instead of `B`.
pub fn katz_thresholded(
    b0: &SparseMatrix,
    t: f64,
    mode: ComplementMode,
    scale: Option<&WeightScale>,
    opts: &KatzOptions,
) -> Result<CentralityResult> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("Katz parameter must be positive and finite, got {t}")));
    }
    let view = mode.view(b0, scale)?;
    complement_solve(&view, t, mode, opts, Route::Thresholded)
}

/// `points` values spaced evenly in log scale from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || points == 0 {
        return Err(Error::invalid("log grid needs 0 < lo <= hi and at least one point"));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub tau: f64,
    pub density: f64,
}

/// Kendall tau between `exact` and the thresholded Katz vector for every
/// epsilon in `epsilons`.
pub fn tau_sweep(
    b: &SparseMatrix,
    exact: &[f64],
    t: f64,
    mode: ComplementMode,
    scale: Option<&WeightScale>,
    epsilons: &[f64],
    opts: &KatzOptions,
) -> Result<Vec<SweepPoint>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let thr = sparsify(b, epsilon)?;
            let v0 = katz_thresholded(&thr.b0, t, mode, scale, opts)?;
            let tau = tau_or_one(exact, &v0.v)?;
            Ok(SweepPoint { epsilon, tau, density: thr.density_after })
        })
        .collect()
}
