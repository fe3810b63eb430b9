//! Katz centrality, directly and through the complement graph.
//!
//! For `A = e u^T + sigma I - B` (the [`ComplementView`] form) and a Katz
//! parameter `0 < t < 1/rho(A)`, Sherman-Morrison gives
//!
//! ```text
//! (I - tA)^{-1} e = v0 / ((1 - t sigma) - t u^T v0),   v0 = (I + s B)^{-1} e,
//! s = t / (1 - t sigma)
//! ```
//!
//! so `v0` (Katz centrality on the complement with parameter `-s`) ranks the
//! nodes exactly as Katz on the original graph. The four graph classes are
//! the special cases `u = e, sigma = 0` (unweighted with loops), `u = e,
//! sigma = -1` (unweighted loopless), `u` = column maxima, `sigma = 0`
//! (weighted with loops) and `u = Omega e, sigma = -Omega` (weighted loopless).

mod eigen;

pub use eigen::{
    eigenvector_centrality_complement, eigenvector_centrality_resolvent, eigenvector_centrality_view,
    PowerOptions,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    complement_unweighted, complement_weighted, ComplementView, Graph, LoopPolicy, SparseMatrix, WeightScale,
    DEFAULT_DUST_TOL,
};
use crate::linalg::{solve_shifted, spectral_radius, SolveOptions, SpectralEstimate, SpectralOptions};
use crate::ranking::rank;

/// How a centrality vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    Complement,
    Thresholded,
    PowerComplement,
    Resolvent,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Complement => "complement",
            Route::Thresholded => "thresholded",
            Route::PowerComplement => "power_complement",
            Route::Resolvent => "resolvent",
        }
    }
}

/// Route selection for [`katz`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KatzRoute {
    Direct,
    /// Use the complement when it has fewer stored entries than `A`.
    ComplementAuto,
    ComplementForced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzParams {
    pub t: f64,
    pub route: KatzRoute,
    pub rho_hint: Option<f64>,
}

impl KatzParams {
    pub fn new(t: f64) -> Self {
        Self { t, route: KatzRoute::ComplementAuto, rho_hint: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzOptions {
    pub solve: SolveOptions,
    pub spectral: SpectralOptions,
    /// Precomputed `rho(A)`; skips the power iteration when set.
    pub rho_hint: Option<f64>,
}

impl Default for KatzOptions {
    fn default() -> Self {
        Self { solve: SolveOptions::default(), spectral: SpectralOptions::default(), rho_hint: None }
    }
}

/// The graph class a complement adjacency belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementMode {
    UnweightedLoops,
    UnweightedLoopless,
    WeightedLoops,
    WeightedLoopless,
}

impl ComplementMode {
    pub fn of(weighted: bool, loop_policy: LoopPolicy) -> Self {
        match (weighted, loop_policy) {
            (false, LoopPolicy::WithLoops) => Self::UnweightedLoops,
            (false, LoopPolicy::Loopless) => Self::UnweightedLoopless,
            (true, LoopPolicy::WithLoops) => Self::WeightedLoops,
            (true, LoopPolicy::Loopless) => Self::WeightedLoopless,
        }
    }

    pub fn loop_policy(&self) -> LoopPolicy {
        match self {
            Self::UnweightedLoops | Self::WeightedLoops => LoopPolicy::WithLoops,
            Self::UnweightedLoopless | Self::WeightedLoopless => LoopPolicy::Loopless,
        }
    }

    /// Reassembles the implicit view of `A` from its complement `b`.
    pub fn view(&self, b: &SparseMatrix, scale: Option<&WeightScale>) -> Result<ComplementView> {
        let need_scale = || scale.ok_or_else(|| Error::invalid("weighted complement modes need a weight scale"));
        match self {
            Self::UnweightedLoops | Self::UnweightedLoopless => ComplementView::unweighted(b.clone(), self.loop_policy()),
            Self::WeightedLoops => ComplementView::weighted_loops(b.clone(), need_scale()?.u.clone()),
            Self::WeightedLoopless => ComplementView::weighted_loopless(b.clone(), need_scale()?.max_weight()),
        }
    }
}

/// A centrality vector together with how it was computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityResult {
    pub v: Vec<f64>,
    pub t_used: f64,
    pub route: Route,
    /// Scalars tying the result to other routes: `gamma`, `chi`,
    /// `denominator`, the `rho` used for validation, and so on.
    pub certificates: BTreeMap<String, f64>,
    /// Node ids by descending centrality, ties by ascending id.
    pub ranking: Vec<usize>,
}

impl CentralityResult {
    pub(crate) fn new(v: Vec<f64>, t_used: f64, route: Route) -> Result<Self> {
        let ranking = rank(&v)?.order;
        Ok(Self { v, t_used, route, certificates: BTreeMap::new(), ranking })
    }

    pub(crate) fn with(mut self, name: &str, value: f64) -> Self {
        self.certificates.insert(name.to_string(), value);
        self
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn certificate(&self, name: &str) -> Option<f64> {
        self.certificates.get(name).copied()
    }

    /// The vector on the direct Katz scale: `v / denominator` for
    /// complement routes, `v` itself otherwise.
    pub fn rescaled(&self) -> Vec<f64> {
        match self.certificate("denominator") {
            Some(d) if matches!(self.route, Route::Complement | Route::Thresholded) => {
                self.v.iter().map(|x| x / d).collect()
            }
            _ => self.v.clone(),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("Katz parameter must be positive and finite, got {t}")));
    }
    Ok(())
}

/// Estimates (or takes the hint for) `rho(A)` and checks `t < 1/rho(A)`.
fn validate_parameter<F>(t: f64, n: usize, apply: F, opts: &KatzOptions) -> Result<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    let (rho, radius) = match opts.rho_hint {
        Some(r) => (r, r * crate::linalg::RHO_SAFETY_FACTOR),
        None => {
            let est: SpectralEstimate = spectral_radius(apply, n, &opts.spectral);
            (est.rho, est.validation_radius())
        }
    };
    if t * radius >= 1.0 {
        return Err(Error::ParameterOutOfRange { t, bound: 1.0 / rho });
    }
    Ok(rho)
}

/// Katz centrality `(I - tA)^{-1} e` by a solve on `A` itself.
pub fn katz_direct(g: &Graph, t: f64, opts: &KatzOptions) -> Result<CentralityResult> {
    check_t(t)?;
    let a = g.adjacency();
    let rho = validate_parameter(t, g.n(), |v, out| a.mul_vec_into(v, out), opts)?;
    let e = vec![1.0; g.n()];
    let v = solve_shifted(a, -t, &e, &opts.solve)?;
    Ok(CentralityResult::new(v, t, Route::Direct)?.with("rho", rho))
}

/// `gamma(t, B) = e^T (I + tB)^{-1} e`.
pub fn gamma_scalar(b: &SparseMatrix, t: f64, opts: &SolveOptions) -> Result<f64> {
    let e = vec![1.0; b.n_rows()];
    Ok(solve_shifted(b, t, &e, opts)?.iter().sum())
}

/// Katz ranking of a graph computed from its complement adjacency `b`.
///
/// Returns `v0 = (I + sB)^{-1} e` with `s = t` (with loops), `t/(1+t)`
/// (unweighted loopless) or `t/(1 + Omega t)` (weighted loopless). The
/// `denominator` certificate is the positive scalar with
/// `(I - tA)^{-1} e = v0 / denominator`; `gamma` or `chi` is `e^T v0`.
/// `rho(A)` for the range check is estimated through the implicit view.
pub fn katz_complement(
    b: &SparseMatrix,
    t: f64,
    mode: ComplementMode,
    scale: Option<&WeightScale>,
    opts: &KatzOptions,
) -> Result<CentralityResult> {
    check_t(t)?;
    let view = mode.view(b, scale)?;
    complement_solve(&view, t, mode, opts, Route::Complement)
}

pub(crate) fn complement_solve(
    view: &ComplementView,
    t: f64,
    mode: ComplementMode,
    opts: &KatzOptions,
    route: Route,
) -> Result<CentralityResult> {
    let n = view.n();
    let rho = validate_parameter(t, n, |v, out| view.matvec_into(v, out), opts)?;
    let c = 1.0 - t * view.diagonal_shift();
    let s = t / c;
    let e = vec![1.0; n];
    let v0 = solve_shifted(view.sparse_part(), s, &e, &opts.solve)?;
    let sum: f64 = v0.iter().sum();
    let u_dot: f64 = view.u().iter().zip(&v0).map(|(a, b)| a * b).sum();
    let denominator = c - t * u_dot;
    if !(denominator > 0.0) {
        return Err(Error::NonPositiveDenominator(denominator));
    }
    let mut result = CentralityResult::new(v0, t, route)?
        .with("rho", rho)
        .with("complement_parameter", -s)
        .with("denominator", denominator);
    result = match mode {
        ComplementMode::UnweightedLoops => result.with("gamma", sum),
        ComplementMode::UnweightedLoopless | ComplementMode::WeightedLoopless => result.with("chi", sum),
        ComplementMode::WeightedLoops => result.with("u_dot_v0", u_dot),
    };
    Ok(result)
}

/// Number of stored entries the complement of `g` would have, without
/// building it.
pub fn complement_nnz(g: &Graph) -> usize {
    let n = g.n();
    let adj = g.adjacency();
    if !g.is_weighted() {
        return g.max_edges() - g.edge_count();
    }
    match g.loop_policy() {
        LoopPolicy::WithLoops => {
            let u = adj.column_max();
            let mut at_max = vec![0usize; n];
            for (_, j, w) in adj.iter() {
                if u[j] - w <= DEFAULT_DUST_TOL {
                    at_max[j] += 1;
                }
            }
            (0..n).filter(|&j| u[j] > DEFAULT_DUST_TOL).map(|j| n - at_max[j]).sum()
        }
        LoopPolicy::Loopless => {
            let omega = adj.max_value().unwrap_or(0.0);
            let at_max = adj.iter().filter(|&(_, _, w)| omega - w <= DEFAULT_DUST_TOL).count();
            g.max_edges() - at_max
        }
    }
}

/// Katz centrality with automatic or explicit route selection.
///
/// Complement routes return the complement-side vector `v0`; use
/// [`CentralityResult::rescaled`] for values on the direct scale.
pub fn katz(g: &Graph, params: &KatzParams, opts: &KatzOptions) -> Result<CentralityResult> {
    let opts = KatzOptions { rho_hint: params.rho_hint.or(opts.rho_hint), ..*opts };
    let use_complement = match params.route {
        KatzRoute::Direct => false,
        KatzRoute::ComplementForced => true,
        KatzRoute::ComplementAuto => complement_nnz(g) < g.edge_count(),
    };
    if !use_complement {
        return katz_direct(g, params.t, &opts);
    }
    let mode = ComplementMode::of(g.is_weighted(), g.loop_policy());
    if g.is_weighted() {
        let scale = WeightScale::of(g);
        let (b, _) = complement_weighted(g, &scale)?;
        katz_complement(b.adjacency(), params.t, mode, Some(&scale), &opts)
    } else {
        let b = complement_unweighted(g)?;
        katz_complement(b.adjacency(), params.t, mode, None, &opts)
    }
}

/// Truncated even and odd walk sums `(sum_{k even} t^k B^k e,
/// sum_{k odd} t^k B^k e)` for `k <= order`. Their difference tends to
/// `(I + tB)^{-1} e` when `|t| rho(B) < 1`.
pub fn katz_negative_series_check(b: &SparseMatrix, t: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = b.n_rows();
    let mut term = vec![1.0; n];
    let mut even = term.clone();
    let mut odd = vec![0.0; n];
    let mut next = vec![0.0; n];
    for k in 1..=order {
        b.mul_vec_into(&term, &mut next);
        next.iter_mut().for_each(|x| *x *= t);
        std::mem::swap(&mut term, &mut next);
        let target = if k % 2 == 0 { &mut even } else { &mut odd };
        target.iter_mut().zip(&term).for_each(|(s, x)| *s += x);
    }
    (even, odd)
}
