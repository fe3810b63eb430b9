//! Reproducible experiment drivers: thresholding accuracy on random dense
//! weighted graphs, sufficient-condition checks, and route timing.
//!
//! Random instances draw `D` of size `3n x 3n` with entries `U^n`, `U`
//! uniform on `[0, 1)`, which has cdf `x^(1/n)`. Trial `k` uses a
//! `ChaCha8Rng` seeded with `seed` on stream `k`, filling `D` row by row, so
//! any implementation of ChaCha8 reproduces the same instances.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{complement_unweighted, complement_weighted, ComplementView, Graph, LoopPolicy, SparseMatrix, WeightScale};
use crate::katz::Route;
use crate::linalg::{solve_shifted, spectral_radius, DenseMatrix, LuFactor, SolveMethod, SolveOptions, SpectralOptions};
use crate::ranking::{kendall_tau, same_ranking, tau_or_one};
use crate::threshold::{check_sufficient, sparsify, CheckOptions, SufficiencyReport, ThresholdVariant, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRule {
    Fixed(f64),
    /// `(3n)^(-k)`.
    Power(u32),
}

impl EpsilonRule {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            EpsilonRule::Fixed(e) => e,
            EpsilonRule::Power(k) => (3.0 * n as f64).powi(-(k as i32)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Exponent of the `U^n` entries; the graphs have `3n` nodes.
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon_rule: EpsilonRule,
    /// `t = t_rule / rho(A)`.
    pub t_rule: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { n: 100, trials: 100, seed: 1, epsilon_rule: EpsilonRule::Fixed(0.1), t_rule: 0.5 }
    }
}

impl ExperimentConfig {
    pub fn size(&self) -> usize {
        3 * self.n
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.trials == 0 {
            return Err(Error::invalid("experiments need n >= 1 and trials >= 1"));
        }
        if !(self.t_rule > 0.0 && self.t_rule < 1.0) {
            return Err(Error::invalid(format!("t_rule must lie in (0, 1), got {}", self.t_rule)));
        }
        if let EpsilonRule::Fixed(e) = self.epsilon_rule {
            if !(e >= 0.0) {
                return Err(Error::invalid("epsilon must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// One random instance: `A = e e^T - D` and its complement `B = e u^T - A`.
pub struct RandomInstance {
    pub graph: Graph,
    pub b: SparseMatrix,
    pub scale: WeightScale,
    pub rho_a: f64,
}

impl RandomInstance {
    pub fn draw(n: usize, seed: u64, trial: u64) -> Result<Self> {
        let size = 3 * n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let exponent = i32::try_from(n).map_err(|_| Error::invalid("n too large"))?;
        let a: Vec<f64> = (0..size * size).map(|_| 1.0 - rng.random::<f64>().powi(exponent)).collect();
        let adj = SparseMatrix::from_dense(size, size, &a, 0.0)?;
        let graph = Graph::from_adjacency(adj, LoopPolicy::WithLoops, true, true)?;
        let scale = WeightScale::of(&graph);
        let (bg, view) = complement_weighted(&graph, &scale)?;
        let rho_a = spectral_radius(|v, out| view.matvec_into(v, out), size, &SpectralOptions::default()).rho;
        Ok(Self { b: bg.into_adjacency(), graph, scale, rho_a })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub mean_exact_seconds: f64,
    pub mean_thresholded_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomExperimentReport {
    pub config: ExperimentConfig,
    pub version: String,
    pub size: usize,
    pub epsilon: f64,
    pub mean_tau: f64,
    pub min_tau: f64,
    pub mean_density_b0: f64,
    pub taus: Vec<f64>,
    pub timing: Timing,
}

/// Kendall tau between the rankings of `v = (I + tB)^{-1} e` and
/// `v0 = (I + tB0)^{-1} e`, where `B0` drops the entries of `B` at or below
/// the epsilon rule, over `config.trials` random instances.
pub fn run_random_experiment(config: &ExperimentConfig) -> Result<RandomExperimentReport> {
    config.validate()?;
    let epsilon = config.epsilon_rule.value(config.n);
    let solve = SolveOptions::default();
    let size = config.size();
    let e = vec![1.0; size];
    let mut taus = Vec::with_capacity(config.trials);
    let (mut exact_time, mut thr_time, mut density) = (0.0, 0.0, 0.0);
    for trial in 0..config.trials {
        let inst = RandomInstance::draw(config.n, config.seed, trial as u64)?;
        let t = config.t_rule / inst.rho_a;
        let b0 = sparsify(&inst.b, epsilon)?;
        density += b0.density_after;

        let clock = Instant::now();
        let v = solve_shifted(&inst.b, t, &e, &solve)?;
        exact_time += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let v0 = solve_shifted(&b0.b0, t, &e, &solve)?;
        thr_time += clock.elapsed().as_secs_f64();

        taus.push(if b0.dropped_count == 0 { 1.0 } else { kendall_tau(&v, &v0)? });
    }
    let trials = config.trials as f64;
    Ok(RandomExperimentReport {
        config: config.clone(),
        version: crate::VERSION.to_string(),
        size,
        epsilon,
        mean_tau: taus.iter().sum::<f64>() / trials,
        min_tau: taus.iter().copied().fold(f64::INFINITY, f64::min),
        mean_density_b0: density / trials,
        taus,
        timing: Timing { mean_exact_seconds: exact_time / trials, mean_thresholded_seconds: thr_time / trials },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyRow {
    pub rule: EpsilonRule,
    pub epsilon: f64,
    /// Fraction of zero entries in `B0`.
    pub sparsity: f64,
    pub rhs_c: f64,
    pub rhs_e: f64,
    pub certified: bool,
    pub cond_e_ok: bool,
    pub report: SufficiencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyExperimentReport {
    pub config: ExperimentConfig,
    pub version: String,
    pub size: usize,
    pub t: f64,
    pub rho_a: f64,
    pub rows: Vec<SufficiencyRow>,
}

/// Checks the sufficient conditions for each epsilon rule on a single
/// random instance (trial 0 of `config.seed`).
pub fn run_sufficiency_experiment(config: &ExperimentConfig, rules: &[EpsilonRule]) -> Result<SufficiencyExperimentReport> {
    config.validate()?;
    let inst = RandomInstance::draw(config.n, config.seed, 0)?;
    let t = config.t_rule / inst.rho_a;
    let mut opts = CheckOptions::default();
    opts.katz.rho_hint = Some(inst.rho_a);
    let rows = rules
        .iter()
        .map(|&rule| {
            let epsilon = rule.value(config.n);
            let thr = sparsify(&inst.b, epsilon)?;
            let report = check_sufficient(&inst.graph, &inst.b, &thr.b0, epsilon, t, ThresholdVariant::WithLoops, &opts)?;
            Ok(SufficiencyRow {
                rule,
                epsilon,
                sparsity: thr.sparsity(),
                rhs_c: report.rhs_c,
                rhs_e: report.rhs_e,
                certified: report.verdict == Verdict::Certified,
                cond_e_ok: report.cond_e_ok,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SufficiencyExperimentReport {
        config: config.clone(),
        version: crate::VERSION.to_string(),
        size: config.size(),
        t,
        rho_a: inst.rho_a,
        rows,
    })
}

/// Unweighted loopless undirected graph on `n` nodes whose complement has
/// `2 floor(5n/2) <= 5n` stored entries.
pub fn synthetic_dense_graph(n: usize, seed: u64) -> Result<Graph> {
    complement_unweighted(&synthetic_sparse_graph(n, seed)?)
}

/// Unweighted loopless undirected graph on `n` nodes with `floor(5n/2)`
/// distinct random edges.
pub fn synthetic_sparse_graph(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 {
        return Err(Error::invalid("synthetic graphs need n >= 4"));
    }
    let pairs = n * (n - 1) / 2;
    let m = (5 * n / 2).min(pairs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(2 * m);
    for k in sample(&mut rng, pairs, m).into_iter() {
        let (i, j) = unrank_pair(k, n);
        edges.extend([(i, j, 1.0), (j, i, 1.0)]);
    }
    crate::graph::build_graph(n, &edges, LoopPolicy::Loopless, false, false)
}

/// `k`-th pair `(i, j)`, `i < j`, in row-major order of the upper triangle.
fn unrank_pair(mut k: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    while k >= n - 1 - i {
        k -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub reps: usize,
    /// Skip dense-storage timings above this order.
    pub dense_max_n: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { reps: 100, dense_max_n: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteTiming {
    /// Mean seconds with dense storage (LU factorization and solve).
    pub dense_seconds: Option<f64>,
    /// Mean seconds with sparse storage (GMRES).
    pub sparse_seconds: f64,
    pub best_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub nnz_a: usize,
    pub nnz_b: usize,
    pub alpha: f64,
    pub reps: usize,
    pub direct: RouteTiming,
    pub complement: RouteTiming,
    pub faster: Route,
    pub same_ranking: bool,
    /// Kendall tau between the two routes' vectors; robust to the tie
    /// classification differences that make `same_ranking` fail on graphs
    /// with exact structural ties.
    pub tau: f64,
}

fn mean_time<F: FnMut() -> Result<Vec<f64>>>(reps: usize, mut f: F) -> Result<(f64, Vec<f64>)> {
    let out = f()?;
    let clock = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(f()?);
    }
    Ok((clock.elapsed().as_secs_f64() / reps as f64, out))
}

fn time_route(m: &SparseMatrix, s: f64, opts: &BenchOptions) -> Result<(RouteTiming, Vec<f64>)> {
    let n = m.n_rows();
    let e = vec![1.0; n];
    let iterative = SolveOptions::with_method(SolveMethod::Iterative);
    let (sparse_seconds, v) = mean_time(opts.reps, || solve_shifted(m, s, &e, &iterative))?;
    let dense_seconds = if n <= opts.dense_max_n {
        let dense = DenseMatrix::shifted_identity(m, s);
        let (secs, _) = mean_time(opts.reps, || Ok(LuFactor::factor(dense.clone())?.solve(&e)))?;
        Some(secs)
    } else {
        None
    };
    let best_seconds = dense_seconds.map_or(sparse_seconds, |d| d.min(sparse_seconds));
    Ok((RouteTiming { dense_seconds, sparse_seconds, best_seconds }, v))
}

/// Times `(I - alpha A)^{-1} e` against `(I + s B)^{-1} e` at
/// `alpha = 0.9 / rho(A)`, after one untimed warm-up run per variant.
/// Only unweighted graphs are supported.
pub fn bench_routes(g: &Graph, opts: &BenchOptions) -> Result<BenchReport> {
    if g.is_weighted() {
        return Err(Error::invalid("bench_routes expects an unweighted graph"));
    }
    if opts.reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    let b = complement_unweighted(g)?.into_adjacency();
    let view = ComplementView::unweighted(b.clone(), g.loop_policy())?;
    let a = g.adjacency();
    let spectral = SpectralOptions::default();
    let est = if b.nnz() < a.nnz() {
        spectral_radius(|v, out| view.matvec_into(v, out), g.n(), &spectral)
    } else {
        spectral_radius(|v, out| a.mul_vec_into(v, out), g.n(), &spectral)
    };
    let rho = est.validation_radius();
    if !(rho > 0.0) {
        return Err(Error::invalid("bench_routes needs a graph with at least one edge"));
    }
    let alpha = 0.9 / rho;
    let s = alpha / (1.0 - alpha * view.diagonal_shift());
    let (direct, w) = time_route(a, -alpha, opts)?;
    let (complement, v0) = time_route(&b, s, opts)?;
    let faster = if complement.best_seconds < direct.best_seconds { Route::Complement } else { Route::Direct };
    Ok(BenchReport {
        n: g.n(),
        nnz_a: a.nnz(),
        nnz_b: b.nnz(),
        alpha,
        reps: opts.reps,
        same_ranking: same_ranking(&w, &v0)?,
        tau: tau_or_one(&w, &v0)?,
        direct,
        complement,
        faster,
    })
}
