use std::io::Write;
use std::path::Path;
use std::time::Instant;

use densekatz::experiment::{
    bench_routes, run_random_experiment, run_sufficiency_experiment, synthetic_dense_graph, synthetic_sparse_graph,
    BenchOptions, BenchReport, EpsilonRule, ExperimentConfig,
};
use densekatz::graph::{complement_unweighted, complement_weighted};
use densekatz::io::{
    correlation_to_adjacency, matrix_market_string, read_correlation_csv, read_edge_list, render_result,
    CorrelationMode, CorrelationOptions, EdgeFormat, OutputFormat, ReadOptions, ResultRecord,
};
use densekatz::katz::{
    complement_nnz, eigenvector_centrality_resolvent, eigenvector_centrality_view, katz, katz_complement, katz_direct,
    PowerOptions,
};
use densekatz::linalg::spectral_radius;
use densekatz::threshold::{check_sufficient, sparsify, tau_sweep, CheckOptions, ThresholdVariant, Verdict};
use densekatz::{
    kendall_tau, same_ranking, ComplementMode, ComplementView, Error, Graph, KatzOptions, KatzParams, KatzRoute,
    LoopPolicy, SolveOptions, SparseMatrix, SpectralOptions, WeightScale,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Katz(a) => cmd_katz(&a),
        Command::Eig(a) => cmd_eig(&a),
        Command::Complement(a) => cmd_complement(&a),
        Command::Threshold(a) => cmd_threshold(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::ExperimentRandom(a) => cmd_experiment_random(&a),
        Command::ExperimentSufficiency(a) => cmd_experiment_sufficiency(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

impl Loops {
    fn policy(self) -> LoopPolicy {
        match self {
            Loops::With => LoopPolicy::WithLoops,
            Loops::Without => LoopPolicy::Loopless,
        }
    }
}

impl ComplementOf {
    fn policy(self) -> LoopPolicy {
        match self {
            ComplementOf::Loops => LoopPolicy::WithLoops,
            ComplementOf::Loopless => LoopPolicy::Loopless,
        }
    }
}

impl From<OutputFormatArg> for OutputFormat {
    fn from(f: OutputFormatArg) -> Self {
        match f {
            OutputFormatArg::Json => OutputFormat::Json,
            OutputFormatArg::Csv => OutputFormat::Csv,
        }
    }
}

fn infer_format(path: &Path, given: Option<InputFormat>) -> CliResult<InputFormat> {
    if let Some(f) = given {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("mtx") => Ok(InputFormat::Mtx),
        Some("tsv") | Some("txt") | Some("edges") => Ok(InputFormat::Tsv),
        Some("csv") => Ok(InputFormat::Csv),
        _ => Err(CliError::usage(format!("cannot infer the format of {}; pass --format", path.display()))),
    }
}

struct Source<'a> {
    path: &'a Path,
    format: Option<InputFormat>,
    loops: Loops,
    weighted: bool,
    directed: bool,
    eta: f64,
    absolute: bool,
    inclusive: bool,
}

impl<'a> From<&'a GraphArgs> for Source<'a> {
    fn from(a: &'a GraphArgs) -> Self {
        Self {
            path: &a.input,
            format: a.format,
            loops: a.loops,
            weighted: a.weighted,
            directed: a.directed,
            eta: a.eta,
            absolute: a.absolute,
            inclusive: a.inclusive,
        }
    }
}

fn load(src: &Source) -> CliResult<Graph> {
    let loop_policy = src.loops.policy();
    let edge_format = match infer_format(src.path, src.format)? {
        InputFormat::Mtx => EdgeFormat::MatrixMarket,
        InputFormat::Tsv => EdgeFormat::Tsv,
        InputFormat::Csv => {
            let c = read_correlation_csv(src.path)?;
            let mode = if src.weighted { CorrelationMode::Weighted } else { CorrelationMode::Unweighted };
            let opts = CorrelationOptions { loop_policy, strict: !src.inclusive, absolute: src.absolute };
            return Ok(correlation_to_adjacency(&c, src.eta, mode, &opts)?);
        }
    };
    let opts = ReadOptions { loop_policy, weighted: src.weighted, directed: src.directed };
    Ok(read_edge_list(src.path, edge_format, &opts)?)
}

fn load_graph(a: &GraphArgs) -> CliResult<Graph> {
    load(&Source::from(a))
}

/// Reads a complement given on input; only unweighted classes can be
/// reassembled without extra data.
fn load_complement(a: &GraphArgs, of: ComplementOf) -> CliResult<(SparseMatrix, ComplementView)> {
    if a.weighted {
        return Err(CliError::usage("--complement-of needs an unweighted complement"));
    }
    let g = load(&Source { loops: Loops::With, ..Source::from(a) })?;
    let b = g.into_adjacency();
    let view = ComplementView::unweighted(b.clone(), of.policy())?;
    Ok((b, view))
}

/// Complement adjacency, weight scale (weighted graphs only) and implicit view.
fn complement_parts(g: &Graph) -> CliResult<(SparseMatrix, Option<WeightScale>, ComplementView)> {
    if g.is_weighted() {
        let scale = WeightScale::of(g);
        let (bg, view) = complement_weighted(g, &scale)?;
        Ok((bg.into_adjacency(), Some(scale), view))
    } else {
        let b = complement_unweighted(g)?.into_adjacency();
        let view = ComplementView::unweighted(b.clone(), g.loop_policy())?;
        Ok((b, None, view))
    }
}

fn radius_of<F: Fn(&[f64], &mut [f64])>(apply: F, n: usize) -> f64 {
    let est = spectral_radius(apply, n, &SpectralOptions::default());
    if est.converged {
        est.rho
    } else {
        est.upper_bound.max(est.rho)
    }
}

/// `rho(A)` through whichever of `A` and its complement is sparser.
fn graph_radius(g: &Graph) -> CliResult<f64> {
    if complement_nnz(g) < g.edge_count() {
        let (_, _, view) = complement_parts(g)?;
        Ok(radius_of(|v, out| view.matvec_into(v, out), g.n()))
    } else {
        let a = g.adjacency();
        Ok(radius_of(|v, out| a.mul_vec_into(v, out), g.n()))
    }
}

/// The Katz parameter and, for `--t-frac`, the radius it was derived from.
fn resolve_t<F: FnOnce() -> CliResult<f64>>(p: &ParamArgs, rho: F) -> CliResult<(f64, Option<f64>)> {
    match (p.t, p.t_frac) {
        (Some(t), None) => Ok((t, None)),
        (None, Some(frac)) => {
            if !(frac > 0.0) || !frac.is_finite() {
                return Err(CliError::usage(format!("--t-frac must be positive, got {frac}")));
            }
            let rho = rho()?;
            if !(rho > 0.0) {
                return Err(CliError::usage("--t-frac needs a graph with rho(A) > 0"));
            }
            Ok((frac / rho, Some(rho)))
        }
        _ => Err(CliError::usage("pass exactly one of --t and --t-frac")),
    }
}

fn write_text(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_record<R: ResultRecord>(record: &R, out: &OutputArgs) -> CliResult<()> {
    write_text(&render_result(record, out.output_format.into()), out.output.as_deref())
}

fn emit(value: &Value, csv: impl FnOnce() -> String, out: &OutputArgs) -> CliResult<()> {
    let text = match out.output_format {
        OutputFormatArg::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
            s.push('\n');
            s
        }
        OutputFormatArg::Csv => csv(),
    };
    write_text(&text, out.output.as_deref())
}

/// Kendall tau, taken as 1 when both vectors are constant.
fn tau(a: &[f64], b: &[f64]) -> CliResult<f64> {
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if a.len() < 2 || (constant(a) && constant(b)) {
        return Ok(1.0);
    }
    Ok(kendall_tau(a, b)?)
}

fn cmd_katz(a: &KatzArgs) -> CliResult<()> {
    let opts = KatzOptions::default();
    let clock = Instant::now();
    let (mut result, nnz_label) = match a.complement_of {
        Some(of) => {
            if a.route == RouteArg::Direct {
                return Err(CliError::usage("--route direct needs the graph itself, not its complement"));
            }
            let (b, view) = load_complement(&a.graph, of)?;
            let (t, rho_hint) = resolve_t(&a.param, || Ok(radius_of(|v, out| view.matvec_into(v, out), view.n())))?;
            let mode = ComplementMode::of(false, of.policy());
            let r = katz_complement(&b, t, mode, None, &KatzOptions { rho_hint, ..opts })?;
            (r, format!("nnz(B) = {}", b.nnz()))
        }
        None => {
            let g = load_graph(&a.graph)?;
            let (t, rho_hint) = resolve_t(&a.param, || graph_radius(&g))?;
            let route = match a.route {
                RouteArg::Direct => KatzRoute::Direct,
                RouteArg::Complement => KatzRoute::ComplementForced,
                RouteArg::Auto => KatzRoute::ComplementAuto,
            };
            let r = katz(&g, &KatzParams { t, route, rho_hint }, &opts)?;
            let label = match r.route {
                densekatz::Route::Direct => format!("nnz(A) = {}", g.edge_count()),
                _ => format!("nnz(B) = {}", complement_nnz(&g)),
            };
            (r, label)
        }
    };
    let elapsed = clock.elapsed().as_secs_f64();
    if a.rescale {
        result.v = result.rescaled();
    }
    eprintln!("route: {}, {nnz_label}, time: {elapsed:.6} s", result.route.as_str());
    emit_record(&result, &a.output)
}

fn cmd_eig(a: &EigArgs) -> CliResult<()> {
    let (b, view, policy, weighted) = match a.complement_of {
        Some(of) => {
            let (b, view) = load_complement(&a.graph, of)?;
            (b, view, of.policy(), false)
        }
        None => {
            let g = load_graph(&a.graph)?;
            let (b, _, view) = complement_parts(&g)?;
            (b, view, g.loop_policy(), g.is_weighted())
        }
    };
    let clock = Instant::now();
    let result = match a.method {
        EigMethod::Power => {
            let opts = PowerOptions { tol: a.tol, max_iter: a.max_iter, ..PowerOptions::default() };
            eigenvector_centrality_view(&view, &opts, |_, _| {})?
        }
        EigMethod::Resolvent => {
            if weighted {
                return Err(CliError::usage("--method resolvent supports unweighted graphs only"));
            }
            if !view.is_irreducible() {
                return Err(Error::NoConvergence("graph is not strongly connected, so its Perron vector is not unique".into()).into());
            }
            let rho = radius_of(|v, out| view.matvec_into(v, out), view.n());
            eigenvector_centrality_resolvent(&b, rho, policy, &SolveOptions::default())?
        }
    };
    eprintln!(
        "route: {}, nnz(B) = {}, time: {:.6} s",
        result.route.as_str(),
        b.nnz(),
        clock.elapsed().as_secs_f64()
    );
    emit_record(&result, &a.output)
}

fn cmd_complement(a: &ComplementArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (b, scale, _) = complement_parts(&g)?;
    match scale {
        Some(s) => eprintln!("nnz(A) = {}, nnz(B) = {}, max weight = {:e}", g.edge_count(), b.nnz(), s.max_weight()),
        None => eprintln!("nnz(A) = {}, nnz(B) = {}", g.edge_count(), b.nnz()),
    }
    write_text(&matrix_market_string(&b), a.output.as_deref())
}

fn cmd_threshold(a: &ThresholdArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    if !g.is_weighted() {
        return Err(CliError::usage("threshold needs a weighted graph (--weighted)"));
    }
    let (b, _, _) = complement_parts(&g)?;
    let thr = sparsify(&b, a.epsilon)?;
    eprintln!(
        "epsilon = {:e}, dropped {} of {} entries, density {:.4} -> {:.4}, sparsity {:.2}%",
        a.epsilon,
        thr.dropped_count,
        b.nnz(),
        thr.density_before,
        thr.density_after,
        100.0 * thr.sparsity()
    );
    write_text(&matrix_market_string(&thr.b0), a.output.as_deref())
}

fn cmd_check(a: &CheckArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (b, _, view) = complement_parts(&g)?;
    let (t, rho_hint) = resolve_t(&a.param, || Ok(radius_of(|v, out| view.matvec_into(v, out), g.n())))?;
    let thr = sparsify(&b, a.epsilon)?;
    let variant = match g.loop_policy() {
        LoopPolicy::WithLoops => ThresholdVariant::WithLoops,
        LoopPolicy::Loopless => ThresholdVariant::Loopless,
    };
    let mut opts = CheckOptions::default();
    opts.katz.rho_hint = rho_hint;
    let report = check_sufficient(&g, &b, &thr.b0, a.epsilon, t, variant, &opts)?;
    let verdict = match report.verdict {
        Verdict::Certified => "certified",
        Verdict::Uncertified => "uncertified",
    };
    eprintln!(
        "{verdict}: epsilon = {:e}, bound with c = {:e}, bound with e = {:e}, sparsity {:.2}%",
        a.epsilon,
        report.rhs_c,
        report.rhs_e,
        100.0 * thr.sparsity()
    );
    emit_record(&report, &a.output)
}

fn cmd_compare(a: &CompareArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let (b, scale, view) = complement_parts(&g)?;
    let (t, rho_hint) = resolve_t(&a.param, || Ok(radius_of(|v, out| view.matvec_into(v, out), g.n())))?;
    let rho = rho_hint.unwrap_or_else(|| radius_of(|v, out| view.matvec_into(v, out), g.n()));
    let opts = KatzOptions { rho_hint: Some(rho), ..KatzOptions::default() };
    let mode = ComplementMode::of(g.is_weighted(), g.loop_policy());

    let clock = Instant::now();
    let direct = katz_direct(&g, t, &opts)?;
    let direct_seconds = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let comp = katz_complement(&b, t, mode, scale.as_ref(), &opts)?;
    let complement_seconds = clock.elapsed().as_secs_f64();
    let route_tau = tau(&direct.v, &comp.v)?;
    let same = same_ranking(&direct.v, &comp.v)?;
    let sweep = if a.epsilon.is_empty() {
        Vec::new()
    } else {
        tau_sweep(&b, &comp.v, t, mode, scale.as_ref(), &a.epsilon, &opts)?
    };
    eprintln!(
        "direct {direct_seconds:.6} s (nnz(A) = {}), complement {complement_seconds:.6} s (nnz(B) = {}), tau = {route_tau}",
        g.edge_count(),
        b.nnz()
    );
    let value = json!({
        "n": g.n(),
        "t": t,
        "rho": rho,
        "nnz_a": g.edge_count(),
        "nnz_b": b.nnz(),
        "same_ranking": same,
        "tau": route_tau,
        "direct_seconds": direct_seconds,
        "complement_seconds": complement_seconds,
        "sweep": sweep,
    });
    let csv = || {
        let mut s = String::from("comparison,epsilon,tau,density\n");
        s.push_str(&format!("complement,,{route_tau:?},{:?}\n", b.density()));
        for p in &sweep {
            s.push_str(&format!("thresholded,{:?},{:?},{:?}\n", p.epsilon, p.tau, p.density));
        }
        s
    };
    emit(&value, csv, &a.output)
}

fn cmd_experiment_random(a: &ExperimentRandomArgs) -> CliResult<()> {
    let config = ExperimentConfig {
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        epsilon_rule: EpsilonRule::Fixed(a.epsilon),
        t_rule: a.t_frac,
    };
    let report = run_random_experiment(&config)?;
    eprintln!(
        "size {}: mean tau {:.4}, min tau {:.4}, mean density of B0 {:.4}, mean thresholded solve {:.6} s",
        report.size, report.mean_tau, report.min_tau, report.mean_density_b0, report.timing.mean_thresholded_seconds
    );
    let value = serde_json::to_value(&report).map_err(Error::from)?;
    let csv = || {
        let mut s = String::from("trial,tau\n");
        for (k, tau) in report.taus.iter().enumerate() {
            s.push_str(&format!("{k},{tau:?}\n"));
        }
        s
    };
    emit(&value, csv, &a.output)
}

fn rule_label(rule: &EpsilonRule) -> String {
    match rule {
        EpsilonRule::Fixed(e) => format!("fixed:{e:?}"),
        EpsilonRule::Power(k) => format!("power:{k}"),
    }
}

fn cmd_experiment_sufficiency(a: &ExperimentSufficiencyArgs) -> CliResult<()> {
    let mut rules: Vec<EpsilonRule> = a.powers.iter().map(|&k| EpsilonRule::Power(k)).collect();
    rules.extend(a.epsilon.iter().map(|&e| EpsilonRule::Fixed(e)));
    if rules.is_empty() {
        return Err(CliError::usage("no thresholds given"));
    }
    let config = ExperimentConfig { n: a.n, trials: 1, seed: a.seed, epsilon_rule: rules[0], t_rule: a.t_frac };
    let report = run_sufficiency_experiment(&config, &rules)?;
    for row in &report.rows {
        eprintln!(
            "{}: epsilon {:.3e}, sparsity {:.1}%, bound {:.3e}, {}",
            rule_label(&row.rule),
            row.epsilon,
            100.0 * row.sparsity,
            row.rhs_c,
            if row.certified { "certified" } else { "uncertified" }
        );
    }
    let value = serde_json::to_value(&report).map_err(Error::from)?;
    let csv = || {
        let mut s = String::from("rule,epsilon,sparsity,rhs_c,rhs_e,certified,cond_e_ok\n");
        for r in &report.rows {
            s.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{},{}\n",
                rule_label(&r.rule),
                r.epsilon,
                r.sparsity,
                r.rhs_c,
                r.rhs_e,
                r.certified,
                r.cond_e_ok
            ));
        }
        s
    };
    emit(&value, csv, &a.output)
}

fn bench_csv(r: &BenchReport) -> String {
    let secs = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:?}"));
    let rows = [
        ("n", r.n.to_string()),
        ("nnz_a", r.nnz_a.to_string()),
        ("nnz_b", r.nnz_b.to_string()),
        ("alpha", format!("{:?}", r.alpha)),
        ("reps", r.reps.to_string()),
        ("direct_dense_seconds", secs(r.direct.dense_seconds)),
        ("direct_sparse_seconds", format!("{:?}", r.direct.sparse_seconds)),
        ("direct_best_seconds", format!("{:?}", r.direct.best_seconds)),
        ("complement_dense_seconds", secs(r.complement.dense_seconds)),
        ("complement_sparse_seconds", format!("{:?}", r.complement.sparse_seconds)),
        ("complement_best_seconds", format!("{:?}", r.complement.best_seconds)),
        ("faster", r.faster.as_str().to_string()),
        ("same_ranking", r.same_ranking.to_string()),
        ("tau", format!("{:?}", r.tau)),
    ];
    let mut s = String::from("field,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let g = match &a.input {
        Some(path) => load(&Source {
            path,
            format: a.format,
            loops: a.loops,
            weighted: false,
            directed: false,
            eta: a.eta,
            absolute: false,
            inclusive: false,
        })?,
        None => match a.synthetic {
            Synthetic::Dense => synthetic_dense_graph(a.n, a.seed)?,
            Synthetic::Sparse => synthetic_sparse_graph(a.n, a.seed)?,
        },
    };
    let report = bench_routes(&g, &BenchOptions { reps: a.reps, dense_max_n: a.dense_max_n })?;
    eprintln!(
        "n = {}, nnz(A) = {}, nnz(B) = {}: direct {:.6} s, complement {:.6} s, faster: {}",
        report.n,
        report.nnz_a,
        report.nnz_b,
        report.direct.best_seconds,
        report.complement.best_seconds,
        report.faster.as_str()
    );
    let value = serde_json::to_value(&report).map_err(Error::from)?;
    emit(&value, || bench_csv(&report), &a.output)
}
