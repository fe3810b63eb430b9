mod common;

use common::*;
use densekatz::graph::{complement_unweighted, ComplementView, LoopPolicy};
use densekatz::katz::{
    eigenvector_centrality_resolvent, eigenvector_centrality_view, gamma_scalar, katz, katz_complement, katz_direct, katz_negative_series_check, ComplementMode, KatzOptions,
    KatzParams, KatzRoute, PowerOptions, Route,
};
use densekatz::linalg::{solve_shifted, spectral_radius, SolveMethod, SolveOptions, SpectralOptions};
use densekatz::Error;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn direct_and_complement_match_oracle(
        n in 2usize..16, p in 0.05f64..1.0, seed: u64, m in 0usize..4, directed: bool, frac in 0.05f64..0.95,
    ) {
        let g = random_graph(&mut rng(seed), n, p, ALL_MODES[m], directed);
        let a = dense(g.adjacency());
        let rho = oracle_rho(&a);
        prop_assume!(!is_nilpotent(g.adjacency()));
        let t = frac / rho;
        let want = oracle_katz(&a, t);
        let opts = KatzOptions::default();

        let direct = katz_direct(&g, t, &opts).unwrap();
        prop_assert!(max_rel_err(&direct.v, &want) <= 1e-9);

        let (b, scale) = complement_of(&g);
        let comp = katz_complement(&b, t, ALL_MODES[m], scale.as_ref(), &opts).unwrap();
        prop_assert_eq!(comp.route, Route::Complement);
        prop_assert!(max_rel_err(&comp.rescaled(), &want) <= 1e-8);
        prop_assert!(comp.v.iter().all(|&x| x > 0.0));
        let denominator = comp.certificate("denominator").unwrap();
        prop_assert!(denominator > 0.0);
        let sum: f64 = comp.v.iter().sum();
        match ALL_MODES[m] {
            ComplementMode::UnweightedLoops => {
                let gamma = comp.certificate("gamma").unwrap();
                prop_assert!((gamma - sum).abs() <= 1e-12 * sum);
                prop_assert!((denominator - (1.0 - t * gamma)).abs() <= 1e-12);
            }
            ComplementMode::UnweightedLoopless | ComplementMode::WeightedLoopless => {
                prop_assert!((comp.certificate("chi").unwrap() - sum).abs() <= 1e-12 * sum);
            }
            ComplementMode::WeightedLoops => prop_assert!(comp.certificate("u_dot_v0").is_some()),
        }
    }

    #[test]
    fn routes_agree_on_ranking(n in 2usize..16, p in 0.05f64..1.0, seed: u64, m in 0usize..4, frac in 0.05f64..0.9) {
        let g = random_graph(&mut rng(seed), n, p, ALL_MODES[m], true);
        let rho = oracle_rho(&dense(g.adjacency()));
        prop_assume!(!is_nilpotent(g.adjacency()));
        let opts = KatzOptions::default();
        let mut params = KatzParams::new(frac / rho);
        params.route = KatzRoute::Direct;
        let direct = katz(&g, &params, &opts).unwrap();
        params.route = KatzRoute::ComplementForced;
        let comp = katz(&g, &params, &opts).unwrap();
        prop_assert!(max_rel_err(&comp.rescaled(), &direct.v) <= 1e-8);
    }

    #[test]
    fn out_of_range_parameter_is_rejected(n in 2usize..12, p in 0.2f64..1.0, seed: u64, frac in 1.0f64..3.0) {
        let g = random_graph(&mut rng(seed), n, p, ComplementMode::UnweightedLoopless, false);
        prop_assume!(!is_nilpotent(g.adjacency()));
        let rho = oracle_rho(&dense(g.adjacency()));
        let err = katz_direct(&g, frac / rho, &KatzOptions::default()).unwrap_err();
        let is_range = matches!(err, Error::ParameterOutOfRange { .. });
        prop_assert!(is_range, "{}", err);
    }

    #[test]
    fn solvers_match_oracle(n in 1usize..40, q in 0.0f64..0.5, seed: u64, frac in -0.9f64..0.9) {
        let bg = random_graph(&mut rng(seed), n, q, ComplementMode::UnweightedLoops, true);
        let b = bg.adjacency();
        let rho_b = oracle_rho(&dense(b));
        let s = if rho_b > 0.0 { frac / rho_b } else { frac };
        let want = oracle_shifted_solve(&dense(b), s);
        let e = vec![1.0; n];
        for method in [SolveMethod::DirectFactorization, SolveMethod::Iterative, SolveMethod::Auto] {
            let x = solve_shifted(b, s, &e, &SolveOptions::with_method(method)).unwrap();
            prop_assert!(max_rel_err(&x, &want) <= 1e-8, "{:?}", method);
        }
    }

    #[test]
    fn spectral_radius_matches_oracle(n in 1usize..20, p in 0.05f64..1.0, seed: u64, m in 0usize..4) {
        let g = random_graph(&mut rng(seed), n, p, ALL_MODES[m], true);
        let a = g.adjacency();
        let want = oracle_rho(&dense(a));
        let est = spectral_radius(|v, out| a.mul_vec_into(v, out), n, &SpectralOptions::default());
        let tol = 1e-7 * want.max(1.0);
        prop_assert!(est.upper_bound >= want - tol);
        prop_assert!(est.validation_radius() >= want - tol);
        if est.converged {
            prop_assert!((est.rho - want).abs() <= tol, "{} vs {}", est.rho, want);
        }
    }

    #[test]
    fn gamma_is_the_sum_of_the_solve(n in 1usize..30, q in 0.0f64..0.5, seed: u64, t in 0.0f64..2.0) {
        let bg = random_graph(&mut rng(seed), n, q, ComplementMode::UnweightedLoops, false);
        let b = bg.adjacency();
        let want: f64 = oracle_shifted_solve(&dense(b), t).iter().sum();
        let gamma = gamma_scalar(b, t, &SolveOptions::default()).unwrap();
        prop_assert!((gamma - want).abs() <= 1e-9 * want.abs().max(1.0));
    }
}

#[test]
fn alternating_series_converges_to_the_solve() {
    let mut r = rng(11);
    for _ in 0..20 {
        let bg = random_graph(&mut r, 30, 0.15, ComplementMode::UnweightedLoops, true);
        let b = bg.adjacency();
        let rho_b = oracle_rho(&dense(b));
        if rho_b == 0.0 {
            continue;
        }
        let t = 0.5 / rho_b;
        let want = oracle_shifted_solve(&dense(b), t);
        let errors: Vec<f64> = [2, 4, 8, 16]
            .iter()
            .map(|&k| {
                let (even, odd) = katz_negative_series_check(b, t, k);
                let diff: Vec<f64> = even.iter().zip(&odd).map(|(a, b)| a - b).collect();
                max_rel_err(&diff, &want)
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[1] <= pair[0] || pair[1] < 1e-14, "{errors:?}");
        }
        assert!(errors[3] < 1e-3, "{errors:?}");
    }
}

#[test]
fn power_iteration_matches_symmetric_oracle() {
    let mut r = rng(12);
    let mut checked = 0;
    while checked < 20 {
        let policy = if checked % 2 == 0 { LoopPolicy::WithLoops } else { LoopPolicy::Loopless };
        let mode = ComplementMode::of(false, policy);
        let g = random_graph(&mut r, 25, 0.6, mode, false);
        let b = complement_unweighted(&g).unwrap().into_adjacency();
        let view = ComplementView::unweighted(b.clone(), policy).unwrap();
        if !view.is_irreducible() {
            continue;
        }
        let res = eigenvector_centrality_view(&view, &PowerOptions::default(), |_, _| {}).unwrap();
        let (rho, perron) = oracle_perron_symmetric(&dense(g.adjacency()));
        assert!(max_rel_err(&res.v, &perron) <= 1e-7);
        assert!((res.certificate("rho").unwrap() - rho).abs() <= 1e-8 * rho);
        assert!(res.certificate("max_normalization_error").unwrap() <= 1e-12);

        // the resolvent shares the Perron ordering whenever rho(B) < rho(A)
        if oracle_rho(&dense(&b)) < rho {
            let resolvent = eigenvector_centrality_resolvent(&b, rho, policy, &SolveOptions::default()).unwrap();
            let max = perron.iter().fold(0.0f64, |m, x| m.max(*x));
            for i in 0..25 {
                for j in 0..25 {
                    if perron[i] - perron[j] > 1e-8 * max {
                        assert!(resolvent.v[i] > resolvent.v[j]);
                    }
                }
            }
        }
        checked += 1;
    }
}

#[test]
fn katz_approaches_eigenvector_ranking() {
    let mut r = rng(13);
    for _ in 0..10 {
        let g = random_graph(&mut r, 30, 0.5, ComplementMode::UnweightedLoopless, false);
        let a = dense(g.adjacency());
        let (rho, perron) = oracle_perron_symmetric(&a);
        let view = ComplementView::unweighted(complement_unweighted(&g).unwrap().into_adjacency(), LoopPolicy::Loopless)
            .unwrap();
        if !view.is_irreducible() {
            continue;
        }
        let t = (1.0 - 1e-6) / rho;
        let opts = KatzOptions { rho_hint: Some(rho), ..KatzOptions::default() };
        let v = katz_direct(&g, t, &opts).unwrap().v;
        let max = perron.iter().fold(0.0f64, |m, x| m.max(*x));
        for i in 0..30 {
            for j in 0..30 {
                if perron[i] - perron[j] > 1e-4 * max {
                    assert!(v[i] > v[j], "pair ({i}, {j})");
                }
            }
        }
    }
}

#[test]
fn path_graph_examples() {
    let p3 = densekatz::build_graph(3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)], LoopPolicy::Loopless, false, false)
        .unwrap();
    let opts = KatzOptions::default();
    let v = katz(&p3, &KatzParams::new(0.5), &opts).unwrap().rescaled();
    for (x, want) in v.iter().zip([3.0, 4.0, 3.0]) {
        assert!((x - want).abs() < 1e-12);
    }
    let err = katz_direct(&p3, 2.0, &opts).unwrap_err();
    assert!(err.to_string().contains("t exceeds 1/rho(A)"), "{err}");
}
