mod common;

use common::tau_pairs;
use densekatz::{kendall_tau, rank, same_ranking};
use proptest::prelude::*;

/// Vectors with deliberately repeated values so ties occur often.
fn scores(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0u8..6, 0u8..255].prop_map(|k| k as f64 / 4.0), 2..max_len)
}

fn paired(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    scores(max_len).prop_flat_map(|a| {
        let n = a.len();
        (Just(a), prop::collection::vec((0u8..8).prop_map(|k| k as f64), n))
    })
}

fn non_constant(v: &[f64]) -> bool {
    v.iter().any(|&x| x != v[0])
}

proptest! {
    #[test]
    fn ranking_is_invariant_under_positive_scaling(v in scores(40), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert_eq!(rank(&v).unwrap().order, rank(&scaled).unwrap().order);
        prop_assert!(same_ranking(&v, &scaled).unwrap());
    }

    #[test]
    fn ranking_orders_descending_with_id_tiebreak(v in scores(40)) {
        let r = rank(&v).unwrap();
        prop_assert_eq!(r.order.len(), v.len());
        for w in r.order.windows(2) {
            let (i, j) = (w[0], w[1]);
            prop_assert!(v[i] > v[j] || (v[i] == v[j] && i < j));
        }
        let pos = r.positions();
        for (p, &node) in r.order.iter().enumerate() {
            prop_assert_eq!(pos[node], p);
        }
    }

    #[test]
    fn tau_matches_pairwise_oracle((a, b) in paired(60)) {
        prop_assume!(non_constant(&a) && non_constant(&b));
        let fast = kendall_tau(&a, &b).unwrap();
        prop_assert_eq!(fast, tau_pairs(&a, &b));
        prop_assert!((-1.0..=1.0).contains(&fast));
    }

    #[test]
    fn tau_is_symmetric((a, b) in paired(60)) {
        prop_assume!(non_constant(&a) && non_constant(&b));
        prop_assert_eq!(kendall_tau(&a, &b).unwrap(), kendall_tau(&b, &a).unwrap());
    }

    #[test]
    fn tau_of_a_vector_with_itself_is_one(a in scores(60)) {
        prop_assume!(non_constant(&a));
        prop_assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        let reversed: Vec<f64> = a.iter().map(|x| -x).collect();
        prop_assert_eq!(kendall_tau(&a, &reversed).unwrap(), -1.0);
    }

    #[test]
    fn tau_is_invariant_under_monotone_maps((a, b) in paired(60)) {
        prop_assume!(non_constant(&a) && non_constant(&b));
        let mapped: Vec<f64> = a.iter().map(|x| (x + 1.0).ln() * 3.0 + 7.0).collect();
        prop_assert_eq!(kendall_tau(&a, &b).unwrap(), kendall_tau(&mapped, &b).unwrap());
    }
}

#[test]
fn tau_examples() {
    assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    // one tie in each input
    let t = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]).unwrap();
    assert!((t - 0.5).abs() < 1e-15);
    assert!(kendall_tau(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    assert!(kendall_tau(&[1.0, 2.0], &[1.0]).is_err());
}
