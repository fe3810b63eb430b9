//! Fixtures shared by the benchmarks.

use densekatz::experiment::{synthetic_dense_graph, synthetic_sparse_graph};
use densekatz::graph::complement_unweighted;
use densekatz::linalg::spectral_radius;
use densekatz::{ComplementView, Graph, SparseMatrix, SpectralOptions};

/// A graph, its complement adjacency and `rho(A)`.
pub struct Fixture {
    pub graph: Graph,
    pub b: SparseMatrix,
    pub view: ComplementView,
    pub rho: f64,
}

impl Fixture {
    fn from_graph(graph: Graph) -> Self {
        let b = complement_unweighted(&graph).expect("unweighted complement").into_adjacency();
        let view = ComplementView::unweighted(b.clone(), graph.loop_policy()).expect("valid view");
        let rho = spectral_radius(|v, out| view.matvec_into(v, out), graph.n(), &SpectralOptions::default())
            .validation_radius();
        Self { graph, b, view, rho }
    }

    /// Nearly complete graph on `n` nodes whose complement has about `5n`
    /// entries.
    pub fn dense(n: usize) -> Self {
        Self::from_graph(synthetic_dense_graph(n, 7).expect("n >= 4"))
    }

    /// Graph on `n` nodes with about `5n` entries.
    pub fn sparse(n: usize) -> Self {
        Self::from_graph(synthetic_sparse_graph(n, 7).expect("n >= 4"))
    }

    /// `0.9 / rho(A)`.
    pub fn alpha(&self) -> f64 {
        0.9 / self.rho
    }
}

/// Pseudo-random scores with no ties.
pub fn scores(n: usize, seed: u64) -> Vec<f64> {
    let mut x = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    (0..n)
        .map(|k| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 + k as f64 / n as f64
        })
        .collect()
}
