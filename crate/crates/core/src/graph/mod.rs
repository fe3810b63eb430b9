//! Graph data model, weight normalization, and complement construction.

mod complement;
mod sparse;

pub use complement::{
    complement_unweighted, complement_weighted, complement_weighted_with_tol, ComplementView,
    DEFAULT_DUST_TOL,
};
pub use sparse::SparseMatrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopPolicy {
    WithLoops,
    Loopless,
}

/// A finite graph on nodes `0..n` stored as its adjacency matrix.
///
/// Entry `(i, j)` of the adjacency is the weight of edge `i -> j`; absent
/// edges are structural zeros. Unweighted graphs store weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    loop_policy: LoopPolicy,
    weighted: bool,
    directed: bool,
    adj: SparseMatrix,
}

impl Graph {
    /// Wraps an adjacency matrix after checking it against the graph class.
    pub fn from_adjacency(
        adj: SparseMatrix,
        loop_policy: LoopPolicy,
        weighted: bool,
        directed: bool,
    ) -> Result<Self> {
        let n = adj.n_rows();
        if n == 0 {
            return Err(Error::invalid("graph must have at least one node"));
        }
        if !adj.is_square() {
            return Err(Error::DimensionMismatch { expected: n, got: adj.n_cols() });
        }
        for (i, j, w) in adj.iter() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            if !weighted && w != 1.0 {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            if loop_policy == LoopPolicy::Loopless && i == j {
                return Err(Error::LoopNotAllowed(i));
            }
        }
        if !directed {
            let t = adj.transpose();
            if t != adj {
                let (i, j, _) = adj
                    .iter()
                    .find(|&(i, j, v)| t.get(i, j) != v)
                    .or_else(|| t.iter().find(|&(i, j, v)| adj.get(i, j) != v))
                    .expect("asymmetric matrices differ somewhere");
                return Err(Error::Asymmetric(i, j));
            }
        }
        Ok(Self { n, loop_policy, weighted, directed, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loop_policy(&self) -> LoopPolicy {
        self.loop_policy
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adj
    }

    pub fn into_adjacency(self) -> SparseMatrix {
        self.adj
    }

    pub fn edge_count(&self) -> usize {
        self.adj.nnz()
    }

    /// Number of possible edges: `n^2` with loops, `n(n-1)` without.
    pub fn max_edges(&self) -> usize {
        match self.loop_policy {
            LoopPolicy::WithLoops => self.n * self.n,
            LoopPolicy::Loopless => self.n * (self.n - 1),
        }
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj.get(i, j)
    }
}

/// Builds a graph from an edge list.
///
/// For unweighted graphs the supplied weights are ignored and 1 is stored.
/// Undirected graphs must list both directions of every edge.
pub fn build_graph(
    n: usize,
    edges: &[(usize, usize, f64)],
    loop_policy: LoopPolicy,
    directed: bool,
    weighted: bool,
) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("graph must have at least one node"));
    }
    let mut triplets = Vec::with_capacity(edges.len());
    for &(i, j, w) in edges {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        if loop_policy == LoopPolicy::Loopless && i == j {
            return Err(Error::LoopNotAllowed(i));
        }
        let w = if weighted { w } else { 1.0 };
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeight { i, j, weight: w });
        }
        triplets.push((i, j, w));
    }
    let adj = SparseMatrix::from_triplets(n, n, triplets)?;
    Graph::from_adjacency(adj, loop_policy, weighted, directed)
}

/// Column maxima of a weighted adjacency together with the normalization
/// factor that was divided out of the weights.
///
/// `omega` is the largest weight before normalization; `u` holds the column
/// maxima of the graph as it is now. When no rescaling took place the two
/// agree: `omega == max_j u_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScale {
    pub omega: f64,
    pub u: Vec<f64>,
}

impl WeightScale {
    /// Scale of a graph taken as is (no rescaling).
    pub fn of(g: &Graph) -> Self {
        let u = column_max_vector(g);
        let omega = u.iter().copied().fold(0.0, f64::max);
        Self { omega, u }
    }

    /// Largest weight of the graph the `u` vector describes; this is the
    /// `Omega` used by the loopless weighted complement.
    pub fn max_weight(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }
}

/// `u_j = max_i A_ij`, zero for empty columns.
pub fn column_max_vector(g: &Graph) -> Vec<f64> {
    g.adj.column_max()
}

/// Divides all weights by the largest one. Katz rankings are preserved when
/// the parameter is multiplied by the returned `omega`.
pub fn rescale_to_unit_max(g: &Graph) -> Result<(Graph, WeightScale)> {
    let omega = g.adj.max_value().ok_or(Error::EmptyGraph)?;
    let adj = if omega == 1.0 { g.adj.clone() } else { g.adj.scaled(1.0 / omega) };
    let scaled = Graph { adj, weighted: true, ..g.clone() };
    let u = column_max_vector(&scaled);
    Ok((scaled, WeightScale { omega, u }))
}
