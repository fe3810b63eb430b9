use super::{Graph, LoopPolicy, SparseMatrix, WeightScale};
use crate::error::{Error, Result};

/// Weighted complement entries at or below this magnitude are dropped.
pub const DEFAULT_DUST_TOL: f64 = 1e-14;

/// Dense nonnegative matrix held implicitly as
/// `A = e * u^T + diagonal_shift * I - B` with `B` sparse.
///
/// The left rank-one factor is always the all-ones vector. Products with
/// `A` cost `O(n + nnz(B))` and `A` is never materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementView {
    u: Vec<f64>,
    diagonal_shift: f64,
    sparse_part: SparseMatrix,
}

impl ComplementView {
    /// General constructor. Checks dimensions, `u >= 0`, and that every
    /// reconstructed entry of `A` is nonnegative up to rounding.
    pub fn new(u: Vec<f64>, diagonal_shift: f64, sparse_part: SparseMatrix) -> Result<Self> {
        let n = u.len();
        if n == 0 {
            return Err(Error::invalid("complement view needs at least one node"));
        }
        if sparse_part.n_rows() != n || sparse_part.n_cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: sparse_part.n_rows() });
        }
        if let Some(k) = u.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        if u.iter().any(|&x| x < 0.0) {
            return Err(Error::invalid("rank-one vector u must be nonnegative"));
        }
        let view = Self { u, diagonal_shift, sparse_part };
        let tol = view.zero_tol();
        for (i, j, _) in view.sparse_part.iter() {
            if view.entry(i, j) < -tol {
                return Err(Error::invalid(format!(
                    "complement entry ({i}, {j}) exceeds the rank-one term; reconstructed A would be negative"
                )));
            }
        }
        for i in 0..n {
            if view.u[i] + diagonal_shift < -tol {
                return Err(Error::invalid("diagonal shift makes A negative"));
            }
        }
        Ok(view)
    }

    /// View of an unweighted graph from its complement adjacency:
    /// `A = ee^T - B` with loops, `A = ee^T - I - B` without.
    pub fn unweighted(b: SparseMatrix, loop_policy: LoopPolicy) -> Result<Self> {
        let n = b.n_rows();
        let shift = match loop_policy {
            LoopPolicy::WithLoops => 0.0,
            LoopPolicy::Loopless => -1.0,
        };
        Self::new(vec![1.0; n], shift, b)
    }

    /// `A = e u^T - B`.
    pub fn weighted_loops(b: SparseMatrix, u: Vec<f64>) -> Result<Self> {
        Self::new(u, 0.0, b)
    }

    /// `A = omega (ee^T - I) - B`.
    pub fn weighted_loopless(b: SparseMatrix, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        let n = b.n_rows();
        Self::new(vec![omega; n], -omega, b)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Right rank-one factor `u`.
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn diagonal_shift(&self) -> f64 {
        self.diagonal_shift
    }

    pub fn sparse_part(&self) -> &SparseMatrix {
        &self.sparse_part
    }

    fn zero_tol(&self) -> f64 {
        let scale = self.u.iter().copied().fold(self.diagonal_shift.abs(), f64::max);
        1e-12 * scale.max(f64::MIN_POSITIVE)
    }

    /// Reconstructed entry `A_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let shift = if i == j { self.diagonal_shift } else { 0.0 };
        self.u[j] + shift - self.sparse_part.get(i, j)
    }

    /// `out = A v` computed as `e (u^T v) + shift v - B v`.
    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n();
        assert_eq!(v.len(), n);
        assert_eq!(out.len(), n);
        let uv: f64 = self.u.iter().zip(v).map(|(a, b)| a * b).sum();
        self.sparse_part.mul_vec_into(v, out);
        let shift = self.diagonal_shift;
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = uv + shift * vi - *o;
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        let mut out = vec![0.0; self.n()];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// Row-major dense `A`. Intended for checks at small sizes.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.entry(i, j));
            }
        }
        out
    }

    /// Number of structurally nonzero entries of `A`, counted without
    /// materializing it.
    pub fn dense_nnz(&self) -> usize {
        let tol = self.zero_tol();
        let positive_cols = self.u.iter().filter(|&&x| x > tol).count();
        let mut count = 0usize;
        for i in 0..self.n() {
            let (cols, _) = self.sparse_part.row(i);
            let mut row_count = positive_cols;
            let mut diag_stored = false;
            for &j in cols {
                diag_stored |= j == i;
                if self.u[j] > tol {
                    row_count -= 1;
                }
                if self.entry(i, j) > tol {
                    row_count += 1;
                }
            }
            if !diag_stored && self.u[i] > tol && self.u[i] + self.diagonal_shift <= tol {
                row_count -= 1;
            }
            count += row_count;
        }
        count
    }

    /// Whether `A` is irreducible (its graph is strongly connected), decided
    /// in `O(n + nnz(B))` by searching the complement.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n();
        if n == 1 {
            return true;
        }
        let tol = self.zero_tol();
        if self.u.iter().any(|&x| x <= tol) {
            // a zero column of A has no incoming edges
            return false;
        }
        let forward = self.reach_all(&self.sparse_part, false, tol);
        if !forward {
            return false;
        }
        let bt = self.sparse_part.transpose();
        self.reach_all(&bt, true, tol)
    }

    /// Breadth-first search over the edges of `A` (or `A^T` when
    /// `transposed`) using the complement-graph trick: a node's unvisited
    /// neighbours are everything except its blocked (zero) positions.
    fn reach_all(&self, rows: &SparseMatrix, transposed: bool, tol: f64) -> bool {
        let n = self.n();
        let mut unvisited: Vec<usize> = (1..n).collect();
        let mut queue = vec![0usize];
        let mut stamp = vec![usize::MAX; n];
        while let Some(i) = queue.pop() {
            let (cols, _) = rows.row(i);
            for &j in cols {
                let a = if transposed { self.entry(j, i) } else { self.entry(i, j) };
                if a <= tol {
                    stamp[j] = i;
                }
            }
            unvisited.retain(|&j| {
                if stamp[j] == i {
                    true
                } else {
                    queue.push(j);
                    false
                }
            });
            if unvisited.is_empty() {
                return true;
            }
        }
        unvisited.is_empty()
    }
}

/// Complement of an unweighted graph: `ee^T - A` with loops, `ee^T - I - A`
/// without. Applying it twice returns the original graph.
pub fn complement_unweighted(g: &Graph) -> Result<Graph> {
    if g.is_weighted() {
        return Err(Error::invalid("complement_unweighted requires an unweighted graph"));
    }
    let n = g.n();
    let adj = g.adjacency();
    let loopless = g.loop_policy() == LoopPolicy::Loopless;
    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::with_capacity(g.max_edges() - g.edge_count());
    for i in 0..n {
        let (cols, _) = adj.row(i);
        let mut present = cols.iter().peekable();
        for j in 0..n {
            if present.peek() == Some(&&j) {
                present.next();
                continue;
            }
            if loopless && i == j {
                continue;
            }
            col_indices.push(j);
        }
        row_offsets.push(col_indices.len());
    }
    let values = vec![1.0; col_indices.len()];
    let b = SparseMatrix::from_csr(n, n, row_offsets, col_indices, values)?;
    Graph::from_adjacency(b, g.loop_policy(), false, g.is_directed())
}

/// Weighted complement with the default dust tolerance.
pub fn complement_weighted(g: &Graph, scale: &WeightScale) -> Result<(Graph, ComplementView)> {
    complement_weighted_with_tol(g, scale, DEFAULT_DUST_TOL)
}

/// Weighted complement.
///
/// With loops the complement weight of `(i, j)` is `u_j - w(i, j)`; without
/// loops it is `omega - w(i, j)` off the diagonal, where `omega` is the
/// largest weight. Entries with magnitude `<= dust_tol` are dropped.
pub fn complement_weighted_with_tol(
    g: &Graph,
    scale: &WeightScale,
    dust_tol: f64,
) -> Result<(Graph, ComplementView)> {
    let n = g.n();
    if scale.u.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: scale.u.len() });
    }
    let adj = g.adjacency();
    let loopless = g.loop_policy() == LoopPolicy::Loopless;
    let omega = scale.max_weight();
    if loopless && !(omega > 0.0) {
        return Err(Error::EmptyGraph);
    }
    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    let mut dense_row = vec![0.0; n];
    for i in 0..n {
        let (cols, vals) = adj.row(i);
        for (&j, &w) in cols.iter().zip(vals) {
            dense_row[j] = w;
        }
        for j in 0..n {
            if loopless && i == j {
                continue;
            }
            let top = if loopless { omega } else { scale.u[j] };
            let b = top - dense_row[j];
            if b < -dust_tol.max(1e-12 * top) {
                return Err(Error::invalid(format!(
                    "weight of ({i}, {j}) exceeds the column maximum in the supplied scale"
                )));
            }
            if b > dust_tol {
                col_indices.push(j);
                values.push(b);
            }
        }
        for &j in cols {
            dense_row[j] = 0.0;
        }
        row_offsets.push(values.len());
    }
    let b = SparseMatrix::from_csr(n, n, row_offsets, col_indices, values)?;
    let directed = g.is_directed() || !b.is_symmetric();
    let view = if loopless {
        ComplementView::weighted_loopless(b.clone(), omega)?
    } else {
        ComplementView::weighted_loops(b.clone(), scale.u.clone())?
    };
    let graph = Graph::from_adjacency(b, g.loop_policy(), true, directed)?;
    Ok((graph, view))
}
