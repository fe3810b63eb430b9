//! Compressed-sparse-row storage.

use crate::error::{Error, Result};

/// Real matrix in compressed-sparse-row form.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds from raw CSR arrays, validating every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_rows + 1,
                got: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() || row_offsets[n_rows] != values.len() || row_offsets[0] != 0 {
            return Err(Error::invalid("inconsistent CSR array lengths"));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::invalid("row offsets must be nondecreasing"));
            }
            let cols = &col_indices[lo..hi];
            for (k, &j) in cols.iter().enumerate() {
                if j >= n_cols {
                    return Err(Error::IndexOutOfRange { index: j, n: n_cols });
                }
                if k > 0 && cols[k - 1] >= j {
                    return Err(Error::invalid(format!(
                        "column indices in row {i} are not strictly increasing"
                    )));
                }
            }
            for (k, &v) in values[lo..hi].iter().enumerate() {
                if v == 0.0 {
                    return Err(Error::invalid(format!("explicit zero stored at ({i}, {})", cols[k])));
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite(lo + k));
                }
            }
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Builds from `(row, col, value)` triplets. Zero values are skipped;
    /// repeated positions are an error.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n_rows {
                return Err(Error::IndexOutOfRange { index: i, n: n_rows });
            }
            if j >= n_cols {
                return Err(Error::IndexOutOfRange { index: j, n: n_cols });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(entries.len()));
            }
            entries.push((i, j, v));
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            if v == 0.0 {
                continue;
            }
            row_offsets[i + 1] += 1;
            col_indices.push(j);
            values.push(v);
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Builds from a row-major dense array, dropping entries with
    /// `|a_ij| <= drop_tol`.
    pub fn from_dense(n_rows: usize, n_cols: usize, data: &[f64], drop_tol: f64) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch { expected: n_rows * n_cols, got: data.len() });
        }
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for (i, row) in data.chunks_exact(n_cols.max(1)).take(n_rows).enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(i * n_cols + j));
                }
                if v.abs() > drop_tol && v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        while row_offsets.len() < n_rows + 1 {
            row_offsets.push(values.len());
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Fraction of stored entries among all `n_rows * n_cols` positions.
    pub fn density(&self) -> f64 {
        let total = self.n_rows * self.n_cols;
        if total == 0 {
            0.0
        } else {
            self.nnz() as f64 / total as f64
        }
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `out = self * v` without allocation. Panics on dimension mismatch.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n_cols);
        assert_eq!(out.len(), self.n_rows);
        for (i, o) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * v[self.col_indices[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch { expected: self.n_cols, got: v.len() });
        }
        let mut out = vec![0.0; self.n_rows];
        self.mul_vec_into(v, &mut out);
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.iter() {
            let slot = next[j];
            col_indices[slot] = i;
            values[slot] = v;
            next[j] += 1;
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows * self.n_cols];
        for (i, j, v) in self.iter() {
            out[i * self.n_cols + j] = v;
        }
        out
    }

    /// Largest stored value in each column, 0 for columns with no entries.
    pub fn column_max(&self) -> Vec<f64> {
        let mut u = vec![0.0f64; self.n_cols];
        for (_, j, v) in self.iter() {
            if v > u[j] {
                u[j] = v;
            }
        }
        u
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    /// Keeps the entries for which `keep(i, j, value)` holds.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(usize, usize, f64) -> bool,
    {
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if keep(i, j, v) {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self { n_rows: self.n_rows, n_cols: self.n_cols, row_offsets, col_indices, values }
    }

    /// Multiplies every stored value by `factor` (which must be nonzero).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor != 0.0 && factor.is_finite());
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.transpose() == *self
    }

    pub fn has_nonzero_diagonal(&self) -> bool {
        (0..self.n_rows.min(self.n_cols)).any(|i| self.get(i, i) != 0.0)
    }
}
