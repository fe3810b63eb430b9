//! Rankings from centrality vectors and rank-correlation measures.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// Two scores are tied when they differ by at most this fraction of the
/// largest score magnitude.
pub const TIE_RTOL: f64 = 1e-12;

/// Nodes ordered by descending score, ties broken by ascending node id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
    /// Groups of two or more nodes whose scores are indistinguishable,
    /// each sorted by node id, listed in ranking order.
    pub tie_groups: Vec<Vec<usize>>,
}

impl Ranking {
    /// Zero-based position of every node in `order`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &node) in self.order.iter().enumerate() {
            pos[node] = p;
        }
        pos
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(k) => Err(Error::NonFinite(k)),
        None => Ok(()),
    }
}

pub fn rank(v: &[f64]) -> Result<Ranking> {
    check_finite(v)?;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = TIE_RTOL * scale;
    let mut by_score: Vec<usize> = (0..v.len()).collect();
    by_score.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

    let mut order = Vec::with_capacity(v.len());
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < by_score.len() {
        let head = v[by_score[start]];
        let mut end = start + 1;
        while end < by_score.len() && head - v[by_score[end]] <= tol {
            end += 1;
        }
        let mut group = by_score[start..end].to_vec();
        group.sort_unstable();
        order.extend_from_slice(&group);
        if group.len() > 1 {
            tie_groups.push(group);
        }
        start = end;
    }
    Ok(Ranking { order, scores: v.to_vec(), tie_groups })
}

/// Whether two vectors induce the same ranking, including the same ties.
pub fn same_ranking(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let (ra, rb) = (rank(a)?, rank(b)?);
    Ok(ra.order == rb.order && ra.tie_groups == rb.tie_groups)
}

/// Number of tied pairs within runs of equal values of a sorted sequence.
fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> i64 {
    let mut total = 0i64;
    let mut run = 0i64;
    let mut last: Option<T> = None;
    for x in sorted {
        if last.as_ref() == Some(&x) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
        last = Some(x);
    }
    total + run * (run - 1) / 2
}

/// Sorts `idx` by `key` with a stable merge sort and returns the number of
/// inversions (pairs moved past each other).
fn merge_count(idx: &mut [usize], buf: &mut [usize], key: &[f64]) -> i64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = idx.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl, key) + merge_count(r, br, key)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if key[idx[j]] < key[idx[i]] {
            buf[k] = idx[j];
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            buf[k] = idx[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&idx[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&idx[j..n]);
    idx.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-b in `O(n log n)`.
///
/// Ties are exact equalities of the input values. Errors when the lengths
/// differ, when fewer than two values are given, or when either input is
/// constant.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("kendall_tau needs at least two observations"));
    }
    check_finite(a)?;
    check_finite(b)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i].partial_cmp(&a[j]).unwrap().then(b[i].partial_cmp(&b[j]).unwrap()));
    let ties_a = tied_pairs(idx.iter().map(|&i| a[i]));
    let ties_joint = tied_pairs(idx.iter().map(|&i| (a[i], b[i])));

    let mut buf = vec![0usize; n];
    let swaps = merge_count(&mut idx, &mut buf, b);
    let ties_b = tied_pairs(idx.iter().map(|&i| b[i]));

    let pairs = (n as i64) * (n as i64 - 1) / 2;
    if ties_a == pairs || ties_b == pairs {
        return Err(Error::invalid("kendall_tau is undefined for a constant input"));
    }
    let concordant_minus_discordant = pairs - ties_a - ties_b + ties_joint - 2 * swaps;
    let denom = (((pairs - ties_a) as f64) * ((pairs - ties_b) as f64)).sqrt();
    Ok(concordant_minus_discordant as f64 / denom)
}

/// Kendall tau, defined as 1 when both inputs are constant.
pub(crate) fn tau_or_one(a: &[f64], b: &[f64]) -> Result<f64> {
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if !a.is_empty() && constant(a) && constant(b) {
        return Ok(1.0);
    }
    kendall_tau(a, b)
}
