//! Dense oracles and random instance generators shared by the integration
//! tests. The oracles use nalgebra only, never the crate's own solvers.

#![allow(dead_code)]

use densekatz::graph::{build_graph, complement_unweighted, complement_weighted, Graph, LoopPolicy, WeightScale};
use densekatz::katz::ComplementMode;
use densekatz::SparseMatrix;
use nalgebra::{DMatrix, DVector, Dyn, Schur, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.n_rows(), m.n_cols(), &m.to_dense())
}

/// Spectral radius of a nonnegative matrix from a symmetric eigensolve or a
/// real Schur decomposition.
///
/// The unshifted Schur iteration can stall on periodic matrices; the Perron
/// root satisfies `rho(M + I) = rho(M) + 1`, so the shifted matrix is tried
/// next.
pub fn oracle_rho(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    if pattern_is_acyclic(m) {
        return 0.0;
    }
    if m == &m.transpose() {
        return SymmetricEigen::new(m.clone()).eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    }
    let radius = |schur: Schur<f64, Dyn>| schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, 100_000) {
        return radius(schur);
    }
    let shifted = m + DMatrix::identity(n, n);
    let schur = Schur::try_new(shifted, f64::EPSILON, 100_000).expect("oracle Schur decomposition converges");
    radius(schur) - 1.0
}

/// True when `m` has no cycles, that is `m^n = 0`.
pub fn is_nilpotent(m: &SparseMatrix) -> bool {
    pattern_is_acyclic(&dense(m))
}

/// Kahn's algorithm on the nonzero pattern of `m`.
fn pattern_is_acyclic(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    let mut indegree: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| m[(i, j)] != 0.0).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut removed = 0;
    while let Some(i) = stack.pop() {
        removed += 1;
        for j in (0..n).filter(|&j| m[(i, j)] != 0.0) {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                stack.push(j);
            }
        }
    }
    removed == n
}

/// `(I + s M)^{-1} e` by nalgebra's LU.
pub fn oracle_shifted_solve(m: &DMatrix<f64>, s: f64) -> Vec<f64> {
    let n = m.nrows();
    let sys = DMatrix::identity(n, n) + m * s;
    let x = sys.lu().solve(&DVector::from_element(n, 1.0)).expect("oracle system is nonsingular");
    x.iter().copied().collect()
}

/// Katz vector `(I - tA)^{-1} e`.
pub fn oracle_katz(a: &DMatrix<f64>, t: f64) -> Vec<f64> {
    oracle_shifted_solve(a, -t)
}

/// Perron vector of a symmetric nonnegative matrix with unit 1-norm.
pub fn oracle_perron_symmetric(a: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let k = eig.eigenvalues.imax();
    let col = eig.eigenvectors.column(k);
    let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
    let s = col.sum() * sign;
    (eig.eigenvalues[k], col.iter().map(|x| sign * x / s).collect())
}

pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| ((x - y) / y.abs().max(f64::MIN_POSITIVE)).abs()).fold(0.0, f64::max)
}

/// Random graph of the given class with edge probability `p`; weights are
/// uniform on `(0, 1]`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, mode: ComplementMode, directed: bool) -> Graph {
    let loops = mode.loop_policy() == LoopPolicy::WithLoops;
    let weighted = matches!(mode, ComplementMode::WeightedLoops | ComplementMode::WeightedLoopless);
    let mut edges = Vec::new();
    for i in 0..n {
        let start = if directed { 0 } else { i };
        for j in start..n {
            if i == j && !loops {
                continue;
            }
            if rng.random::<f64>() < p {
                let w = if weighted { 1.0 - rng.random::<f64>() } else { 1.0 };
                edges.push((i, j, w));
                if !directed && i != j {
                    edges.push((j, i, w));
                }
            }
        }
    }
    build_graph(n, &edges, mode.loop_policy(), directed, weighted).unwrap()
}

/// Complement adjacency and weight scale for any of the four classes.
pub fn complement_of(g: &Graph) -> (SparseMatrix, Option<WeightScale>) {
    if g.is_weighted() {
        let scale = WeightScale::of(g);
        let (b, _) = complement_weighted(g, &scale).unwrap();
        (b.into_adjacency(), Some(scale))
    } else {
        (complement_unweighted(g).unwrap().into_adjacency(), None)
    }
}

pub const ALL_MODES: [ComplementMode; 4] = [
    ComplementMode::UnweightedLoops,
    ComplementMode::UnweightedLoopless,
    ComplementMode::WeightedLoops,
    ComplementMode::WeightedLoopless,
];

/// Kendall tau-b by enumerating all pairs, with the same integer counts and
/// final expression as the fast version.
pub fn tau_pairs(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let (mut conc, mut disc, mut ties_a, mut ties_b, mut joint) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i].partial_cmp(&a[j]).unwrap();
            let db = b[i].partial_cmp(&b[j]).unwrap();
            use std::cmp::Ordering::Equal;
            match (da, db) {
                (Equal, Equal) => {
                    ties_a += 1;
                    ties_b += 1;
                    joint += 1;
                }
                (Equal, _) => ties_a += 1,
                (_, Equal) => ties_b += 1,
                (x, y) if x == y => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let pairs = (n as i64) * (n as i64 - 1) / 2;
    let diff = pairs - ties_a - ties_b + joint - 2 * disc;
    debug_assert_eq!(diff, conc - disc);
    diff as f64 / (((pairs - ties_a) as f64) * ((pairs - ties_b) as f64)).sqrt()
}
