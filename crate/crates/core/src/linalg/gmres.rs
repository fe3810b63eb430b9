//! Restarted GMRES with modified Gram-Schmidt and Givens rotations.

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) struct GmresOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Solves `M x = rhs` in place, starting from the contents of `x`.
///
/// Convergence is judged on the true residual recomputed at every restart.
pub(crate) fn gmres<F>(apply: F, rhs: &[f64], x: &mut [f64], tol: f64, max_iter: usize, restart: usize) -> GmresOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return GmresOutcome { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let m = restart.clamp(1, n.max(1));
    let mut basis: Vec<Vec<f64>> = (0..=m).map(|_| vec![0.0; n]).collect();
    let mut h = vec![0.0; (m + 1) * m];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut work = vec![0.0; n];
    let mut total = 0usize;
    let mut best_rel = f64::INFINITY;
    let mut stalled_restarts = 0usize;

    loop {
        apply(x, &mut work);
        for i in 0..n {
            basis[0][i] = rhs[i] - work[i];
        }
        let beta = norm2(&basis[0]);
        let rel = beta / bnorm;
        if rel <= tol {
            return GmresOutcome { iterations: total, relative_residual: rel, converged: true };
        }
        if total >= max_iter {
            return GmresOutcome { iterations: total, relative_residual: rel, converged: false };
        }
        if rel > 0.9 * best_rel {
            stalled_restarts += 1;
            if stalled_restarts > 5 {
                return GmresOutcome { iterations: total, relative_residual: rel, converged: false };
            }
        } else {
            stalled_restarts = 0;
        }
        best_rel = best_rel.min(rel);
        basis[0].iter_mut().for_each(|v| *v /= beta);
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;

        let mut k_used = 0;
        for k in 0..m {
            let (done, rest) = basis.split_at_mut(k + 1);
            let w = &mut rest[0];
            apply(&done[k], w);
            total += 1;
            for (j, vj) in done.iter().enumerate() {
                let hjk = dot(w, vj);
                h[j * m + k] = hjk;
                for (wi, &vi) in w.iter_mut().zip(vj) {
                    *wi -= hjk * vi;
                }
            }
            // one reorthogonalization pass
            for (j, vj) in done.iter().enumerate() {
                let c = dot(w, vj);
                h[j * m + k] += c;
                for (wi, &vi) in w.iter_mut().zip(vj) {
                    *wi -= c * vi;
                }
            }
            let wnorm = norm2(w);
            h[(k + 1) * m + k] = wnorm;
            if wnorm > 0.0 {
                w.iter_mut().for_each(|v| *v /= wnorm);
            }
            for j in 0..k {
                let a = h[j * m + k];
                let b = h[(j + 1) * m + k];
                h[j * m + k] = cs[j] * a + sn[j] * b;
                h[(j + 1) * m + k] = -sn[j] * a + cs[j] * b;
            }
            let a = h[k * m + k];
            let b = h[(k + 1) * m + k];
            let r = a.hypot(b);
            if r == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = a / r;
                sn[k] = b / r;
            }
            h[k * m + k] = r;
            h[(k + 1) * m + k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            // the estimate is only a guide; the true residual decides
            if g[k + 1].abs() / bnorm <= 0.1 * tol || wnorm == 0.0 || total >= max_iter {
                break;
            }
        }

        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i * m + j] * y[j];
            }
            let d = h[i * m + i];
            y[i] = if d != 0.0 { s / d } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, &vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system() {
        let a = [[4.0, 1.0, 0.0], [2.0, 5.0, 1.0], [0.0, -1.0, 3.0]];
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = (0..3).map(|j| a[i][j] * v[j]).sum();
            }
        };
        let b = [1.0, 2.0, 3.0];
        let mut x = vec![0.0; 3];
        let out = gmres(apply, &b, &mut x, 1e-14, 100, 2);
        assert!(out.converged);
        let mut r = [0.0; 3];
        apply(&x, &mut r);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }
}
