//! Restarted Lanczos for the top eigenpair of a symmetric operator.

use crate::linalg::{jacobi_eigen, SymMatrix};

pub(crate) struct TopEigen {
    pub vector: Vec<f64>,
    pub value: f64,
    pub residual: f64,
    pub matvecs: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Algebraically largest eigenpair of `apply` on `R^dim`, restarting from the
/// current Ritz vector every `krylov` steps. Converged when
/// `||A x - theta x|| <= tol * max(1, |theta|)`.
pub(crate) fn top_eigenpair(
    dim: usize,
    start: Vec<f64>,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    tol: f64,
    max_matvecs: usize,
    krylov: usize,
) -> TopEigen {
    let mut x = start;
    normalize(&mut x);
    let mut w = vec![0.0; dim];
    let mut matvecs = 0usize;
    let mut best = TopEigen { vector: x.clone(), value: f64::NAN, residual: f64::INFINITY, matvecs: 0, converged: false };
    loop {
        let m = krylov.min(dim).max(1);
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Full reorthogonalisation, twice.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
                }
            }
            if j + 1 == m {
                break;
            }
            let b = normalize(&mut w);
            if b <= 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }
        let k = alpha.len();
        let mut t = SymMatrix::zeros(k);
        for i in 0..k {
            t.set(i, i, alpha[i]);
            if i + 1 < k {
                t.set(i, i + 1, beta[i]);
                t.set(i + 1, i, beta[i]);
            }
        }
        let eig = jacobi_eigen(&t);
        let theta = eig.values[k - 1];
        let y = &eig.vectors[k - 1];
        let mut ritz = vec![0.0; dim];
        for (c, v) in y.iter().zip(&basis) {
            ritz.iter_mut().zip(v).for_each(|(r, vi)| *r += c * vi);
        }
        normalize(&mut ritz);
        apply(&ritz, &mut w);
        matvecs += 1;
        let residual = w.iter().zip(&ritz).map(|(a, r)| (a - theta * r).powi(2)).sum::<f64>().sqrt();
        if residual < best.residual {
            best = TopEigen { vector: ritz.clone(), value: theta, residual, matvecs, converged: false };
        }
        best.matvecs = matvecs;
        if residual <= tol * theta.abs().max(1.0) {
            best.converged = true;
            return best;
        }
        if matvecs >= max_matvecs {
            return best;
        }
        x = ritz;
    }
}
