//! Least Euclidean distortion of a small metric.
//!
//! In squared distances the question "is there a Euclidean embedding with
//! `d_ij^2 <= D_ij <= T d_ij^2`" asks whether the box meets the cone
//! `K = {D : x^T D x <= 0 for all x with sum x = 0}`. Alternating projections
//! with Dykstra's correction run inside a bisection on T. Every accepted T is
//! certified by an explicit Gram matrix, so the returned value is attained.

use serde::Serialize;

use super::MetricTable;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, SymMatrix};

pub const MAX_C2_POINTS: usize = 16;

const DYKSTRA_ITERS: usize = 4000;
const CHECK_EVERY: usize = 10;
const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct C2Result {
    /// Distortion of the returned Gram embedding.
    pub c2: f64,
    /// Bisection bracket on the distortion.
    pub lower: f64,
    pub upper: f64,
    /// Gram matrix of the certifying embedding (row-major).
    pub gram: Vec<f64>,
    pub bisections: usize,
}

/// Householder reflector sending the all-ones vector to a multiple of the last axis.
struct Householder {
    v: Vec<f64>,
    vv: f64,
}

impl Householder {
    fn new(n: usize) -> Self {
        let mut v = vec![1.0; n];
        v[n - 1] += (n as f64).sqrt();
        let vv = v.iter().map(|x| x * x).sum();
        Householder { v, vv }
    }

    /// `H A H` for symmetric A.
    fn conjugate(&self, a: &SymMatrix) -> SymMatrix {
        let n = a.n;
        // H A H = A - u v^T - v u^T + c v v^T with u = 2 A v / vv, c = 4 v^T A v / vv^2.
        let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a.get(i, j) * self.v[j]).sum()).collect();
        let vav: f64 = av.iter().zip(&self.v).map(|(x, y)| x * y).sum();
        let c = 4.0 * vav / (self.vv * self.vv);
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let x = a.get(i, j) - 2.0 * (av[i] * self.v[j] + self.v[i] * av[j]) / self.vv + c * self.v[i] * self.v[j];
                out.set(i, j, x);
            }
        }
        out
    }
}

/// Frobenius projection onto K: clip the positive spectrum of the block
/// orthogonal to the ones vector.
fn project_cone(h: &Householder, d: &SymMatrix) -> SymMatrix {
    let n = d.n;
    let mut a = h.conjugate(d);
    let mut block = SymMatrix::zeros(n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            block.set(i, j, a.get(i, j));
        }
    }
    let eig = jacobi_eigen(&block);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let mut s = 0.0;
            for (k, &lam) in eig.values.iter().enumerate() {
                if lam < 0.0 {
                    s += lam * eig.vectors[k][i] * eig.vectors[k][j];
                }
            }
            a.set(i, j, s);
        }
    }
    h.conjugate(&a)
}

fn project_box(d: &SymMatrix, lo: &[f64], hi: &[f64]) -> SymMatrix {
    let mut out = d.clone();
    for i in 0..d.n {
        for j in 0..d.n {
            let k = i * d.n + j;
            out.data[k] = if i == j { 0.0 } else { d.data[k].clamp(lo[k], hi[k]) };
        }
    }
    out
}

/// Gram matrix `-J D J / 2` of a squared-distance-like matrix.
fn gram_of(d: &SymMatrix) -> SymMatrix {
    let n = d.n;
    let nf = n as f64;
    let row: Vec<f64> = (0..n).map(|i| (0..n).map(|j| d.get(i, j)).sum::<f64>() / nf).collect();
    let all: f64 = row.iter().sum::<f64>() / nf;
    let mut g = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, -0.5 * (d.get(i, j) - row[i] - row[j] + all));
        }
    }
    g
}

/// Nearest PSD matrix (clip negative eigenvalues).
fn psd_part(g: &SymMatrix) -> SymMatrix {
    let eig = jacobi_eigen(g);
    let weights: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    crate::linalg::recompose(&eig, &weights)
}

/// Squared distortion of the embedding with Gram matrix g, or None if two
/// points coincide.
fn squared_distortion(g: &SymMatrix, sq: &[f64]) -> Option<f64> {
    let n = g.n;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let e = g.get(i, i) + g.get(j, j) - 2.0 * g.get(i, j);
            if e <= 0.0 {
                return None;
            }
            let r = e / sq[i * n + j];
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Some(hi / lo)
}

/// Tries to certify `T`: returns the squared distortion and Gram matrix of
/// the best certificate seen, starting from `start`.
fn feasible(h: &Householder, sq: &[f64], t: f64, start: &SymMatrix, slack: f64) -> (Option<(f64, SymMatrix)>, SymMatrix) {
    let n = start.n;
    let lo: Vec<f64> = sq.to_vec();
    let hi: Vec<f64> = sq.iter().map(|x| x * t).collect();
    let mut x = project_box(start, &lo, &hi);
    let mut p = SymMatrix::zeros(n);
    let mut q = SymMatrix::zeros(n);
    let mut best: Option<(f64, SymMatrix)> = None;
    for it in 0..DYKSTRA_ITERS {
        let xp = SymMatrix { n, data: x.data.iter().zip(&p.data).map(|(a, b)| a + b).collect() };
        let y = project_cone(h, &xp);
        p.data = xp.data.iter().zip(&y.data).map(|(a, b)| a - b).collect();
        let yq = SymMatrix { n, data: y.data.iter().zip(&q.data).map(|(a, b)| a + b).collect() };
        x = project_box(&yq, &lo, &hi);
        q.data = yq.data.iter().zip(&x.data).map(|(a, b)| a - b).collect();
        if it % CHECK_EVERY == CHECK_EVERY - 1 {
            let g = psd_part(&gram_of(&y));
            if let Some(s) = squared_distortion(&g, sq) {
                if best.as_ref().is_none_or(|(b, _)| s < *b) {
                    best = Some((s, g));
                }
                if s <= t * (1.0 + slack) {
                    return (best, x);
                }
            }
        }
    }
    (best.filter(|(s, _)| *s <= t * (1.0 + slack)), x)
}

/// Least distortion of a Euclidean embedding of `metric`, to within `tol`
/// (relative bracket width `tol^2` on the squared distortion).
pub fn exact_c2(metric: &MetricTable, tol: f64) -> Result<C2Result> {
    let n = metric.len();
    if n > MAX_C2_POINTS {
        return Err(Error::cap("points for exact_c2", n as u64, MAX_C2_POINTS as u64));
    }
    if tol.is_nan() || tol < 1e-6 {
        return Err(Error::BadParam(format!("tol = {tol} must be at least 1e-6")));
    }
    let sq: Vec<f64> = (0..n * n).map(|k| metric.get(k / n, k % n).powi(2)).collect();
    let delta = SymMatrix { n, data: sq.clone() };
    if n <= 2 {
        let g = psd_part(&gram_of(&delta));
        return Ok(C2Result { c2: 1.0, lower: 1.0, upper: 1.0, gram: g.data, bisections: 0 });
    }
    // Already Euclidean?
    let g0 = gram_of(&delta);
    let eig = jacobi_eigen(&g0);
    let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if eig.values[0] >= -1e-12 * scale {
        let g = psd_part(&g0);
        if let Some(s) = squared_distortion(&g, &sq) {
            let c = s.sqrt();
            return Ok(C2Result { c2: c, lower: 1.0, upper: c, gram: g.data, bisections: 0 });
        }
    }
    // Regular simplex: every distance equal.
    let (dmin, dmax) = sq.iter().enumerate().filter(|(k, _)| k / n != k % n).fold((f64::INFINITY, 0.0f64), |(a, b), (_, &x)| (a.min(x), b.max(x)));
    let mut upper = dmax / dmin;
    let mut gram = {
        let mut g = SymMatrix::identity(n);
        g.data.iter_mut().for_each(|x| *x *= 0.5);
        g
    };
    if let Some(s) = squared_distortion(&psd_part(&g0), &sq) {
        if s < upper {
            upper = s;
            gram = psd_part(&g0);
        }
    }
    let h = Householder::new(n);
    let width = tol * tol;
    let slack = width / 4.0;
    let mut lower = 1.0f64;
    let mut start = delta.clone();
    let mut bisections = 0;
    while upper / lower > 1.0 + width {
        if bisections == MAX_BISECTIONS {
            return Err(Error::NoConvergence {
                what: "exact_c2",
                detail: format!("bracket [{}, {}] after {bisections} bisections", lower.sqrt(), upper.sqrt()),
            });
        }
        bisections += 1;
        let mid = (lower * upper).sqrt();
        let (cert, last) = feasible(&h, &sq, mid, &start, slack);
        match cert {
            Some((s, g)) => {
                if s < upper {
                    upper = s;
                    gram = g;
                }
                // The certificate may overshoot mid by the slack; never let the
                // bracket invert.
                if upper <= lower {
                    lower = upper / (1.0 + width);
                }
                start = last;
            }
            None => lower = mid,
        }
    }
    Ok(C2Result { c2: upper.sqrt(), lower: lower.sqrt(), upper: upper.sqrt(), gram: gram.data, bisections })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_is_euclidean() {
        let r = exact_c2(&MetricTable::path(5).unwrap(), 1e-6).unwrap();
        assert!((r.c2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn four_cycle() {
        let r = exact_c2(&MetricTable::cycle(4).unwrap(), 1e-4).unwrap();
        assert!((r.c2 - 2f64.sqrt()).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn three_star() {
        let r = exact_c2(&MetricTable::star(3).unwrap(), 1e-4).unwrap();
        assert!((r.c2 - (4.0f64 / 3.0).sqrt()).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn gram_certifies_value() {
        let m = MetricTable::cycle(5).unwrap();
        let r = exact_c2(&m, 1e-4).unwrap();
        let g = SymMatrix { n: 5, data: r.gram.clone() };
        let sq: Vec<f64> = (0..25).map(|k| m.get(k / 5, k % 5).powi(2)).collect();
        let s = squared_distortion(&g, &sq).unwrap();
        assert!((s.sqrt() - r.c2).abs() < 1e-12);
        assert!(jacobi_eigen(&g).values[0] >= -1e-12);
    }

    #[test]
    fn limits() {
        assert!(matches!(exact_c2(&MetricTable::path(17).unwrap(), 1e-4), Err(Error::CapExceeded { .. })));
        assert!(matches!(exact_c2(&MetricTable::path(4).unwrap(), 1e-7), Err(Error::BadParam(_))));
    }
}
