//! Small dense helpers: scaled l^p norms and a cyclic Jacobi eigensolver.

/// `||x||_p` computed as `M * (sum |x_i / M|^p)^(1/p)` with `M = max |x_i|`.
pub fn lp_norm(values: impl IntoIterator<Item = f64> + Clone, p: f64) -> f64 {
    let max = values.clone().into_iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    let sum: f64 = values.into_iter().map(|x| (x.abs() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// `(sum a_i^p)^(1/p)` for nonnegative terms, scaled like [`lp_norm`].
pub fn lp_combine(terms: &[f64], p: f64) -> f64 {
    lp_norm(terms.iter().copied(), p)
}

/// Symmetric matrix stored row-major, `n x n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column `k` (stored as `vectors[k]`) is the unit eigenvector of `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations until the off-diagonal mass is below `1e-14` of
/// the Frobenius norm (or 100 sweeps).
pub fn jacobi_eigen(m: &SymMatrix) -> Eigen {
    let n = m.n;
    let mut a = m.clone();
    let mut v = SymMatrix::identity(n);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    Eigen {
        values: order.iter().map(|&i| a.get(i, i)).collect(),
        vectors: order.iter().map(|&k| (0..n).map(|i| v.get(i, k)).collect()).collect(),
    }
}

/// Rebuilds `sum_k w_k v_k v_k^T` for the given eigenpairs.
pub fn recompose(eig: &Eigen, weights: &[f64]) -> SymMatrix {
    let n = eig.vectors.first().map_or(0, Vec::len);
    let mut out = SymMatrix::zeros(n);
    for (vec, &w) in eig.vectors.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (i, &vi) in vec.iter().enumerate() {
            let wi = w * vi;
            for (o, &vj) in out.data[i * n..(i + 1) * n].iter_mut().zip(vec) {
                *o += wi * vj;
            }
        }
    }
    out
}
