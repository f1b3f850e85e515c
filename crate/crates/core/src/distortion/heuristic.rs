//! Heuristic low-distortion embeddings of small metrics.
//!
//! With `rho_ij = ln(||x_i - x_j||_p / d_ij)` the distortion is
//! `exp(max rho - min rho)`; we descend on `LSE_beta(rho) + LSE_beta(-rho)`
//! with beta raised in stages, from a classical scaling start and seeded
//! random starts. The returned report is always re-measured on the final
//! points.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{distortion_pairwise, DistortionReport, MetricTable};
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, SymMatrix};

pub const MAX_HEURISTIC_POINTS: usize = 512;

const BETAS: [f64; 6] = [4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0];

#[derive(Clone, Debug)]
pub struct EmbedOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Descent steps per temperature stage.
    pub steps_per_stage: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { seed: 0, restarts: 8, steps_per_stage: 300 }
    }
}

struct Problem<'a> {
    metric: &'a MetricTable,
    p: f64,
    dim: usize,
    pairs: Vec<(usize, usize)>,
}

impl Problem<'_> {
    fn diff<'x>(&self, x: &'x [f64], i: usize, j: usize) -> impl Iterator<Item = f64> + 'x {
        let (a, b) = (&x[i * self.dim..(i + 1) * self.dim], &x[j * self.dim..(j + 1) * self.dim]);
        a.iter().zip(b).map(|(u, v)| u - v)
    }

    fn logs(&self, x: &[f64]) -> Vec<f64> {
        self.pairs
            .iter()
            .map(|&(i, j)| {
                let norm = self.diff(x, i, j).map(|d| d.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p);
                (norm / self.metric.get(i, j)).ln()
            })
            .collect()
    }

    fn objective(&self, rho: &[f64], beta: f64) -> f64 {
        lse(rho, beta) + lse(&rho.iter().map(|r| -r).collect::<Vec<_>>(), beta)
    }

    fn gradient(&self, x: &[f64], rho: &[f64], beta: f64) -> Vec<f64> {
        let up = softmax(rho, beta);
        let down = softmax(&rho.iter().map(|r| -r).collect::<Vec<_>>(), beta);
        let mut g = vec![0.0; x.len()];
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let w = up[k] - down[k];
            if w == 0.0 {
                continue;
            }
            let diff: Vec<f64> = self.diff(x, i, j).collect();
            let np: f64 = diff.iter().map(|d| d.abs().powf(self.p)).sum();
            if np == 0.0 {
                continue;
            }
            for (c, d) in diff.iter().enumerate() {
                // d rho / d x_i = |u|^(p-1) sign(u) / ||u||_p^p
                let gc = w * d.signum() * d.abs().powf(self.p - 1.0) / np;
                g[i * self.dim + c] += gc;
                g[j * self.dim + c] -= gc;
            }
        }
        g
    }
}

fn lse(v: &[f64], beta: f64) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (beta * (x - m)).exp()).sum::<f64>().ln() / beta
}

fn softmax(v: &[f64], beta: f64) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = v.iter().map(|x| (beta * (x - m)).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn spread(rho: &[f64]) -> f64 {
    let max = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

fn descend(prob: &Problem, mut x: Vec<f64>, steps: usize) -> Vec<f64> {
    let mut best = x.clone();
    let mut best_spread = spread(&prob.logs(&x));
    for &beta in &BETAS {
        let mut step = 0.1;
        let mut rho = prob.logs(&x);
        let mut value = prob.objective(&rho, beta);
        for _ in 0..steps {
            let g = prob.gradient(&x, &rho, beta);
            let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax == 0.0 || !gmax.is_finite() {
                break;
            }
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            let mut accepted = false;
            while step > 1e-12 {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * scale * b / gmax).collect();
                let r = prob.logs(&trial);
                let v = prob.objective(&r, beta);
                if v.is_finite() && v < value {
                    x = trial;
                    rho = r;
                    value = v;
                    step = (step * 1.5).min(1.0);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            let s = spread(&rho);
            if s < best_spread {
                best_spread = s;
                best.clone_from(&x);
            }
        }
    }
    best
}

/// Top `dim` principal coordinates of the squared-distance Gram matrix.
fn classical_mds(metric: &MetricTable, dim: usize) -> Vec<f64> {
    let n = metric.len();
    let mut sq = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            sq.set(i, j, metric.get(i, j).powi(2));
        }
    }
    let row: Vec<f64> = (0..n).map(|i| (0..n).map(|j| sq.get(i, j)).sum::<f64>() / n as f64).collect();
    let all = row.iter().sum::<f64>() / n as f64;
    let mut g = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, -0.5 * (sq.get(i, j) - row[i] - row[j] + all));
        }
    }
    let eig = jacobi_eigen(&g);
    let mut x = vec![0.0; n * dim];
    for c in 0..dim.min(n) {
        let k = n - 1 - c;
        let lam = eig.values[k].max(0.0).sqrt();
        for i in 0..n {
            x[i * dim + c] = lam * eig.vectors[k][i];
        }
    }
    x
}

/// Heuristic embedding of `metric` into l^p of dimension `dim`. The report is
/// a valid upper bound for the least distortion.
pub fn optimize_embedding(
    metric: &MetricTable,
    p: f64,
    dim: usize,
    opts: &EmbedOptions,
) -> Result<(Vec<Vec<f64>>, DistortionReport)> {
    let n = metric.len();
    if n > MAX_HEURISTIC_POINTS {
        return Err(Error::cap("points for optimize_embedding", n as u64, MAX_HEURISTIC_POINTS as u64));
    }
    if dim == 0 {
        return Err(Error::BadParam("dim must be at least 1".into()));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::BadParam(format!("exponent p = {p} must lie in [1, inf)")));
    }
    if n < 2 {
        return Err(Error::DegenerateInput("need at least two points".into()));
    }
    let pairs = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let prob = Problem { metric, p, dim, pairs };
    let mut best: Option<(Vec<Vec<f64>>, DistortionReport)> = None;
    for r in 0..opts.restarts.max(1) {
        let x0 = if r == 0 {
            classical_mds(metric, dim)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let x = descend(&prob, x0, opts.steps_per_stage);
        let points: Vec<Vec<f64>> = x.chunks(dim).map(|c| c.to_vec()).collect();
        let Ok(report) = distortion_pairwise(&points, metric, p, None) else { continue };
        if best.as_ref().is_none_or(|(_, b)| report.dist < b.dist) {
            best = Some((points, report));
        }
    }
    best.ok_or_else(|| Error::NoConvergence { what: "optimize_embedding", detail: "every restart collapsed points".into() })
}
