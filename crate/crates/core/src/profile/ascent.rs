//! Gradient ascent on `ln ||f||_p - ln max_s ||lambda(s)f - f||_p`.
//!
//! The max is replaced by a log-sum-exp with sharpness `tau`, raised in
//! stages. Steps grow on success and halve on failure; iterates are kept
//! with `max |f| = 1` and the sentinel slot pinned at zero.

use super::domain::{signed_pow, Domain};

const STAGES: [f64; 4] = [20.0, 100.0, 500.0, 2500.0];
const MIN_STEP: f64 = 1e-10;

pub(crate) struct AscentRun {
    pub f: Vec<f64>,
    /// Exact `ln max_form` of `f`.
    pub log_value: f64,
    pub converged: bool,
}

/// Exact `ln(||f||_p / max_s ||lambda(s)f - f||_p)`.
pub(crate) fn log_ratio(domain: &Domain, f: &[f64], p: f64) -> f64 {
    let norm = domain.norm_pow(f, p).ln() / p;
    let top = domain.grad_pows(f, p).into_iter().fold(0.0, f64::max);
    norm - top.ln() / p
}

fn smoothed(domain: &Domain, f: &[f64], p: f64, tau: f64) -> (f64, Vec<f64>, f64) {
    let norm_pow = domain.norm_pow(f, p);
    let grads = domain.grad_pows(f, p);
    let logs: Vec<f64> = grads.iter().map(|&g| g.ln() / p).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|&l| (tau * (l - top)).exp()).sum::<f64>().ln() / tau;
    (norm_pow.ln() / p - lse, grads, norm_pow)
}

fn scale_to_unit_max(f: &mut [f64]) {
    let m = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        f.iter_mut().for_each(|x| *x /= m);
    }
}

pub(crate) fn ascend(domain: &Domain, p: f64, mut f: Vec<f64>, max_iter: usize) -> AscentRun {
    let dim = domain.dim;
    f[dim] = 0.0;
    scale_to_unit_max(&mut f);
    let mut best = f.clone();
    let mut best_value = log_ratio(domain, &f, p);
    if !best_value.is_finite() {
        return AscentRun { f, log_value: best_value, converged: false };
    }
    let mut iter = 0usize;
    let mut converged = true;
    let mut trial = domain.zeros();
    for &tau in &STAGES {
        let mut step = 0.05;
        let (mut value, mut grads, mut norm_pow) = smoothed(domain, &f, p, tau);
        loop {
            if iter >= max_iter {
                converged = false;
                break;
            }
            iter += 1;
            // Ascent direction of the smoothed objective.
            let top = grads.iter().map(|&g| g.ln()).fold(f64::NEG_INFINITY, f64::max) / p;
            let weights: Vec<f64> = grads.iter().map(|&g| (tau * (g.ln() / p - top)).exp()).collect();
            let wsum: f64 = weights.iter().sum();
            let mut dir = domain.zeros();
            for (i, d) in dir[..dim].iter_mut().enumerate() {
                *d = signed_pow(f[i], p - 1.0) / norm_pow;
            }
            for (s, (&w, &g)) in weights.iter().zip(&grads).enumerate() {
                if w > 0.0 && g > 0.0 {
                    domain.add_grad_pow(s, &f, p, -w / (wsum * p * g), &mut dir);
                }
            }
            let dmax = dir.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if dmax == 0.0 || !dmax.is_finite() {
                break;
            }
            loop {
                for i in 0..dim {
                    trial[i] = f[i] + step * dir[i] / dmax;
                }
                trial[dim] = 0.0;
                let (v, _, _) = smoothed(domain, &trial, p, tau);
                if v.is_finite() && v > value {
                    std::mem::swap(&mut f, &mut trial);
                    scale_to_unit_max(&mut f);
                    (value, grads, norm_pow) = smoothed(domain, &f, p, tau);
                    step = (step * 1.5).min(1.0);
                    break;
                }
                step *= 0.5;
                if step < MIN_STEP {
                    break;
                }
            }
            if step < MIN_STEP {
                break;
            }
            let exact = log_ratio(domain, &f, p);
            if exact > best_value {
                best_value = exact;
                best.copy_from_slice(&f);
            }
        }
        if !converged {
            break;
        }
    }
    AscentRun { f: best, log_value: best_value, converged }
}
