//! Index form of an open ball for the profile optimizers.
//!
//! Functions live on the open ball `{|x| < r}` (indices `0..dim`, a prefix of
//! the BFS order) plus one trailing sentinel slot that always holds zero and
//! stands for everything outside. For each generator `s` we keep the pairs
//! `(y, s*y)` of the closed ball that touch the open ball; the translation
//! gradient is then `||lambda(s) f - f||_p^p = sum |f[a] - f[b]|^p` over them.

use crate::cayley::BallTable;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Domain {
    pub dim: usize,
    pub radius: u32,
    /// One edge list per generator.
    pub edges: Vec<Vec<(u32, u32)>>,
}

impl Domain {
    pub fn new(ball: &BallTable) -> Result<Self> {
        let radius = ball
            .radius()
            .ok_or_else(|| Error::BadScale("profile balls need an explicit radius".into()))?;
        if radius == 0 {
            return Err(Error::BadScale("radius must be at least 1".into()));
        }
        let group = ball.group();
        let dim = ball.lengths().iter().take_while(|&&l| l < radius).count();
        if ball.is_complete() && dim == ball.len() {
            return Err(Error::BadScale(format!("open ball of radius {radius} is the whole group")));
        }
        let zero = dim as u32;
        let slot = |i: usize| if i < dim { i as u32 } else { zero };
        let mut edges = Vec::with_capacity(group.generators().len());
        for s in group.generators() {
            let mut list = Vec::with_capacity(dim * 2);
            for (i, (x, &l)) in ball.elements().iter().zip(ball.lengths()).enumerate() {
                if l > radius {
                    break;
                }
                let sx = group.mul(s, x)?;
                match ball.index_of(&sx) {
                    Some(j) => {
                        if i < dim || j < dim {
                            list.push((slot(i), slot(j)));
                        }
                    }
                    None => debug_assert!(i >= dim, "left translate of an interior point stays in the closed ball"),
                }
            }
            edges.push(list);
        }
        Ok(Domain { dim, radius, edges })
    }

    /// A zero vector of the right length (with sentinel).
    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.dim + 1]
    }

    /// `||f||_p^p` over the open ball.
    pub fn norm_pow(&self, f: &[f64], p: f64) -> f64 {
        f[..self.dim].iter().map(|&x| abs_pow(x, p)).sum()
    }

    /// `||lambda(s) f - f||_p^p` for each generator.
    pub fn grad_pows(&self, f: &[f64], p: f64) -> Vec<f64> {
        self.edges
            .iter()
            .map(|list| list.iter().map(|&(a, b)| abs_pow(f[a as usize] - f[b as usize], p)).sum())
            .collect()
    }

    /// `(sum_s lambda(s)) f` restricted to the open ball; symmetric because
    /// the generating set is closed under inverses.
    pub fn adjacency_apply(&self, f: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for list in &self.edges {
            for &(a, b) in list {
                out[b as usize] += f[a as usize];
            }
        }
        out[self.dim] = 0.0;
    }

    /// Gradient of `||lambda(s) f - f||_p^p` with respect to f, accumulated with weight `w`.
    pub fn add_grad_pow(&self, s: usize, f: &[f64], p: f64, w: f64, out: &mut [f64]) {
        for &(a, b) in &self.edges[s] {
            let d = f[a as usize] - f[b as usize];
            let g = w * p * signed_pow(d, p - 1.0);
            out[a as usize] += g;
            out[b as usize] -= g;
        }
        out[self.dim] = 0.0;
    }
}

#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 3.0 {
        a * a * a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}

/// `|x|^q sign(x)`, zero at zero.
#[inline]
pub(crate) fn signed_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if q == 1.0 {
        x
    } else if q == 0.0 {
        x.signum()
    } else if q == 2.0 {
        x * x.abs()
    } else {
        x.signum() * x.abs().powf(q)
    }
}
