//! Distortion of maps into l^p: exact reports for equivariant embeddings and
//! for explicit point sets, a heuristic optimizer, and an exact solver for
//! the least Euclidean distortion of small metrics.

mod heuristic;
mod sdp;

use serde::Serialize;

use crate::cayley::BallTable;
use crate::embed::EmbeddingBundle;
use crate::error::{Error, Result};
use crate::linalg::lp_norm;

pub use heuristic::{optimize_embedding, EmbedOptions};
pub use sdp::{exact_c2, C2Result, MAX_C2_POINTS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    #[serde(rename = "R")]
    pub scale: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub dist: f64,
    pub witness_expand: [String; 2],
    pub witness_contract: [String; 2],
}

/// Symmetric distance matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTable {
    n: usize,
    d: Vec<f64>,
}

impl MetricTable {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality (relative slack 1e-12).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadParam("distance matrix must be square and nonempty".into()));
        }
        let d: Vec<f64> = rows.into_iter().flatten().collect();
        let m = MetricTable { n, d };
        let scale = m.d.iter().copied().fold(0.0, f64::max);
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::DegenerateInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let x = m.get(i, j);
                if i != j && !(x > 0.0 && x.is_finite()) {
                    return Err(Error::DegenerateInput(format!("distance d({i},{j}) = {x} is not positive")));
                }
                if x != m.get(j, i) {
                    return Err(Error::DegenerateInput(format!("asymmetric at ({i},{j})")));
                }
                for k in 0..n {
                    if x > m.get(i, k) + m.get(k, j) + 1e-12 * scale {
                        return Err(Error::DegenerateInput(format!("triangle inequality fails at ({i},{k},{j})")));
                    }
                }
            }
        }
        Ok(m)
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    /// Path on `n` points with unit edges.
    pub fn path(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| i.abs_diff(j) as f64)
    }

    /// Cycle on `n` points with unit edges.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| {
            let k = i.abs_diff(j);
            k.min(n - k) as f64
        })
    }

    /// Star with `leaves` unit edges; point 0 is the centre.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::from_fn(leaves + 1, |i, j| match (i, j) {
            _ if i == j => 0.0,
            (0, _) | (_, 0) => 1.0,
            _ => 2.0,
        })
    }

    /// All distances equal to 1.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    /// Word metric on a complete ball: `d(x,y) = |x^-1 y|`.
    pub fn from_ball(ball: &BallTable) -> Result<Self> {
        let g = ball.group();
        let inv: Vec<_> = ball.elements().iter().map(|x| g.inv(x)).collect::<Result<_>>()?;
        let n = ball.len();
        let mut rows = vec![vec![0.0; n]; n];
        for (row, xi) in rows.iter_mut().zip(&inv) {
            for (d, y) in row.iter_mut().zip(ball.elements()) {
                let z = g.mul(xi, y)?;
                *d = ball.length_of(&z).ok_or(Error::BadScale("ball is not the whole group".into()))? as f64;
            }
        }
        Self::new(rows)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Metric on the points other than `k`.
    pub fn without(&self, k: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        Self::new(keep.iter().map(|&i| keep.iter().map(|&j| self.get(i, j)).collect()).collect())
    }
}

/// Running extremes with ties broken by the lexicographically smaller pair.
struct Extremes {
    expand: (f64, [String; 2]),
    contract: (f64, [String; 2]),
}

impl Extremes {
    fn new() -> Self {
        Extremes { expand: (0.0, Default::default()), contract: (0.0, Default::default()) }
    }

    fn offer(slot: &mut (f64, [String; 2]), ratio: f64, pair: impl FnOnce() -> [String; 2]) {
        if ratio > slot.0 {
            *slot = (ratio, pair());
        } else if ratio == slot.0 {
            let cand = pair();
            if cand < slot.1 {
                slot.1 = cand;
            }
        }
    }

    fn push(&mut self, image: f64, d: f64, pair: impl Fn() -> [String; 2]) {
        Self::offer(&mut self.expand, image / d, &pair);
        Self::offer(&mut self.contract, d / image, &pair);
    }

    fn finish(self, scale: f64) -> Result<DistortionReport> {
        if self.expand.0 == 0.0 {
            return Err(Error::DegenerateInput("no pair within the scale".into()));
        }
        Ok(DistortionReport {
            scale,
            expansion: self.expand.0,
            contraction: self.contract.0,
            dist: self.expand.0 * self.contract.0,
            witness_expand: self.expand.1,
            witness_contract: self.contract.1,
        })
    }
}

/// Distortion of an equivariant embedding at scale R (default: diameter),
/// from `||F(x) - F(y)|| = ||F(x^-1 y)||`: the sups run over `g != e` with
/// `|g| <= R`, and witnesses are pairs `(e, g)`.
pub fn distortion_equivariant(bundle: &EmbeddingBundle, ball: &BallTable, scale: Option<u32>) -> Result<DistortionReport> {
    let group = bundle.group();
    if ball.group().spec() != group.spec() {
        return Err(Error::IncompatibleSpecs(format!("{} vs {}", ball.group().spec().label(), group.spec().label())));
    }
    if !ball.is_complete() {
        return Err(Error::BadScale("ball table must cover the whole group".into()));
    }
    let diameter = ball.max_length();
    let r = scale.unwrap_or(diameter);
    if r > diameter || r == 0 {
        return Err(Error::BadScale(format!("R = {r} must lie in [1, {diameter}]")));
    }
    let norms = bundle.all_norms();
    let e = group.format(&group.identity());
    let mut ext = Extremes::new();
    for (x, &l) in ball.elements().iter().zip(ball.lengths()) {
        if l == 0 || l > r {
            continue;
        }
        let code = group.code(x).expect("finite group") as usize;
        let image = norms[code];
        if image == 0.0 {
            return Err(Error::ZeroNorm(group.format(x)));
        }
        ext.push(image, l as f64, || [e.clone(), group.format(x)]);
    }
    ext.finish(r as f64)
}

/// Brute-force distortion of `points` (compared in l^p) against `metric`
/// over pairs with `0 < d <= scale`. Witnesses are point indices.
pub fn distortion_pairwise(points: &[Vec<f64>], metric: &MetricTable, p: f64, scale: Option<f64>) -> Result<DistortionReport> {
    if points.len() != metric.len() {
        return Err(Error::BadParam(format!("{} points for a {}-point metric", points.len(), metric.len())));
    }
    let r = scale.unwrap_or(f64::INFINITY);
    let mut ext = Extremes::new();
    let mut max_d: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = metric.get(i, j);
            if d > r {
                continue;
            }
            max_d = max_d.max(d);
            let image = lp_norm(points[i].iter().zip(&points[j]).map(|(a, b)| a - b), p);
            if image == 0.0 {
                return Err(Error::DegenerateInput(format!("points {i} and {j} coincide")));
            }
            ext.push(image, d, || [i.to_string(), j.to_string()]);
        }
    }
    ext.finish(if r.is_finite() { r } else { max_d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_into_line_is_isometric() {
        let m = MetricTable::path(6).unwrap();
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let rep = distortion_pairwise(&pts, &m, 2.0, None).unwrap();
        assert_eq!(rep.dist, 1.0);
    }

    #[test]
    fn square_corners() {
        let m = MetricTable::cycle(4).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let rep = distortion_pairwise(&pts, &m, 2.0, None).unwrap();
        assert!((rep.dist - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(rep.witness_contract, ["0".to_string(), "2".to_string()]);
        let scaled: Vec<Vec<f64>> = pts.iter().map(|v| v.iter().map(|x| x * 7.5).collect()).collect();
        let rep2 = distortion_pairwise(&scaled, &m, 2.0, None).unwrap();
        assert!((rep2.dist - rep.dist).abs() < 1e-15);
    }

    #[test]
    fn coincident_points() {
        let m = MetricTable::path(3).unwrap();
        let pts = vec![vec![0.0], vec![1.0], vec![1.0]];
        assert!(matches!(distortion_pairwise(&pts, &m, 2.0, None), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn metric_validation() {
        assert!(MetricTable::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(MetricTable::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(MetricTable::new(bad).is_err());
        assert_eq!(MetricTable::star(3).unwrap().get(1, 2), 2.0);
        assert_eq!(MetricTable::cycle(5).unwrap().get(0, 3), 2.0);
    }
}
