//! Certified lower bounds for the isoperimetric profile in balls.
//!
//! For a finitely supported f, `||f||_p / max_s ||lambda(s)f - f||_p` is a lower
//! bound for the profile at any radius whose open ball contains the support.
//! Left translation is `(lambda(g)f)(x) = f(g^-1 x)`.

mod ascent;
mod domain;
mod lanczos;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::cayley::{bfs_ball, diameter_from_ball, BallTable};
use crate::error::{Error, Result};
use crate::group::{project, Element, Group, GroupSpec};
use crate::linalg::lp_norm;

pub(crate) use domain::Domain;

/// Sparse real function on a group, in a fixed order.
pub type SparseFn = Vec<(Element, f64)>;

#[derive(Clone, Debug)]
pub struct ProfileOptions {
    /// Outer iterations of the smoothed ascent.
    pub max_iter: usize,
    /// Residual tolerance for the p = 2 start vector.
    pub lanczos_tol: f64,
    pub lanczos_max_matvecs: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { max_iter: 500, lanczos_tol: 1e-10, lanczos_max_matvecs: 10_000 }
    }
}

/// A normalized witness: `gradient_max = 1` and `certified_j = ||f||_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestVector {
    pub spec: GroupSpec,
    pub radius: u32,
    pub p: f64,
    pub values: SparseFn,
    pub certified_j: f64,
    pub gradient_max: f64,
    /// False when the start vector or the ascent stopped on its iteration
    /// budget; the certificate is valid either way.
    pub converged: bool,
}

impl TestVector {
    /// JSON object with metadata and an `element -> value` map.
    pub fn to_json(&self, group: &Group) -> serde_json::Value {
        let values: serde_json::Map<String, serde_json::Value> =
            self.values.iter().map(|(x, v)| (group.format(x), serde_json::json!(v))).collect();
        serde_json::json!({
            "group": self.spec.label(),
            "spec": self.spec,
            "radius": self.radius,
            "p": self.p,
            "certified_J": self.certified_j,
            "gradient_max": self.gradient_max,
            "converged": self.converged,
            "values": values,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rayleigh {
    pub norm: f64,
    /// `||lambda(s)f - f||_p` per generator.
    pub gradients: Vec<f64>,
    pub max_form: f64,
    pub sum_form: f64,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::BadParam(format!("exponent p = {p} must lie in [1, inf)")))
    }
}

/// `lambda(s) f`: the value at `s*y` is `f(y)`.
pub fn translate(group: &Group, s: &Element, f: &[(Element, f64)]) -> Result<SparseFn> {
    f.iter().map(|(y, v)| Ok((group.mul(s, y)?, *v))).collect()
}

/// `||lambda(s)f - f||_p`, evaluated on the union of both supports.
fn translation_gradient(group: &Group, s: &Element, f: &[(Element, f64)], p: f64) -> Result<f64> {
    // Slots in first-seen order keep the summation order, and so the last
    // bit of the result, independent of hashing.
    let mut slot: HashMap<Element, usize> = HashMap::with_capacity(2 * f.len());
    let mut diff: Vec<f64> = Vec::with_capacity(2 * f.len());
    let mut add = |x: Element, v: f64| {
        let next = diff.len();
        let i = *slot.entry(x).or_insert(next);
        if i == next {
            diff.push(0.0);
        }
        diff[i] += v;
    };
    for (y, v) in f {
        add(group.mul(s, y)?, *v);
    }
    for (x, v) in f {
        add(x.clone(), -v);
    }
    Ok(lp_norm(diff, p))
}

/// Both Rayleigh quotients of a finitely supported function.
pub fn rayleigh(group: &Group, f: &[(Element, f64)], p: f64) -> Result<Rayleigh> {
    check_p(p)?;
    let norm = lp_norm(f.iter().map(|(_, v)| *v), p);
    let gradients: Vec<f64> =
        group.generators().iter().map(|s| translation_gradient(group, s, f, p)).collect::<Result<_>>()?;
    let max = gradients.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::ZeroGradient);
    }
    let total = lp_norm(gradients.iter().copied(), p);
    Ok(Rayleigh { norm, gradients, max_form: norm / max, sum_form: norm / total })
}

fn dense_to_sparse(ball: &BallTable, dim: usize, f: &[f64]) -> SparseFn {
    ball.elements()[..dim].iter().zip(f).filter(|(_, &v)| v != 0.0).map(|(x, &v)| (x.clone(), v)).collect()
}

fn dirichlet_dense(domain: &Domain, tol: f64, max_matvecs: usize) -> lanczos::TopEigen {
    let dim = domain.dim;
    let mut buf_in = domain.zeros();
    let mut buf_out = domain.zeros();
    // Lanczos vectors cover the interior only; the sentinel slot stays zero.
    let apply = |x: &[f64], y: &mut [f64]| {
        buf_in[..dim].copy_from_slice(x);
        domain.adjacency_apply(&buf_in, &mut buf_out);
        y.copy_from_slice(&buf_out[..dim]);
    };
    let mut res = lanczos::top_eigenpair(dim, vec![1.0; dim], apply, tol, max_matvecs, 60);
    let sum: f64 = res.vector.iter().sum();
    if sum < 0.0 {
        res.vector.iter_mut().for_each(|x| *x = -*x);
    }
    // The operator is entrywise nonnegative and irreducible on the ball, so
    // the top eigenvector is positive; clip rounding noise.
    res.vector.iter_mut().for_each(|x| *x = x.abs());
    res
}

/// Principal vector of `sum_s ||lambda(s)f - f||_2^2` among functions supported
/// in the open ball: the top eigenvector of `sum_s lambda(s)` restricted there.
/// Unit l^2 norm, nonnegative entries.
pub fn dirichlet_pc(ball: &BallTable, tol: f64) -> Result<SparseFn> {
    let domain = Domain::new(ball)?;
    let res = dirichlet_dense(&domain, tol, 10_000);
    if !res.converged {
        return Err(Error::NoConvergence {
            what: "dirichlet_pc",
            detail: format!("residual {:.3e} at eigenvalue {} after {} matvecs", res.residual, res.value, res.matvecs),
        });
    }
    Ok(dense_to_sparse(ball, domain.dim, &res.vector))
}

/// Rescales f so that `max_s ||lambda(s)f - f||_p = 1`, recomputing both
/// sides from the sparse form.
fn certify(group: &Group, radius: u32, p: f64, values: SparseFn, converged: bool) -> Result<TestVector> {
    let r = rayleigh(group, &values, p)?;
    let scale = 1.0 / r.gradients.iter().copied().fold(0.0, f64::max);
    let values: SparseFn = values.into_iter().map(|(x, v)| (x, v * scale)).collect();
    let r = rayleigh(group, &values, p)?;
    Ok(TestVector {
        spec: group.spec().clone(),
        radius,
        p,
        certified_j: r.norm,
        gradient_max: r.gradients.iter().copied().fold(0.0, f64::max),
        values,
        converged,
    })
}

/// Maximizes `||f||_p / max_s ||lambda(s)f - f||_p` over f supported in the
/// open ball of `ball`'s radius, starting from [`dirichlet_pc`]. Never returns
/// less than the dirac value `2^(-1/p)`.
pub fn optimize_profile(ball: &BallTable, p: f64, opts: &ProfileOptions) -> Result<TestVector> {
    let domain = Domain::new(ball)?;
    optimize_from(ball, &domain, p, None, opts)
}

/// As [`optimize_profile`] but starting from `init` (dense, interior order).
pub fn optimize_profile_from(ball: &BallTable, p: f64, init: &[f64], opts: &ProfileOptions) -> Result<TestVector> {
    let domain = Domain::new(ball)?;
    if init.len() != domain.dim {
        return Err(Error::BadParam(format!("start vector has {} entries, ball interior has {}", init.len(), domain.dim)));
    }
    optimize_from(ball, &domain, p, Some(init), opts)
}

fn optimize_from(
    ball: &BallTable,
    domain: &Domain,
    p: f64,
    init: Option<&[f64]>,
    opts: &ProfileOptions,
) -> Result<TestVector> {
    check_p(p)?;
    let group = ball.group();
    let (start, start_ok) = match init {
        Some(v) => (v.to_vec(), true),
        None => {
            let eig = dirichlet_dense(domain, opts.lanczos_tol, opts.lanczos_max_matvecs);
            (eig.vector, eig.converged)
        }
    };
    let mut f = domain.zeros();
    f[..domain.dim].copy_from_slice(&start);
    let run = ascent::ascend(domain, p, f, opts.max_iter);

    let mut dirac = domain.zeros();
    dirac[0] = 1.0;
    let dirac_value = ascent::log_ratio(domain, &dirac, p);
    let (best, converged) = if run.log_value.is_finite() && run.log_value >= dirac_value {
        (run.f, start_ok && run.converged)
    } else {
        (dirac, start_ok && run.converged)
    };
    certify(group, domain.radius, p, dense_to_sparse(ball, domain.dim, &best[..domain.dim]), converged)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub r: u32,
    pub certified_j: f64,
    pub ratio: f64,
    /// True when the vector from a smaller radius was kept.
    pub reused: bool,
}

#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub spec: GroupSpec,
    pub p: f64,
    pub diameter: Option<u32>,
    pub points: Vec<ProfilePoint>,
    /// `max r / certified_J(r)` over `2 <= r <= diam/2`.
    pub c_hat: Option<f64>,
    pub vectors: Vec<TestVector>,
}

impl ProfileCurve {
    /// CSV with columns `r,certified_J,ratio_r_over_J`.
    pub fn csv(&self) -> String {
        let mut out = String::from("r,certified_J,ratio_r_over_J\n");
        for pt in &self.points {
            let _ = writeln!(out, "{},{},{}", pt.r, pt.certified_j, pt.ratio);
        }
        out
    }
}

/// Certified profile values at the given radii (sorted, deduplicated), with
/// each radius keeping the best vector found at any smaller radius.
pub fn profile_curve(
    group: &Group,
    p: f64,
    radii: &[u32],
    opts: &ProfileOptions,
    vertex_cap: usize,
) -> Result<ProfileCurve> {
    check_p(p)?;
    let mut radii = radii.to_vec();
    radii.sort_unstable();
    radii.dedup();
    if radii.is_empty() || radii[0] == 0 {
        return Err(Error::BadScale("radii must be positive and nonempty".into()));
    }
    let diameter = match group.order() {
        Some(order) => {
            let whole = bfs_ball(group, None, vertex_cap)?;
            let d = diameter_from_ball(&whole, order)?.diameter;
            if let Some(&r) = radii.iter().find(|&&r| 2 * r > d) {
                return Err(Error::BadScale(format!("radius {r} exceeds half the diameter {d}")));
            }
            Some(d)
        }
        None => None,
    };
    let mut points = Vec::new();
    let mut vectors: Vec<TestVector> = Vec::new();
    for &r in &radii {
        let ball = bfs_ball(group, Some(r), vertex_cap)?;
        let mut tv = optimize_profile(&ball, p, opts)?;
        let mut reused = false;
        if let Some(prev) = vectors.last() {
            if prev.certified_j > tv.certified_j {
                tv = TestVector { radius: r, ..prev.clone() };
                reused = true;
            }
        }
        points.push(ProfilePoint { r, certified_j: tv.certified_j, ratio: r as f64 / tv.certified_j, reused });
        vectors.push(tv);
    }
    let c_hat = points
        .iter()
        .filter(|pt| pt.r >= 2 && diameter.is_none_or(|d| 2 * pt.r <= d))
        .map(|pt| pt.ratio)
        .reduce(f64::max);
    Ok(ProfileCurve { spec: group.spec().clone(), p, diameter, points, c_hat, vectors })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    /// Every support element has word length below the radius.
    pub support_ok: bool,
    pub gradient_max: f64,
    pub certified_j: f64,
    /// `|recomputed max_form - certified_J| / certified_J`.
    pub relative_error: f64,
}

/// Recomputes a certificate from scratch in `group`.
pub fn check_certificate(tv: &TestVector, group: &Group, vertex_cap: usize) -> Result<CertificateCheck> {
    if group.spec() != &tv.spec {
        return Err(Error::IncompatibleSpecs(format!("{} vs {}", tv.spec.label(), group.spec().label())));
    }
    let ball = bfs_ball(group, Some(tv.radius.saturating_sub(1)), vertex_cap)?;
    let support_ok = tv.values.iter().all(|(x, _)| ball.length_of(x).is_some_and(|l| l < tv.radius));
    let r = rayleigh(group, &tv.values, tv.p)?;
    let gradient_max = r.gradients.iter().copied().fold(0.0, f64::max);
    Ok(CertificateCheck {
        support_ok,
        gradient_max,
        certified_j: r.max_form,
        relative_error: (r.max_form - tv.certified_j).abs() / tv.certified_j,
    })
}

/// Pushes a witness forward along the projection. Fails if two support
/// elements share an image. Values are recomputed in the quotient, not rescaled.
pub fn transport(tv: &TestVector, parent: &Group, quotient: &Group) -> Result<TestVector> {
    let mut seen = HashMap::with_capacity(tv.values.len());
    let mut values = Vec::with_capacity(tv.values.len());
    for (x, v) in &tv.values {
        let y = project(parent, quotient, x)?;
        if seen.insert(y.clone(), ()).is_some() {
            return Err(Error::BadScale(format!("projection is not injective on the support at {}", parent.format(x))));
        }
        values.push((y, *v));
    }
    let r = rayleigh(quotient, &values, tv.p)?;
    Ok(TestVector {
        spec: quotient.spec().clone(),
        radius: tv.radius,
        p: tv.p,
        certified_j: r.max_form,
        gradient_max: r.gradients.iter().copied().fold(0.0, f64::max),
        values,
        converged: tv.converged,
    })
}
