//! Equivariant embeddings of finite quotients into l^p.
//!
//! Block k is `coef_k (f_k - lambda(g) f_k)` with `f_k` a profile witness in the
//! open ball of radius `2^k` and `coef_k = 2^k / J_k`; block 0 is the dirac at
//! the identity with coefficient 1. SOL quotients add a planar circle map of
//! the cyclic coordinate. Blocks are combined by an l^p direct sum.

mod circle;

use std::sync::OnceLock;

use serde::Serialize;

use crate::cayley::{bfs_ball, diameter_from_ball};
use crate::error::{Error, Result};
use crate::group::{Element, Family, Group, GroupSpec, SpecParams};
use crate::profile::{check_p, optimize_profile, ProfileOptions, SparseFn, TestVector};

pub use circle::{circle_embed, CircleMap};

/// Largest `|G| * (K+1)` for which coordinates are materialized.
pub const POINT_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub k: u32,
    /// Support lies in the open ball of this radius.
    pub radius: u32,
    pub coef: f64,
    pub certified_j: f64,
    /// `max_s ||f - lambda(s) f||_p` of the stored values.
    pub gradient_max: f64,
    #[serde(skip)]
    pub values: SparseFn,
    /// The witness from the previous block was kept.
    pub reused: bool,
    pub converged: bool,
}

#[derive(Clone, Debug)]
struct DenseBlock {
    codes: Vec<u64>,
    vals: Vec<f64>,
    pows: Vec<f64>,
    /// Value by group code (0 off the support).
    dense: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EmbeddingBundle {
    group: Group,
    pub p: f64,
    /// Scale R the blocks were built for.
    pub scale: u32,
    /// Number of profile blocks beyond block 0.
    pub k_max: u32,
    pub diameter: u32,
    /// Largest word length over the kernel (SOL quotients).
    pub diam_n: Option<u32>,
    pub blocks: Vec<Block>,
    pub circle: Option<CircleMap>,
    dense: Vec<DenseBlock>,
    norms: OnceLock<Vec<f64>>,
}

/// `K = ceil(log2 R) - 1` for `R >= 2`.
pub fn block_count(r: u32) -> u32 {
    debug_assert!(r >= 2);
    (u32::BITS - (r - 1).leading_zeros()) - 1
}

/// `2 C (2 ln(R/2))^(1/p)`.
pub fn closed_form(c_hat: f64, r: f64, p: f64) -> f64 {
    2.0 * c_hat * (2.0 * (r / 2.0).ln()).max(0.0).powf(1.0 / p)
}

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else {
        a.powf(p)
    }
}

fn dirac_block(group: &Group, p: f64) -> Block {
    Block {
        k: 0,
        radius: 1,
        coef: 1.0,
        certified_j: 2f64.powf(-1.0 / p),
        gradient_max: 2f64.powf(1.0 / p),
        values: vec![(group.identity(), 1.0)],
        reused: false,
        converged: true,
    }
}

/// Builds the blocks at radii `2^k`, `k = 1..K`. `scale` defaults to the
/// diameter, or to the kernel diameter for SOL quotients (which also get the
/// circle map).
pub fn build_bundle(
    group: &Group,
    p: f64,
    scale: Option<u32>,
    opts: &ProfileOptions,
    vertex_cap: usize,
) -> Result<EmbeddingBundle> {
    check_p(p)?;
    if p < 2.0 {
        return Err(Error::BadParam(format!("embeddings need p >= 2, got {p}")));
    }
    let order = group.order().ok_or(Error::InfiniteNeedsRadius)?;
    let whole = bfs_ball(group, None, vertex_cap)?;
    let report = diameter_from_ball(&whole, order)?;
    let is_sol = group.family() == Family::SolFin;
    let default = if is_sol { report.diam_n.unwrap_or(report.diameter) } else { report.diameter };
    let scale = scale.unwrap_or(default);
    if scale < 2 || scale > report.diameter {
        return Err(Error::BadScale(format!("R = {scale} must lie in [2, {}]", report.diameter)));
    }
    let k_max = block_count(scale);
    let mut blocks = vec![dirac_block(group, p)];
    let mut prev: Option<TestVector> = None;
    for k in 1..=k_max {
        let radius = 1u32 << k;
        let ball = bfs_ball(group, Some(radius), vertex_cap)?;
        let mut tv = optimize_profile(&ball, p, opts)?;
        let mut reused = false;
        if let Some(prev) = &prev {
            if prev.certified_j > tv.certified_j {
                tv = TestVector { radius, ..prev.clone() };
                reused = true;
            }
        }
        blocks.push(Block {
            k,
            radius,
            coef: radius as f64 / tv.certified_j,
            certified_j: tv.certified_j,
            gradient_max: tv.gradient_max,
            values: tv.values.clone(),
            reused,
            converged: tv.converged,
        });
        prev = Some(tv);
    }
    let circle = if is_sol { Some(CircleMap::new(group.spec().o_a.unwrap())?) } else { None };
    EmbeddingBundle::assemble(group.clone(), p, scale, report.diameter, report.diam_n, blocks, circle)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AprioriBound {
    pub lip_bound: f64,
    pub colip_bound: f64,
    pub dist_bound: f64,
    /// `2 C (2 ln(R/2))^(1/p)` with C the largest block coefficient.
    pub paper_closed_form: Option<f64>,
    /// Largest word length the co-Lipschitz bound covers.
    pub valid_up_to: u32,
}

impl EmbeddingBundle {
    fn assemble(
        group: Group,
        p: f64,
        scale: u32,
        diameter: u32,
        diam_n: Option<u32>,
        blocks: Vec<Block>,
        circle: Option<CircleMap>,
    ) -> Result<Self> {
        let order = group.order().ok_or(Error::InfiniteNeedsRadius)? as usize;
        let mut dense = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let mut d = vec![0.0; order];
            let mut codes = Vec::with_capacity(b.values.len());
            let mut vals = Vec::with_capacity(b.values.len());
            for (x, v) in &b.values {
                let c = group.code(x).ok_or_else(|| Error::FamilyMismatch(group.spec().label()))?;
                if *v != 0.0 {
                    d[c as usize] = *v;
                    codes.push(c);
                    vals.push(*v);
                }
            }
            let pows = vals.iter().map(|&v| abs_pow(v, p)).collect();
            dense.push(DenseBlock { codes, vals, pows, dense: d });
        }
        let k_max = blocks.len() as u32 - 1;
        Ok(EmbeddingBundle { group, p, scale, k_max, diameter, diam_n, blocks, circle, dense, norms: OnceLock::new() })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn spec(&self) -> &GroupSpec {
        self.group.spec()
    }

    fn code(&self, g: &Element) -> Result<u64> {
        self.group.check(g)?;
        self.group.code(g).ok_or_else(|| Error::FamilyMismatch(self.group.spec().label()))
    }

    /// `||f - lambda(g) f||_p^p` for one block by direct summation.
    fn block_pow(&self, b: &DenseBlock, g: u64, g_inv: u64) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for (i, &x) in b.codes.iter().enumerate() {
            total += abs_pow(b.vals[i] - b.dense[self.group.mul_code(g_inv, x) as usize], p);
            if b.dense[self.group.mul_code(g, x) as usize] == 0.0 {
                total += b.pows[i];
            }
        }
        total
    }

    fn circle_term(&self, g: u64) -> f64 {
        match &self.circle {
            Some(c) => c.chord(self.group.cyclic_part(&self.group.decode(g)).0),
            None => 0.0,
        }
    }

    /// Per-block contributions `coef_k ||f_k - lambda(g) f_k||_p` followed by
    /// the circle distance when present.
    pub fn block_norms(&self, g: &Element) -> Result<Vec<f64>> {
        let c = self.code(g)?;
        let ci = self.group.inv_code(c);
        let mut out: Vec<f64> = self
            .blocks
            .iter()
            .zip(&self.dense)
            .map(|(b, d)| b.coef * self.block_pow(d, c, ci).powf(1.0 / self.p))
            .collect();
        if self.circle.is_some() {
            out.push(self.circle_term(c));
        }
        Ok(out)
    }

    /// `||F(g)||_p`, combined blockwise.
    pub fn embed_norm(&self, g: &Element) -> Result<f64> {
        let c = self.code(g)?;
        let ci = self.group.inv_code(c);
        let mut total = 0.0;
        for (b, d) in self.blocks.iter().zip(&self.dense) {
            total += b.coef.powf(self.p) * self.block_pow(d, c, ci);
        }
        total += self.circle_term(c).powf(self.p);
        Ok(total.powf(1.0 / self.p))
    }

    /// `||F(g)||_p` for every group code, from pair sums over each support:
    /// `||f - lambda(g)f||^p = 2||f||^p + sum_{x y^-1 = g} (|f(x)-f(y)|^p - |f(x)|^p - |f(y)|^p)`.
    pub fn all_norms(&self) -> &[f64] {
        self.norms.get_or_init(|| {
            let order = self.group.order().unwrap() as usize;
            let e = self.group.code(&self.group.identity()).unwrap() as usize;
            let p = self.p;
            let mut total = vec![0.0; order];
            let mut table = vec![0.0; order];
            for (b, d) in self.blocks.iter().zip(&self.dense) {
                table.iter_mut().for_each(|x| *x = 0.0);
                let inv: Vec<u64> = d.codes.iter().map(|&y| self.group.inv_code(y)).collect();
                for (i, &x) in d.codes.iter().enumerate() {
                    let (fx, px) = (d.vals[i], d.pows[i]);
                    for (j, &yi) in inv.iter().enumerate() {
                        let g = self.group.mul_code(x, yi) as usize;
                        table[g] += abs_pow(fx - d.vals[j], p) - px - d.pows[j];
                    }
                }
                let norm_pow: f64 = d.pows.iter().sum();
                let w = b.coef.powf(p);
                for (g, t) in table.iter().enumerate() {
                    if g != e {
                        total[g] += w * (2.0 * norm_pow + t).max(0.0);
                    }
                }
            }
            for (g, t) in total.iter_mut().enumerate() {
                *t += self.circle_term(g as u64).powf(p);
                *t = t.powf(1.0 / p);
            }
            total[e] = 0.0;
            total
        })
    }

    /// Coordinates of `F(g)`: one `|G|`-vector per block, then the circle point.
    pub fn embed_point(&self, g: &Element) -> Result<Vec<f64>> {
        let order = self.group.order().unwrap();
        let size = order * self.blocks.len() as u64;
        if size > POINT_CAP {
            return Err(Error::cap("embedding coordinates", size, POINT_CAP));
        }
        let c = self.code(g)?;
        let ci = self.group.inv_code(c);
        let mut out = Vec::with_capacity(size as usize + 2);
        for (b, d) in self.blocks.iter().zip(&self.dense) {
            for x in 0..order {
                out.push(b.coef * (d.dense[x as usize] - d.dense[self.group.mul_code(ci, x) as usize]));
            }
        }
        if let Some(circle) = &self.circle {
            out.extend(circle.point(self.group.cyclic_part(&self.group.decode(c)).0));
        }
        Ok(out)
    }

    /// Linear part of the affine action of g on coordinate vectors.
    pub fn linear_action(&self, g: &Element, v: &[f64]) -> Result<Vec<f64>> {
        let order = self.group.order().unwrap() as usize;
        let c = self.code(g)?;
        let ci = self.group.inv_code(c);
        let mut out = Vec::with_capacity(v.len());
        for k in 0..self.blocks.len() {
            let seg = &v[k * order..(k + 1) * order];
            for x in 0..order as u64 {
                out.push(seg[self.group.mul_code(ci, x) as usize]);
            }
        }
        if let Some(circle) = &self.circle {
            let t = self.group.cyclic_part(g).0;
            let tail = &v[self.blocks.len() * order..];
            out.extend(circle.rotate(t, [tail[0], tail[1]]));
        }
        Ok(out)
    }

    /// Largest block coefficient over profile blocks.
    pub fn c_hat(&self) -> Option<f64> {
        self.blocks.iter().skip(1).map(|b| b.coef).reduce(f64::max)
    }

    /// Lower bound on `||F(g)||` for `|g| = l` from the disjoint-support
    /// argument, plus the circle for SOL quotients.
    fn norm_lower_bound(&self, l: u32) -> f64 {
        let p = self.p;
        let two = 2f64.powf(1.0 / p);
        let top = (1..=self.k_max).filter(|&k| 2u64 << k <= l as u64).max();
        let blocks = two * top.map_or(1.0, |k| (1u64 << k) as f64);
        match (&self.circle, self.diam_n) {
            (Some(_), Some(dn)) => {
                let arc = 2.0 / std::f64::consts::PI * l.saturating_sub(dn) as f64;
                (blocks.powf(p) + arc.powf(p)).powf(1.0 / p)
            }
            _ => blocks,
        }
    }

    /// A-priori bounds. Lipschitz: `max_s ||F(s)||` is at most
    /// `(sum_k (coef_k gradient_max_k)^p + circle)^(1/p)`. Co-Lipschitz:
    /// `8 * 2^(-1/p)` up to the scale; with the circle, the sup of
    /// `l / lower_bound(l)` over the whole diameter.
    pub fn apriori_bound(&self) -> AprioriBound {
        let p = self.p;
        let mut lip_pow: f64 = self.blocks.iter().map(|b| (b.coef * b.gradient_max).powf(p)).sum();
        if self.circle.is_some() {
            lip_pow += 1.0;
        }
        let lip_bound = lip_pow.powf(1.0 / p);
        let (colip_bound, valid_up_to) = if self.circle.is_some() {
            let c = (1..=self.diameter).map(|l| l as f64 / self.norm_lower_bound(l)).fold(0.0, f64::max);
            (c, self.diameter)
        } else {
            (8.0 * 2f64.powf(-1.0 / p), self.scale)
        };
        AprioriBound {
            lip_bound,
            colip_bound,
            dist_bound: lip_bound * colip_bound,
            paper_closed_form: self.c_hat().map(|c| closed_form(c, self.scale as f64, p)),
            valid_up_to,
        }
    }

    /// Manifest; `with_values` adds each block's `element -> value` map so the
    /// bundle can be reloaded by [`EmbeddingBundle::from_json`].
    pub fn to_json(&self, with_values: bool) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .map(|b| {
                let mut v = serde_json::json!({
                    "k": b.k,
                    "radius": b.radius,
                    "certified_J": b.certified_j,
                    "coef": b.coef,
                    "gradient_max": b.gradient_max,
                    "support_size": b.values.len(),
                    "reused": b.reused,
                    "converged": b.converged,
                });
                if with_values {
                    let map: serde_json::Map<String, serde_json::Value> =
                        b.values.iter().map(|(x, f)| (self.group.format(x), serde_json::json!(f))).collect();
                    v["values"] = serde_json::Value::Object(map);
                }
                v
            })
            .collect();
        serde_json::json!({
            "group": self.spec().label(),
            "spec": self.spec(),
            "params": self.spec().params(),
            "p": self.p,
            "R": self.scale,
            "K": self.k_max,
            "diameter": self.diameter,
            "diam_N": self.diam_n,
            "C_hat": self.c_hat(),
            "circle": self.circle,
            "blocks": blocks,
        })
    }

    /// Reloads a bundle written with values. Coefficients and values are taken
    /// as given, so a tampered bundle is measured as it stands.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let params: SpecParams = serde_json::from_value(v["params"].clone())?;
        let group = Group::from_params(&params)?;
        let num = |x: &serde_json::Value, what: &str| x.as_f64().ok_or_else(|| Error::parse(format!("missing {what}")));
        let int = |x: &serde_json::Value, what: &str| {
            x.as_u64().and_then(|u| u32::try_from(u).ok()).ok_or_else(|| Error::parse(format!("missing {what}")))
        };
        let p = num(&v["p"], "p")?;
        check_p(p)?;
        let scale = int(&v["R"], "R")?;
        let diameter = int(&v["diameter"], "diameter")?;
        let diam_n = v["diam_N"].as_u64().map(|d| d as u32);
        let circle: Option<CircleMap> = serde_json::from_value(v["circle"].clone())?;
        let list = v["blocks"].as_array().ok_or_else(|| Error::parse("missing blocks"))?;
        let mut blocks = Vec::with_capacity(list.len());
        for b in list {
            let map = b["values"].as_object().ok_or_else(|| Error::parse("block without values"))?;
            let values = map
                .iter()
                .map(|(k, x)| Ok((group.parse(k)?, num(x, "value")?)))
                .collect::<Result<SparseFn>>()?;
            blocks.push(Block {
                k: int(&b["k"], "k")?,
                radius: int(&b["radius"], "radius")?,
                coef: num(&b["coef"], "coef")?,
                certified_j: num(&b["certified_J"], "certified_J")?,
                gradient_max: num(&b["gradient_max"], "gradient_max")?,
                values,
                reused: b["reused"].as_bool().unwrap_or(false),
                converged: b["converged"].as_bool().unwrap_or(true),
            });
        }
        if blocks.is_empty() {
            return Err(Error::parse("bundle has no blocks"));
        }
        Self::assemble(group, p, scale, diameter, diam_n, blocks, circle)
    }
}
