//! How the word metric of SOL distorts its kernel N = {(v,0)}.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::bfs_ball;
use crate::error::{Error, Result};
use crate::group::{Element, Family, Group};

pub const MAX_RADICAL_RADIUS: u32 = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadicalRow {
    pub r: u32,
    /// Kernel elements at word length exactly r.
    pub count: usize,
    pub min_log_norm: f64,
    pub max_log_norm: f64,
    /// Largest k such that every v with 0 < |v|_inf <= k has word length <= r.
    pub min_side: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpRadicalReport {
    pub group: String,
    pub r_max: u32,
    pub rows: Vec<RadicalRow>,
    /// max over r of max_log_norm / r (upper inclusion).
    pub alpha_upper: f64,
    /// max over r of r / ln(min_side), rows with min_side >= 2 (lower inclusion).
    pub alpha_lower: f64,
}

impl ExpRadicalReport {
    /// Smallest alpha with `r/alpha <= max_log_norm(r) <= alpha*r` for all rows with r >= r_min.
    pub fn sandwich_alpha(&self, r_min: u32) -> f64 {
        self.rows
            .iter()
            .filter(|row| row.r >= r_min)
            .map(|row| {
                let r = row.r as f64;
                (row.max_log_norm / r).max(r / row.max_log_norm)
            })
            .fold(1.0, f64::max)
    }

    /// CSV with columns `r,min_log_norm,max_log_norm`.
    pub fn csv(&self) -> String {
        let mut out = String::from("r,min_log_norm,max_log_norm\n");
        for row in &self.rows {
            let _ = writeln!(out, "{},{},{}", row.r, row.min_log_norm, row.max_log_norm);
        }
        out
    }
}

/// Per-radius extremes of `ln |v|_inf` over kernel elements of SOL (or a
/// finite SOL quotient, with residues taken in the symmetric range).
/// Rows where only v = 0 is reachable are omitted.
pub fn exp_radical_scan(group: &Group, r_max: u32, vertex_cap: usize) -> Result<ExpRadicalReport> {
    let radius = match group.family() {
        Family::SolInf => {
            if r_max > MAX_RADICAL_RADIUS {
                return Err(Error::cap("radical scan radius", r_max as u64, MAX_RADICAL_RADIUS as u64));
            }
            Some(r_max)
        }
        Family::SolFin => None,
        other => return Err(Error::BadParam(format!("radical scan needs a SOL group, got {other}"))),
    };
    let ball = bfs_ball(group, radius, vertex_cap)?;
    let n = group.spec().n as i64;
    let centered = |z: u64| {
        let z = z as i64;
        if 2 * z > n {
            z - n
        } else {
            z
        }
    };
    let mut reached: HashMap<[i64; 2], u32> = HashMap::new();
    for (x, &l) in ball.elements().iter().zip(ball.lengths()) {
        let v = match *x {
            Element::SolInf { v, t: 0 } => v,
            Element::SolFin { v, t: 0 } => [centered(v[0]), centered(v[1])],
            _ => continue,
        };
        if v != [0, 0] {
            reached.insert(v, l);
        }
    }
    let top = ball.max_length();
    let mut rows = Vec::new();
    for r in 1..=top {
        let norms: Vec<f64> = reached
            .iter()
            .filter(|(_, &l)| l == r)
            .map(|(v, _)| (v[0].unsigned_abs().max(v[1].unsigned_abs()) as f64).ln())
            .collect();
        if norms.is_empty() {
            continue;
        }
        let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let max = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(RadicalRow {
            r,
            count: norms.len(),
            min_log_norm: min,
            max_log_norm: max,
            min_side: min_side(&reached, r, if group.family() == Family::SolFin { n / 2 } else { i64::MAX }),
        });
    }
    let alpha_upper = rows.iter().map(|row| row.max_log_norm / row.r as f64).fold(0.0, f64::max);
    let alpha_lower = rows
        .iter()
        .filter(|row| row.min_side >= 2)
        .map(|row| row.r as f64 / (row.min_side as f64).ln())
        .fold(0.0, f64::max);
    Ok(ExpRadicalReport { group: group.spec().label(), r_max: top, rows, alpha_upper, alpha_lower })
}

fn min_side(reached: &HashMap<[i64; 2], u32>, r: u32, limit: i64) -> u64 {
    let within = |v: [i64; 2]| reached.get(&v).is_some_and(|&l| l <= r);
    let mut k = 1i64;
    while k <= limit {
        let boundary_ok = (-k..=k).all(|i| within([i, k]) && within([i, -k]) && within([k, i]) && within([-k, i]));
        if !boundary_ok {
            break;
        }
        k += 1;
    }
    (k - 1) as u64
}
