use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orbit of the origin under rotation by `2*pi/q` about `(q/c_q, 0)`,
/// scaled so consecutive points are at distance 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    pub q: u64,
    /// `2 q sin(pi/q)`: the adjacent chord before scaling.
    pub c_q: f64,
}

impl CircleMap {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(Error::BadParam(format!("circle needs q >= 3, got {q}")));
        }
        Ok(CircleMap { q, c_q: 2.0 * q as f64 * (PI / q as f64).sin() })
    }

    fn angle(&self, t: i64) -> f64 {
        2.0 * PI * t.rem_euclid(self.q as i64) as f64 / self.q as f64
    }

    pub fn point(&self, t: i64) -> [f64; 2] {
        let a = self.angle(t);
        let r = self.q as f64 / self.c_q;
        [r * (1.0 - a.cos()), r * a.sin()]
    }

    /// `|point(t) - point(0)|` in closed form: `sin(pi t/q) / sin(pi/q)`.
    pub fn chord(&self, t: i64) -> f64 {
        let k = t.rem_euclid(self.q as i64) as f64;
        (PI * k / self.q as f64).sin() / (PI / self.q as f64).sin()
    }

    /// Linear part of the `t`-th power of the rotation (angle `-2 pi t/q`
    /// in these coordinates).
    pub fn rotate(&self, t: i64, v: [f64; 2]) -> [f64; 2] {
        let a = -self.angle(t);
        let (s, c) = a.sin_cos();
        [c * v[0] - s * v[1], s * v[0] + c * v[1]]
    }
}

/// Planar image of `t` in `Z/q`.
pub fn circle_embed(q: u64, t: i64) -> Result<[f64; 2]> {
    Ok(CircleMap::new(q)?.point(t))
}
