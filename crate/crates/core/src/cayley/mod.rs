//! Word metrics on Cayley graphs: balls, diameters, relative girth of a
//! quotient, and the distortion of the SOL kernel.
//!
//! Edges join `g` and `g*s` for `s` in the generating set, so the graph
//! metric is the left-invariant word metric `d(g,h) = |g^-1 h|`.

mod girth;
mod radical;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Family, Group};

pub use girth::{girth, GirthReport, GirthWitness};
pub use radical::{exp_radical_scan, ExpRadicalReport, RadicalRow, MAX_RADICAL_RADIUS};

/// Largest radius accepted for balls in infinite groups.
pub const MAX_INFINITE_RADIUS: u32 = 40;

/// Default cap on the number of vertices a BFS may visit.
pub const DEFAULT_VERTEX_CAP: usize = 1 << 22;

/// A BFS-enumerated ball `{x : |x| <= r}` around the identity.
#[derive(Clone, Debug)]
pub struct BallTable {
    group: Group,
    radius: Option<u32>,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    lengths: Vec<u32>,
    spheres: Vec<usize>,
    complete: bool,
}

impl BallTable {
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Requested radius; `None` for a whole-group table.
    pub fn radius(&self) -> Option<u32> {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in BFS order (identity first).
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn length_of(&self, x: &Element) -> Option<u32> {
        self.index_of(x).map(|i| self.lengths[i])
    }

    /// Sphere sizes by distance from the identity.
    pub fn spheres(&self) -> &[usize] {
        &self.spheres
    }

    /// True when the ball is the whole group.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn max_length(&self) -> u32 {
        self.lengths.last().copied().unwrap_or(0)
    }

    /// CSV with columns `r,sphere,cumulative`.
    pub fn sphere_csv(&self) -> String {
        let mut out = String::from("r,sphere,cumulative\n");
        let mut total = 0;
        for (r, &s) in self.spheres.iter().enumerate() {
            total += s;
            let _ = writeln!(out, "{r},{s},{total}");
        }
        out
    }
}

/// Breadth-first enumeration of the closed ball of radius `radius`, or of the
/// whole group when `radius` is `None`. Neighbours are visited in generator
/// order, so the element order is deterministic.
pub fn bfs_ball(group: &Group, radius: Option<u32>, vertex_cap: usize) -> Result<BallTable> {
    if !group.spec().is_finite() {
        match radius {
            None => return Err(Error::InfiniteNeedsRadius),
            Some(r) if r > MAX_INFINITE_RADIUS => {
                return Err(Error::cap("infinite-group BFS radius", r as u64, MAX_INFINITE_RADIUS as u64))
            }
            _ => {}
        }
    }
    let gens = group.generators();
    let id = group.identity();
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0u32];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut exhausted = true;
    while let Some(i) = queue.pop_front() {
        let d = lengths[i];
        if radius.is_some_and(|r| d >= r) {
            exhausted = false;
            continue;
        }
        for s in gens {
            let y = group.mul(&elements[i], s)?;
            if index.contains_key(&y) {
                continue;
            }
            if elements.len() >= vertex_cap {
                return Err(Error::cap("BFS vertices", elements.len() as u64 + 1, vertex_cap as u64));
            }
            index.insert(y.clone(), elements.len());
            elements.push(y);
            lengths.push(d + 1);
            queue.push_back(elements.len() - 1);
        }
    }
    let max = lengths.last().copied().unwrap_or(0) as usize;
    let mut spheres = vec![0usize; max + 1];
    for &l in &lengths {
        spheres[l as usize] += 1;
    }
    // A ball cut off at radius r is still the whole group if nothing lies beyond it.
    let complete = exhausted
        || group.order().is_some_and(|o| o == elements.len() as u64)
        || radius.is_some_and(|r| (max as u32) < r);
    Ok(BallTable { group: group.clone(), radius, elements, index, lengths, spheres, complete })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterReport {
    pub group: String,
    pub order: u64,
    pub diameter: u32,
    /// Largest word length over the kernel {(v,0)} (sol-fin only).
    pub diam_n: Option<u32>,
}

/// Exact diameter as the eccentricity of the identity; Cayley graphs are
/// vertex-transitive so this is the maximum over all vertices.
pub fn diameter(group: &Group, vertex_cap: usize) -> Result<DiameterReport> {
    let order = group.order().ok_or(Error::InfiniteNeedsRadius)?;
    let ball = bfs_ball(group, None, vertex_cap)?;
    diameter_from_ball(&ball, order)
}

pub fn diameter_from_ball(ball: &BallTable, order: u64) -> Result<DiameterReport> {
    if ball.len() as u64 != order {
        return Err(Error::NotGenerating { reached: ball.len() as u64, order });
    }
    let group = ball.group();
    let diam_n = (group.family() == Family::SolFin).then(|| {
        ball.elements()
            .iter()
            .zip(ball.lengths())
            .filter(|(x, _)| group.in_kernel(x))
            .map(|(_, &l)| l)
            .max()
            .unwrap_or(0)
    });
    Ok(DiameterReport { group: group.spec().label(), order, diameter: ball.max_length(), diam_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SpecParams;

    fn group(p: SpecParams) -> Group {
        Group::from_params(&p).unwrap()
    }

    #[test]
    fn unit_ball_is_identity_plus_generators() {
        for p in [
            SpecParams::new(Family::LamplighterFin).m(2).n(4),
            SpecParams::new(Family::BsFin).m(3).n(3),
            SpecParams::new(Family::SolInf),
            SpecParams::new(Family::BsInf).m(2),
        ] {
            let g = group(p);
            let b = bfs_ball(&g, Some(1), DEFAULT_VERTEX_CAP).unwrap();
            assert_eq!(b.len(), 1 + g.generators().len());
        }
    }

    #[test]
    fn l24_radius_two() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(2).n(4));
        let b = bfs_ball(&g, Some(2), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(b.spheres()[0] + b.spheres()[1], 4);
        assert_eq!(b.spheres().iter().sum::<usize>(), b.len());
    }

    #[test]
    fn infinite_lamplighter_positions_bounded() {
        let g = group(SpecParams::new(Family::LamplighterInf).m(2));
        let b = bfs_ball(&g, Some(3), DEFAULT_VERTEX_CAP).unwrap();
        assert!(!b.is_complete());
        for x in b.elements() {
            let Element::LampInf { pos, .. } = x else { panic!() };
            assert!((-3..=3).contains(pos));
        }
        assert!(matches!(bfs_ball(&g, None, DEFAULT_VERTEX_CAP), Err(Error::InfiniteNeedsRadius)));
        assert!(matches!(bfs_ball(&g, Some(41), DEFAULT_VERTEX_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn vertex_cap() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(2).n(8));
        assert!(matches!(bfs_ball(&g, None, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn l22_is_an_octagon() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(2).n(2));
        let d = diameter(&g, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(d.order, 8);
        assert_eq!(d.diameter, 4);
        let b = bfs_ball(&g, None, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(b.spheres(), &[1, 2, 2, 2, 1]);
    }

    #[test]
    fn edge_consistency() {
        let g = group(SpecParams::new(Family::BsFin).m(2).n(5));
        let b = bfs_ball(&g, None, DEFAULT_VERTEX_CAP).unwrap();
        assert!(b.is_complete());
        for (x, &l) in b.elements().iter().zip(b.lengths()) {
            for s in g.generators() {
                let y = g.mul(x, s).unwrap();
                let ly = b.length_of(&y).unwrap();
                assert!(ly.abs_diff(l) <= 1);
            }
        }
    }

    #[test]
    fn sol_kernel_diameter_is_reported() {
        let g = group(SpecParams::new(Family::SolFin).n(5));
        let d = diameter(&g, DEFAULT_VERTEX_CAP).unwrap();
        assert!(d.diam_n.unwrap() <= d.diameter);
        assert_eq!(d.order, 250);
    }

    #[test]
    fn sphere_csv_shape() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(2).n(2));
        let b = bfs_ball(&g, None, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(b.sphere_csv(), "r,sphere,cumulative\n0,1,1\n1,2,3\n2,2,5\n3,2,7\n4,1,8\n");
    }
}
