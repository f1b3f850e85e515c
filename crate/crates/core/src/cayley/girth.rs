//! Relative girth of a finite quotient with respect to its parent.

use std::collections::HashMap;

use serde::Serialize;

use super::{bfs_ball, BallTable};
use crate::error::{Error, Result};
use crate::group::{project, Group};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GirthWitness {
    /// Two distinct parent elements of the ball with the same image.
    NonInjective { x: String, y: String },
    /// The images miss part of the quotient ball.
    NotSurjective { missed: String },
    /// A pair whose quotient distance is strictly smaller.
    DistanceDrop { x: String, y: String, parent: u32, quotient: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GirthReport {
    pub parent: String,
    pub quotient: String,
    pub cap: u32,
    /// Largest r <= cap such that the projection maps the closed parent ball
    /// of radius r isometrically onto the closed quotient ball of radius r.
    pub g_lower: u32,
    /// Why radius `g_lower + 1` fails, when it was tested.
    pub witness: Option<GirthWitness>,
    /// Shortest nontrivial element of the kernel of the projection, searched
    /// up to length `cap` (None when the kernel misses the ball).
    pub systole: Option<u32>,
}

/// Compares the distance matrices of parent and quotient balls through the
/// projection for r = 1, 2, ... until a failure or `cap`.
///
/// Injectivity on the parent ball of radius 2r is checked first: it already
/// implies that the radius-r balls are isometric.
pub fn girth(parent: &Group, quotient: &Group, cap: u32, vertex_cap: usize) -> Result<GirthReport> {
    let qball = bfs_ball(quotient, None, vertex_cap)?;
    if !qball.is_complete() {
        return Err(Error::IncompatibleSpecs("quotient must be finite".into()));
    }
    let mut g_lower = 0;
    let mut witness = None;
    for r in 1..=cap {
        let pball = bfs_ball(parent, Some(2 * r), vertex_cap)?;
        match check_radius(parent, quotient, &pball, &qball, r)? {
            None => g_lower = r,
            Some(w) => {
                witness = Some(w);
                break;
            }
        }
    }
    let systole = kernel_systole(parent, quotient, cap, vertex_cap)?;
    Ok(GirthReport {
        parent: parent.spec().label(),
        quotient: quotient.spec().label(),
        cap,
        g_lower,
        witness,
        systole,
    })
}

fn check_radius(
    parent: &Group,
    quotient: &Group,
    pball: &BallTable,
    qball: &BallTable,
    r: u32,
) -> Result<Option<GirthWitness>> {
    let images: Vec<_> =
        pball.elements().iter().map(|x| project(parent, quotient, x)).collect::<Result<_>>()?;

    let mut first_preimage: HashMap<&_, usize> = HashMap::with_capacity(images.len());
    let mut injective_on_double = true;
    let mut collision = None;
    for (i, img) in images.iter().enumerate() {
        if let Some(&j) = first_preimage.get(img) {
            injective_on_double = false;
            if pball.lengths()[i] <= r && collision.is_none() {
                collision = Some((j, i));
            }
        } else {
            first_preimage.insert(img, i);
        }
    }
    let inner: Vec<usize> = (0..pball.len()).filter(|&i| pball.lengths()[i] <= r).collect();
    let quotient_count = qball.lengths().iter().filter(|&&l| l <= r).count();
    if injective_on_double && inner.len() == quotient_count {
        return Ok(None);
    }
    if let Some((j, i)) = collision {
        return Ok(Some(GirthWitness::NonInjective {
            x: parent.format(&pball.elements()[j]),
            y: parent.format(&pball.elements()[i]),
        }));
    }
    for &i in &inner {
        let x = &pball.elements()[i];
        let ix = parent.inv(x)?;
        let qix = quotient.inv(&images[i])?;
        for &j in &inner {
            if j <= i {
                continue;
            }
            let y = &pball.elements()[j];
            let dp = pball.length_of(&parent.mul(&ix, y)?).expect("|x^-1 y| <= 2r lies in the double ball");
            let dq = qball.length_of(&quotient.mul(&qix, &images[j])?).expect("quotient table is complete");
            if dq != dp {
                return Ok(Some(GirthWitness::DistanceDrop {
                    x: parent.format(x),
                    y: parent.format(y),
                    parent: dp,
                    quotient: dq,
                }));
            }
        }
    }
    if inner.len() != quotient_count {
        let hit: std::collections::HashSet<_> = inner.iter().map(|&i| &images[i]).collect();
        let missed = qball
            .elements()
            .iter()
            .zip(qball.lengths())
            .find(|(y, &l)| l <= r && !hit.contains(y))
            .map(|(y, _)| quotient.format(y))
            .unwrap_or_default();
        return Ok(Some(GirthWitness::NotSurjective { missed }));
    }
    Ok(None)
}

fn kernel_systole(parent: &Group, quotient: &Group, cap: u32, vertex_cap: usize) -> Result<Option<u32>> {
    if parent.spec() == quotient.spec() {
        return Ok(None);
    }
    let ball = bfs_ball(parent, Some(cap), vertex_cap)?;
    let e = quotient.identity();
    for (x, &l) in ball.elements().iter().zip(ball.lengths()).skip(1) {
        if project(parent, quotient, x)? == e {
            return Ok(Some(l));
        }
    }
    Ok(None)
}
