//! Quotient maps from the infinite parents onto the finite families.

use super::{Element, Family, Group};
use crate::error::{Error, Result};

/// Image of `x` under the quotient map `parent -> quotient`.
///
/// Supported pairs are (parent, finite quotient) with matching `m` or `A`,
/// and any group onto itself (identity map).
pub fn project(parent: &Group, quotient: &Group, x: &Element) -> Result<Element> {
    check_compatible(parent, quotient)?;
    parent.check(x)?;
    let q = quotient.spec();
    if parent.spec() == q {
        return Ok(x.clone());
    }
    let out = match x {
        Element::LampInf { lamps, pos } => {
            let mut digits = vec![0u64; q.n as usize];
            for (&i, &v) in lamps {
                let k = i.rem_euclid(q.n as i64) as usize;
                digits[k] = (digits[k] + v) % q.m;
            }
            let packed = digits.iter().rev().fold(0u64, |acc, &d| acc * q.m + d);
            Element::LampFin { lamps: packed, pos: pos.rem_euclid(q.n as i64) as u64 }
        }
        &Element::BsInf { u, e, t } => {
            let modulus = q.q.unwrap();
            let m_inv = mod_pow(q.m, q.n - 1, modulus);
            let scale = mod_pow(m_inv, e as u64, modulus);
            let u = u.rem_euclid(modulus as i128) as u64;
            let a = (u as u128 * scale as u128 % modulus as u128) as u64;
            Element::BsFin { a, t: t.rem_euclid(q.n as i64) as u64 }
        }
        &Element::SolInf { v, t } => Element::SolFin {
            v: [v[0].rem_euclid(q.n as i64) as u64, v[1].rem_euclid(q.n as i64) as u64],
            t: t.rem_euclid(q.o_a.unwrap() as i64) as u64,
        },
        _ => unreachable!("checked by check_compatible"),
    };
    Ok(out)
}

pub(crate) fn check_compatible(parent: &Group, quotient: &Group) -> Result<()> {
    let (p, q) = (parent.spec(), quotient.spec());
    if p == q {
        return Ok(());
    }
    let ok = !p.is_finite()
        && q.is_finite()
        && q.family.parent() == p.family
        && match p.family {
            Family::SolInf => p.a == q.a,
            _ => p.m == q.m,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleSpecs(format!("{} -> {}", p.label(), q.label())))
    }
}

fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SpecParams;
    use std::collections::BTreeMap;

    fn group(p: SpecParams) -> Group {
        Group::from_params(&p).unwrap()
    }

    #[test]
    fn lamp_wraps() {
        let p = group(SpecParams::new(Family::LamplighterInf).m(2));
        let q = group(SpecParams::new(Family::LamplighterFin).m(2).n(3));
        let x = Element::LampInf { lamps: BTreeMap::from([(4, 1)]), pos: 0 };
        assert_eq!(q.format(&project(&p, &q, &x).unwrap()), "lamps:010|pos:0");
        assert_eq!(project(&p, &q, &p.identity()).unwrap(), q.identity());
    }

    #[test]
    fn bs_half() {
        let p = group(SpecParams::new(Family::BsInf).m(2));
        let q = group(SpecParams::new(Family::BsFin).m(2).n(4));
        let x = Element::BsInf { u: 1, e: 1, t: 0 };
        assert_eq!(project(&p, &q, &x).unwrap(), Element::BsFin { a: 8, t: 0 });
    }

    #[test]
    fn incompatible() {
        let p = group(SpecParams::new(Family::BsInf).m(2));
        let q = group(SpecParams::new(Family::BsFin).m(3).n(4));
        assert!(matches!(project(&p, &q, &p.identity()), Err(Error::IncompatibleSpecs(_))));
        let l = group(SpecParams::new(Family::LamplighterFin).m(2).n(4));
        assert!(project(&p, &l, &p.identity()).is_err());
    }

    #[test]
    fn generators_map_to_generators() {
        let pairs = [
            (SpecParams::new(Family::LamplighterInf).m(2), SpecParams::new(Family::LamplighterFin).m(2).n(5)),
            (SpecParams::new(Family::LamplighterInf).m(3), SpecParams::new(Family::LamplighterFin).m(3).n(2)),
            (SpecParams::new(Family::BsInf).m(2), SpecParams::new(Family::BsFin).m(2).n(2)),
            (SpecParams::new(Family::BsInf).m(3), SpecParams::new(Family::BsFin).m(3).n(4)),
            (SpecParams::new(Family::SolInf), SpecParams::new(Family::SolFin).n(7)),
        ];
        for (pp, qp) in pairs {
            let (p, q) = (group(pp), group(qp));
            let mut image: Vec<Element> =
                p.generators().iter().map(|s| project(&p, &q, s).unwrap()).collect();
            image.sort();
            image.dedup();
            let mut gens = q.generators().to_vec();
            gens.sort();
            assert_eq!(image, gens, "{}", q.spec().label());
        }
    }
}
