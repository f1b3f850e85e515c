//! Group laws.
//!
//! * lamplighter: (f,t)(f',t') = (f + shift_t f', t+t'), (shift_t f')(i) = f'(i-t)
//! * Baumslag-Solitar: (a,s)(b,t) = (a + m^s b, s+t)
//! * SOL: (v,s)(w,t) = (v + A^s w, s+t)

use std::collections::BTreeMap;

use super::{matrix, Element, Family, Group};
use crate::error::{Error, Result};

impl Group {
    pub fn identity(&self) -> Element {
        match self.spec.family {
            Family::LamplighterFin => Element::LampFin { lamps: 0, pos: 0 },
            Family::LamplighterInf => Element::LampInf { lamps: BTreeMap::new(), pos: 0 },
            Family::BsFin => Element::BsFin { a: 0, t: 0 },
            Family::BsInf => Element::BsInf { u: 0, e: 0, t: 0 },
            Family::SolFin => Element::SolFin { v: [0, 0], t: 0 },
            Family::SolInf => Element::SolInf { v: [0, 0], t: 0 },
        }
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        let s = &self.spec;
        let mismatch = || Error::FamilyMismatch(s.label());
        if x.family() != s.family || y.family() != s.family {
            return Err(mismatch());
        }
        Ok(match (x, y) {
            (&Element::LampFin { lamps: f, pos: t }, &Element::LampFin { lamps: g, pos: u }) => Element::LampFin {
                lamps: self.add_lamps(f, self.rotate_lamps(g, t)),
                pos: (t + u) % s.n,
            },
            (Element::LampInf { lamps: f, pos: t }, Element::LampInf { lamps: g, pos: u }) => {
                let mut out = f.clone();
                for (&i, &v) in g {
                    let k = i.checked_add(*t).ok_or(Error::Overflow("lamp index"))?;
                    add_lamp(&mut out, k, v, s.m);
                }
                Element::LampInf { lamps: out, pos: t.checked_add(*u).ok_or(Error::Overflow("lamp position"))? }
            }
            (&Element::BsFin { a, t: s1 }, &Element::BsFin { a: b, t: s2 }) => {
                let q = s.q.unwrap() as u128;
                let mb = (self.tables.m_pow[s1 as usize] as u128 * b as u128) % q;
                Element::BsFin { a: ((a as u128 + mb) % q) as u64, t: (s1 + s2) % s.n }
            }
            (&Element::BsInf { u: u1, e: e1, t: s1 }, &Element::BsInf { u: u2, e: e2, t: s2 }) => {
                let (u2, e2) = scale_by_m_pow(u2, e2, s1, s.m)?;
                let (u, e) = add_fractions(u1, e1, u2, e2, s.m)?;
                Element::BsInf { u, e, t: s1.checked_add(s2).ok_or(Error::Overflow("BS exponent"))? }
            }
            (&Element::SolFin { v, t: s1 }, &Element::SolFin { v: w, t: s2 }) => {
                let aw = matrix::apply_mod(&self.tables.a_pow[s1 as usize], w, s.n);
                Element::SolFin {
                    v: [(v[0] + aw[0]) % s.n, (v[1] + aw[1]) % s.n],
                    t: (s1 + s2) % s.o_a.unwrap(),
                }
            }
            (&Element::SolInf { v, t: s1 }, &Element::SolInf { v: w, t: s2 }) => {
                let aw = matrix::apply_checked(&matrix::pow_checked(&s.a, s1)?, w)?;
                let add = |x: i64, y: i64| x.checked_add(y).ok_or(Error::Overflow("SOL vector"));
                Element::SolInf {
                    v: [add(v[0], aw[0])?, add(v[1], aw[1])?],
                    t: s1.checked_add(s2).ok_or(Error::Overflow("SOL exponent"))?,
                }
            }
            _ => return Err(mismatch()),
        })
    }

    pub fn inv(&self, x: &Element) -> Result<Element> {
        let s = &self.spec;
        if x.family() != s.family {
            return Err(Error::FamilyMismatch(s.label()));
        }
        Ok(match x {
            &Element::LampFin { lamps, pos } => {
                let back = (s.n - pos) % s.n;
                Element::LampFin { lamps: self.neg_lamps(self.rotate_lamps(lamps, back)), pos: back }
            }
            Element::LampInf { lamps, pos } => {
                let mut out = BTreeMap::new();
                for (&i, &v) in lamps {
                    let k = i.checked_sub(*pos).ok_or(Error::Overflow("lamp index"))?;
                    add_lamp(&mut out, k, s.m - v, s.m);
                }
                Element::LampInf { lamps: out, pos: pos.checked_neg().ok_or(Error::Overflow("lamp position"))? }
            }
            &Element::BsFin { a, t } => {
                let q = s.q.unwrap();
                let back = (s.n - t) % s.n;
                let scaled = (self.tables.m_pow[back as usize] as u128 * a as u128 % q as u128) as u64;
                Element::BsFin { a: (q - scaled) % q, t: back }
            }
            &Element::BsInf { u, e, t } => {
                let neg_t = t.checked_neg().ok_or(Error::Overflow("BS exponent"))?;
                let (u, e) = scale_by_m_pow(u, e, neg_t, s.m)?;
                Element::BsInf { u: u.checked_neg().ok_or(Error::Overflow("BS numerator"))?, e, t: neg_t }
            }
            &Element::SolFin { v, t } => {
                let o = s.o_a.unwrap();
                let back = (o - t) % o;
                let w = matrix::apply_mod(&self.tables.a_pow[back as usize], v, s.n);
                Element::SolFin { v: [(s.n - w[0]) % s.n, (s.n - w[1]) % s.n], t: back }
            }
            &Element::SolInf { v, t } => {
                let neg_t = t.checked_neg().ok_or(Error::Overflow("SOL exponent"))?;
                let w = matrix::apply_checked(&matrix::pow_checked(&s.a, neg_t)?, v)?;
                let neg = |z: i64| z.checked_neg().ok_or(Error::Overflow("SOL vector"));
                Element::SolInf { v: [neg(w[0])?, neg(w[1])?], t: neg_t }
            }
        })
    }

    /// Multiplication on dense codes of a finite group; agrees with
    /// [`Group::mul`] through [`Group::code`].
    #[inline]
    pub fn mul_code(&self, x: u64, y: u64) -> u64 {
        let s = &self.spec;
        match s.family {
            Family::LamplighterFin => {
                let (f, t) = (x / s.n, x % s.n);
                let (g, u) = (y / s.n, y % s.n);
                self.add_lamps(f, self.rotate_lamps(g, t)) * s.n + (t + u) % s.n
            }
            Family::BsFin => {
                let q = s.q.unwrap();
                let (a, t) = (x / s.n, x % s.n);
                let (b, u) = (y / s.n, y % s.n);
                let mb = (self.tables.m_pow[t as usize] as u128 * b as u128 % q as u128) as u64;
                let sum = a + mb;
                (if sum >= q { sum - q } else { sum }) * s.n + (t + u) % s.n
            }
            Family::SolFin => {
                let o = s.o_a.unwrap();
                let (t, v) = (x % o, x / o);
                let (u, w) = (y % o, y / o);
                let aw = matrix::apply_mod(&self.tables.a_pow[t as usize], [w / s.n, w % s.n], s.n);
                let v0 = (v / s.n + aw[0]) % s.n;
                let v1 = (v % s.n + aw[1]) % s.n;
                (v0 * s.n + v1) * o + (t + u) % o
            }
            _ => panic!("mul_code on infinite group {}", s.family),
        }
    }

    #[inline]
    pub fn inv_code(&self, x: u64) -> u64 {
        self.code(&self.inv(&self.decode(x)).expect("finite group law is total")).unwrap()
    }

    /// Digit rotation implementing shift_k on a packed lamp configuration.
    fn rotate_lamps(&self, lamps: u64, k: u64) -> u64 {
        if k == 0 {
            return lamps;
        }
        let n = self.spec.n as usize;
        let p = &self.tables.m_pow;
        let split = p[n - k as usize];
        (lamps % split) * p[k as usize] + lamps / split
    }

    fn add_lamps(&self, f: u64, g: u64) -> u64 {
        let m = self.spec.m;
        if m == 2 {
            return f ^ g;
        }
        let (mut f, mut g, mut out, mut place) = (f, g, 0u64, 1u64);
        while f > 0 || g > 0 {
            out += ((f % m + g % m) % m) * place;
            f /= m;
            g /= m;
            place = place.wrapping_mul(m);
        }
        out
    }

    fn neg_lamps(&self, f: u64) -> u64 {
        let m = self.spec.m;
        if m == 2 {
            return f;
        }
        let (mut f, mut out, mut place) = (f, 0u64, 1u64);
        while f > 0 {
            out += ((m - f % m) % m) * place;
            f /= m;
            place = place.wrapping_mul(m);
        }
        out
    }
}

fn add_lamp(lamps: &mut BTreeMap<i64, u64>, k: i64, v: u64, m: u64) {
    let cur = lamps.get(&k).copied().unwrap_or(0);
    let new = (cur + v) % m;
    if new == 0 {
        lamps.remove(&k);
    } else {
        lamps.insert(k, new);
    }
}

fn m_pow(m: u64, k: u32) -> Result<i128> {
    (m as i128).checked_pow(k).ok_or(Error::Overflow("power of m"))
}

/// m^s * (u / m^e), reduced.
fn scale_by_m_pow(u: i128, e: u32, s: i64, m: u64) -> Result<(i128, u32)> {
    if u == 0 {
        return Ok((0, 0));
    }
    let s_abs = u32::try_from(s.unsigned_abs()).map_err(|_| Error::Overflow("BS exponent"))?;
    if s >= 0 {
        if e >= s_abs {
            Ok((u, e - s_abs))
        } else {
            let f = m_pow(m, s_abs - e)?;
            Ok((u.checked_mul(f).ok_or(Error::Overflow("BS numerator"))?, 0))
        }
    } else {
        Ok((u, e.checked_add(s_abs).ok_or(Error::Overflow("BS exponent"))?))
    }
}

fn add_fractions(u1: i128, e1: u32, u2: i128, e2: u32, m: u64) -> Result<(i128, u32)> {
    let e = e1.max(e2);
    let lift = |u: i128, ei: u32| -> Result<i128> {
        u.checked_mul(m_pow(m, e - ei)?).ok_or(Error::Overflow("BS numerator"))
    };
    let u = lift(u1, e1)?.checked_add(lift(u2, e2)?).ok_or(Error::Overflow("BS numerator"))?;
    Ok(reduce_fraction(u, e, m))
}

pub(super) fn reduce_fraction(mut u: i128, mut e: u32, m: u64) -> (i128, u32) {
    if u == 0 {
        return (0, 0);
    }
    let m = m as i128;
    while e > 0 && u % m == 0 {
        u /= m;
        e -= 1;
    }
    (u, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SpecParams;

    fn group(p: SpecParams) -> Group {
        Group::from_params(&p).unwrap()
    }

    #[test]
    fn lamplighter_hand_product() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(2).n(4));
        let x = g.parse("lamps:1000|pos:1").unwrap();
        let xx = g.mul(&x, &x).unwrap();
        assert_eq!(g.format(&xx), "lamps:1100|pos:2");
    }

    #[test]
    fn cyclic_inverse() {
        for (m, n) in [(2, 4), (3, 5)] {
            let g = group(SpecParams::new(Family::LamplighterFin).m(m).n(n));
            let x = Element::LampFin { lamps: 0, pos: 1 };
            assert_eq!(g.inv(&x).unwrap(), Element::LampFin { lamps: 0, pos: n - 1 });
        }
    }

    #[test]
    fn bs_inf_half() {
        let g = group(SpecParams::new(Family::BsInf).m(2));
        let t = Element::BsInf { u: 0, e: 0, t: 1 };
        let a = Element::BsInf { u: 1, e: 0, t: 0 };
        // t^-1 a t = (1/2, 0)
        let ti = g.inv(&t).unwrap();
        let c = g.mul(&g.mul(&ti, &a).unwrap(), &t).unwrap();
        assert_eq!(c, Element::BsInf { u: 1, e: 1, t: 0 });
    }

    #[test]
    fn bs_inf_overflow_is_reported() {
        let g = group(SpecParams::new(Family::BsInf).m(4));
        let big = Element::BsInf { u: 1, e: 0, t: 70 };
        let a = Element::BsInf { u: 1, e: 0, t: 0 };
        assert!(matches!(g.mul(&big, &a), Err(Error::Overflow(_))));
    }

    #[test]
    fn family_mismatch() {
        let g = group(SpecParams::new(Family::BsFin).m(2).n(3));
        let x = Element::SolFin { v: [0, 0], t: 0 };
        assert!(matches!(g.mul(&x, &x), Err(Error::FamilyMismatch(_))));
    }

    #[test]
    fn rotation_matches_digit_shift() {
        let g = group(SpecParams::new(Family::LamplighterFin).m(3).n(4));
        for lamps in 0..81u64 {
            for k in 0..4u64 {
                let d = g.lamp_digits(lamps);
                let r = g.lamp_digits(g.rotate_lamps(lamps, k));
                for i in 0..4usize {
                    assert_eq!(r[i], d[(i + 4 - k as usize) % 4]);
                }
            }
        }
    }

    #[test]
    fn code_arithmetic_matches_elements() {
        for params in [
            SpecParams::new(Family::LamplighterFin).m(2).n(3),
            SpecParams::new(Family::LamplighterFin).m(3).n(3),
            SpecParams::new(Family::BsFin).m(2).n(4),
            SpecParams::new(Family::BsFin).m(3).n(3),
            SpecParams::new(Family::SolFin).n(3),
        ] {
            let g = group(params);
            let order = g.order().unwrap();
            for x in 0..order {
                let ex = g.decode(x);
                assert_eq!(g.inv_code(x), g.code(&g.inv(&ex).unwrap()).unwrap());
                for y in 0..order {
                    let prod = g.mul(&ex, &g.decode(y)).unwrap();
                    assert_eq!(g.mul_code(x, y), g.code(&prod).unwrap());
                }
            }
        }
    }
}
