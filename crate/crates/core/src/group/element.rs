//! Group elements and their canonical text form.
//!
//! | family          | example                      |
//! |-----------------|------------------------------|
//! | lamplighter-fin | `lamps:0110\|pos:2`          |
//! | lamplighter-inf | `lamps:{-1:1,4:1}\|pos:-3`   |
//! | bs-fin          | `a:8\|t:1`                   |
//! | bs-inf          | `a:-3/2^2\|t:5`              |
//! | sol-fin/inf     | `v:(3,4)\|t:7`               |
//!
//! Finite lamp strings list the lamp at position 0 first. Alphabets larger
//! than 10 separate lamp values with commas.

use std::collections::BTreeMap;

use super::{Family, Group};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// `lamps` holds base-m digits, digit i = lamp at position i.
    LampFin { lamps: u64, pos: u64 },
    /// Finitely supported lamp map; zero lamps are never stored.
    LampInf { lamps: BTreeMap<i64, u64>, pos: i64 },
    BsFin { a: u64, t: u64 },
    /// a = u / m^e with e = 0 or m not dividing u.
    BsInf { u: i128, e: u32, t: i64 },
    SolFin { v: [u64; 2], t: u64 },
    SolInf { v: [i64; 2], t: i64 },
}

impl Element {
    pub fn family(&self) -> Family {
        match self {
            Element::LampFin { .. } => Family::LamplighterFin,
            Element::LampInf { .. } => Family::LamplighterInf,
            Element::BsFin { .. } => Family::BsFin,
            Element::BsInf { .. } => Family::BsInf,
            Element::SolFin { .. } => Family::SolFin,
            Element::SolInf { .. } => Family::SolInf,
        }
    }
}

impl Group {
    /// Checks that `x` belongs to this group with a canonical payload.
    pub fn check(&self, x: &Element) -> Result<()> {
        let s = self.spec();
        let mismatch = || Error::FamilyMismatch(s.label());
        if x.family() != s.family {
            return Err(mismatch());
        }
        let ok = match x {
            Element::LampFin { lamps, pos } => *lamps < self.tables.m_pow[s.n as usize] && *pos < s.n,
            Element::LampInf { lamps, .. } => lamps.values().all(|&v| v != 0 && v < s.m),
            Element::BsFin { a, t } => *a < s.q.unwrap() && *t < s.n,
            Element::BsInf { u, e, .. } => (*e == 0 || *u % s.m as i128 != 0) && !(*u == 0 && *e != 0),
            Element::SolFin { v, t } => v[0] < s.n && v[1] < s.n && *t < s.o_a.unwrap(),
            Element::SolInf { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(mismatch())
        }
    }

    pub fn format(&self, x: &Element) -> String {
        let s = self.spec();
        match x {
            Element::LampFin { lamps, pos } => {
                let digits = self.lamp_digits(*lamps);
                let body = if s.m <= 10 {
                    digits.iter().map(|d| char::from(b'0' + *d as u8)).collect::<String>()
                } else {
                    digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
                };
                format!("lamps:{body}|pos:{pos}")
            }
            Element::LampInf { lamps, pos } => {
                let body = lamps.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",");
                format!("lamps:{{{body}}}|pos:{pos}")
            }
            Element::BsFin { a, t } => format!("a:{a}|t:{t}"),
            Element::BsInf { u, e, t } => {
                if *e == 0 {
                    format!("a:{u}|t:{t}")
                } else {
                    format!("a:{u}/{}^{e}|t:{t}", s.m)
                }
            }
            Element::SolFin { v, t } => format!("v:({},{})|t:{t}", v[0], v[1]),
            Element::SolInf { v, t } => format!("v:({},{})|t:{t}", v[0], v[1]),
        }
    }

    /// Parses the canonical form; rejects out-of-range or non-reduced payloads.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let s = self.spec();
        let bad = |why: &str| Error::parse(format!("{text:?}: {why}"));
        let (left, right) = text.trim().split_once('|').ok_or_else(|| bad("missing '|'"))?;
        let field = |part: &str, key: &str| -> Result<String> {
            part.strip_prefix(key)
                .and_then(|r| r.strip_prefix(':'))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected field {key}")))
        };
        let int = |t: &str| -> Result<i128> { t.trim().parse::<i128>().map_err(|_| bad("bad integer")) };
        let x = match s.family {
            Family::LamplighterFin => {
                let body = field(left, "lamps")?;
                let pos = int(&field(right, "pos")?)?;
                let digits: Vec<i128> = if s.m <= 10 {
                    body.chars()
                        .map(|c| c.to_digit(10).map(i128::from).ok_or_else(|| bad("bad lamp digit")))
                        .collect::<Result<_>>()?
                } else {
                    body.split(',').map(int).collect::<Result<_>>()?
                };
                if digits.len() as u64 != s.n || digits.iter().any(|&d| d < 0 || d >= s.m as i128) {
                    return Err(bad("lamp configuration out of range"));
                }
                let lamps = digits.iter().rev().fold(0u64, |acc, &d| acc * s.m + d as u64);
                Element::LampFin { lamps, pos: u64::try_from(pos).map_err(|_| bad("pos"))? }
            }
            Family::LamplighterInf => {
                let body = field(left, "lamps")?;
                let inner = body
                    .strip_prefix('{')
                    .and_then(|b| b.strip_suffix('}'))
                    .ok_or_else(|| bad("lamps must be {..}"))?;
                let mut lamps = BTreeMap::new();
                for item in inner.split(',').filter(|i| !i.trim().is_empty()) {
                    let (k, v) = item.split_once(':').ok_or_else(|| bad("lamp entry k:v"))?;
                    let k = i64::try_from(int(k)?).map_err(|_| bad("lamp index"))?;
                    let v = u64::try_from(int(v)?).map_err(|_| bad("lamp value"))?;
                    if lamps.insert(k, v).is_some() {
                        return Err(bad("repeated lamp index"));
                    }
                }
                let pos = i64::try_from(int(&field(right, "pos")?)?).map_err(|_| bad("pos"))?;
                Element::LampInf { lamps, pos }
            }
            Family::BsFin => {
                let a = u64::try_from(int(&field(left, "a")?)?).map_err(|_| bad("a"))?;
                let t = u64::try_from(int(&field(right, "t")?)?).map_err(|_| bad("t"))?;
                Element::BsFin { a, t }
            }
            Family::BsInf => {
                let a = field(left, "a")?;
                let (u, e) = match a.split_once('/') {
                    None => (int(&a)?, 0u32),
                    Some((u, den)) => {
                        let (base, e) = den.split_once('^').ok_or_else(|| bad("denominator m^e"))?;
                        if int(base)? != s.m as i128 {
                            return Err(bad("denominator base must be m"));
                        }
                        (int(u)?, u32::try_from(int(e)?).map_err(|_| bad("exponent"))?)
                    }
                };
                let t = i64::try_from(int(&field(right, "t")?)?).map_err(|_| bad("t"))?;
                Element::BsInf { u, e, t }
            }
            Family::SolFin | Family::SolInf => {
                let v = field(left, "v")?;
                let inner = v
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(|| bad("v must be (x,y)"))?;
                let (x, y) = inner.split_once(',').ok_or_else(|| bad("v must be (x,y)"))?;
                let (x, y) = (int(x)?, int(y)?);
                let t = int(&field(right, "t")?)?;
                if s.family == Family::SolFin {
                    let conv = |z: i128| u64::try_from(z).map_err(|_| bad("negative residue"));
                    Element::SolFin { v: [conv(x)?, conv(y)?], t: conv(t)? }
                } else {
                    let conv = |z: i128| i64::try_from(z).map_err(|_| bad("out of range"));
                    Element::SolInf { v: [conv(x)?, conv(y)?], t: conv(t)? }
                }
            }
        };
        self.check(&x).map_err(|_| bad("not canonical for this group"))?;
        Ok(x)
    }

    /// Lamp values at positions 0..n of a finite lamp configuration.
    pub fn lamp_digits(&self, mut lamps: u64) -> Vec<u64> {
        let s = self.spec();
        (0..s.n)
            .map(|_| {
                let d = lamps % s.m;
                lamps /= s.m;
                d
            })
            .collect()
    }
}
