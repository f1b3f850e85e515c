//! Exact arithmetic for the lamplighter, Baumslag-Solitar and SOL families,
//! their finite quotients and the quotient maps between them.
//!
//! Finite lamplighter elements pack the lamp configuration into a base-`m`
//! integer (digit `i` is the lamp at position `i`), so every finite element
//! is a few machine words and multiplication never allocates.

mod arith;
mod element;
mod matrix;
mod project;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use element::Element;
pub use matrix::{
    check_hyperbolic, det, matrix_order, trace, Mat2, ModMat2, DEFAULT_ORDER_CAP, DEFAULT_SOL_MATRIX,
};
pub use project::project;

/// Default cap on the order of a finite group.
pub const DEFAULT_ORDER_LIMIT: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    LamplighterFin,
    BsFin,
    SolFin,
    LamplighterInf,
    BsInf,
    SolInf,
}

impl Family {
    pub fn is_finite(self) -> bool {
        matches!(self, Family::LamplighterFin | Family::BsFin | Family::SolFin)
    }

    /// The infinite group this family is a quotient of (identity on parents).
    pub fn parent(self) -> Family {
        match self {
            Family::LamplighterFin | Family::LamplighterInf => Family::LamplighterInf,
            Family::BsFin | Family::BsInf => Family::BsInf,
            Family::SolFin | Family::SolInf => Family::SolInf,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LamplighterFin => "lamplighter-fin",
            Family::BsFin => "bs-fin",
            Family::SolFin => "sol-fin",
            Family::LamplighterInf => "lamplighter-inf",
            Family::BsInf => "bs-inf",
            Family::SolInf => "sol-inf",
        }
    }

    fn uses_m(self) -> bool {
        !matches!(self, Family::SolFin | Family::SolInf)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lamplighter-fin" => Family::LamplighterFin,
            "bs-fin" => Family::BsFin,
            "sol-fin" => Family::SolFin,
            "lamplighter-inf" => Family::LamplighterInf,
            "bs-inf" => Family::BsInf,
            "sol-inf" => Family::SolInf,
            other => return Err(Error::BadParam(format!("unknown family {other:?}"))),
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The JSON form of a group spec, e.g. `{"family":"sol-fin","n":5,"A":[[2,1],[1,1]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecParams {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

impl SpecParams {
    pub fn new(family: Family) -> Self {
        SpecParams { family, m: None, n: None, a: None, cap: None }
    }

    pub fn m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn matrix(mut self, a: Mat2) -> Self {
        self.a = Some(a);
        self
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.cap = Some(cap);
        self
    }
}

/// Validated group parameters with derived quantities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSpec {
    pub family: Family,
    /// Lamp alphabet / Baumslag-Solitar base; 0 for SOL.
    pub m: u64,
    /// Quotient size; 0 for infinite parents.
    pub n: u64,
    #[serde(rename = "A")]
    pub a: Mat2,
    /// Modulus m^n - 1 of the bs-fin base group.
    pub q: Option<u64>,
    /// Order of A mod n (sol-fin).
    #[serde(rename = "oA")]
    pub o_a: Option<u64>,
    pub order: Option<u64>,
    pub cap: u64,
}

impl GroupSpec {
    pub fn is_finite(&self) -> bool {
        self.family.is_finite()
    }

    pub fn params(&self) -> SpecParams {
        let mut p = SpecParams::new(self.family);
        if self.family.uses_m() {
            p.m = Some(self.m);
        } else {
            p.a = Some(self.a);
        }
        if self.is_finite() {
            p.n = Some(self.n);
        }
        if self.cap != DEFAULT_ORDER_LIMIT {
            p.cap = Some(self.cap);
        }
        p
    }

    /// The infinite parent of a finite spec (same m or A).
    pub fn parent(&self) -> GroupSpec {
        let mut p = SpecParams::new(self.family.parent());
        if self.family.uses_m() {
            p.m = Some(self.m);
        } else {
            p.a = Some(self.a);
        }
        p.cap = Some(self.cap);
        make_spec(&p).expect("parent of a valid spec is valid")
    }

    /// Short human label, e.g. `L(2,4)`, `BS(2,5)`, `SOL(5)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::LamplighterFin => format!("L({},{})", self.m, self.n),
            Family::BsFin => format!("BS({},{})", self.m, self.n),
            Family::SolFin => format!("SOL({})", self.n),
            Family::LamplighterInf => format!("L({})", self.m),
            Family::BsInf => format!("BS({})", self.m),
            Family::SolInf => "SOL".to_string(),
        }
    }
}

/// Validates parameters and computes q, o(A,n) and |G|.
pub fn make_spec(params: &SpecParams) -> Result<GroupSpec> {
    let family = params.family;
    let cap = params.cap.unwrap_or(DEFAULT_ORDER_LIMIT);
    let mut spec = GroupSpec {
        family,
        m: 0,
        n: 0,
        a: DEFAULT_SOL_MATRIX,
        q: None,
        o_a: None,
        order: None,
        cap,
    };

    if family.uses_m() {
        let m = params.m.ok_or_else(|| Error::BadParam(format!("{family} needs m")))?;
        if m < 2 {
            return Err(Error::BadParam(format!("m = {m} must be >= 2")));
        }
        spec.m = m;
        if params.a.is_some() {
            return Err(Error::BadParam(format!("{family} takes no matrix")));
        }
    } else {
        if params.m.is_some() {
            return Err(Error::BadParam(format!("{family} takes no m")));
        }
        let a = params.a.unwrap_or(DEFAULT_SOL_MATRIX);
        check_hyperbolic(&a)?;
        spec.a = a;
    }

    if family.is_finite() {
        let n = params.n.ok_or_else(|| Error::BadParam(format!("{family} needs n")))?;
        if n < 2 {
            return Err(Error::BadParam(format!("n = {n} must be >= 2")));
        }
        spec.n = n;
    } else if params.n.is_some() {
        return Err(Error::BadParam(format!("{family} is infinite and takes no n")));
    }

    let too_big = |what: &str| Error::cap(what, u64::MAX, cap);
    match family {
        Family::LamplighterFin => {
            let lamps = checked_pow(spec.m, spec.n).ok_or_else(|| too_big("order"))?;
            let order = lamps.checked_mul(spec.n).ok_or_else(|| too_big("order"))?;
            spec.order = Some(order);
        }
        Family::BsFin => {
            let q = checked_pow(spec.m, spec.n).ok_or_else(|| too_big("order"))? - 1;
            spec.q = Some(q);
            spec.order = Some(q.checked_mul(spec.n).ok_or_else(|| too_big("order"))?);
        }
        Family::SolFin => {
            let n2 = spec.n.checked_mul(spec.n).ok_or_else(|| too_big("order"))?;
            if n2 > cap {
                return Err(Error::cap("order", n2, cap));
            }
            let o = matrix_order(&spec.a, spec.n, DEFAULT_ORDER_CAP.min(cap / n2 + 1))?;
            spec.o_a = Some(o);
            spec.order = Some(n2 * o);
        }
        _ => {}
    }
    if let Some(order) = spec.order {
        if order > cap {
            return Err(Error::cap("order", order, cap));
        }
    }
    Ok(spec)
}

pub(crate) fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Precomputed tables shared by all clones of a [`Group`].
#[derive(Debug)]
struct Tables {
    /// m^i for i in 0..=n (lamplighter-fin), or m^s mod q for s in 0..n (bs-fin).
    m_pow: Vec<u64>,
    /// A^k mod n for k in 0..o(A,n) (sol-fin).
    a_pow: Vec<ModMat2>,
    generators: Vec<Element>,
}

/// Arithmetic engine for one [`GroupSpec`]. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Group {
    spec: GroupSpec,
    tables: Arc<Tables>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let mut tables = Tables { m_pow: Vec::new(), a_pow: Vec::new(), generators: Vec::new() };
        match spec.family {
            Family::LamplighterFin => {
                tables.m_pow = (0..=spec.n).map(|i| spec.m.pow(i as u32)).collect();
            }
            Family::BsFin => {
                let q = spec.q.unwrap();
                let mut x = 1 % q;
                for _ in 0..spec.n {
                    tables.m_pow.push(x);
                    x = ((x as u128 * spec.m as u128) % q as u128) as u64;
                }
            }
            Family::SolFin => {
                let base = matrix::reduce(&spec.a, spec.n);
                let mut x = matrix::identity_mod(spec.n);
                for _ in 0..spec.o_a.unwrap() {
                    tables.a_pow.push(x);
                    x = matrix::mul_mod(&x, &base, spec.n);
                }
            }
            _ => {}
        }
        let mut group = Group { spec, tables: Arc::new(tables) };
        let generators = group.build_generators();
        if generators.is_empty() {
            return Err(Error::DegenerateGenerators);
        }
        Arc::get_mut(&mut group.tables).unwrap().generators = generators;
        Ok(group)
    }

    pub fn from_params(params: &SpecParams) -> Result<Self> {
        Group::new(make_spec(params)?)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn order(&self) -> Option<u64> {
        self.spec.order
    }

    /// The symmetric generating set, in fixed order: lamp/translation
    /// generator, its inverse, then the cyclic generator and its inverse.
    /// Repeats and the identity are dropped.
    pub fn generators(&self) -> &[Element] {
        &self.tables.generators
    }

    fn build_generators(&self) -> Vec<Element> {
        let s = &self.spec;
        let candidates = match s.family {
            Family::LamplighterFin => vec![
                Element::LampFin { lamps: 1, pos: 0 },
                Element::LampFin { lamps: s.m - 1, pos: 0 },
                Element::LampFin { lamps: 0, pos: 1 % s.n },
                Element::LampFin { lamps: 0, pos: s.n - 1 },
            ],
            Family::LamplighterInf => vec![
                Element::LampInf { lamps: BTreeMap::from([(0, 1)]), pos: 0 },
                Element::LampInf { lamps: BTreeMap::from([(0, s.m - 1)]), pos: 0 },
                Element::LampInf { lamps: BTreeMap::new(), pos: 1 },
                Element::LampInf { lamps: BTreeMap::new(), pos: -1 },
            ],
            Family::BsFin => {
                let q = s.q.unwrap();
                vec![
                    Element::BsFin { a: 1 % q, t: 0 },
                    Element::BsFin { a: q - 1, t: 0 },
                    Element::BsFin { a: 0, t: 1 % s.n },
                    Element::BsFin { a: 0, t: s.n - 1 },
                ]
            }
            Family::BsInf => vec![
                Element::BsInf { u: 1, e: 0, t: 0 },
                Element::BsInf { u: -1, e: 0, t: 0 },
                Element::BsInf { u: 0, e: 0, t: 1 },
                Element::BsInf { u: 0, e: 0, t: -1 },
            ],
            Family::SolFin => {
                let o = s.o_a.unwrap();
                vec![
                    Element::SolFin { v: [1 % s.n, 0], t: 0 },
                    Element::SolFin { v: [s.n - 1, 0], t: 0 },
                    Element::SolFin { v: [0, 0], t: 1 % o },
                    Element::SolFin { v: [0, 0], t: (o - 1) % o },
                ]
            }
            Family::SolInf => vec![
                Element::SolInf { v: [1, 0], t: 0 },
                Element::SolInf { v: [-1, 0], t: 0 },
                Element::SolInf { v: [0, 0], t: 1 },
                Element::SolInf { v: [0, 0], t: -1 },
            ],
        };
        let id = self.identity();
        let mut out: Vec<Element> = Vec::with_capacity(4);
        for g in candidates {
            if g != id && !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    /// Dense code in `0..|G|` for elements of finite groups.
    pub fn code(&self, x: &Element) -> Option<u64> {
        let s = &self.spec;
        match *x {
            Element::LampFin { lamps, pos } => Some(lamps * s.n + pos),
            Element::BsFin { a, t } => Some(a * s.n + t),
            Element::SolFin { v, t } => Some((v[0] * s.n + v[1]) * s.o_a.unwrap() + t),
            _ => None,
        }
    }

    /// Inverse of [`Group::code`].
    pub fn decode(&self, code: u64) -> Element {
        let s = &self.spec;
        match s.family {
            Family::LamplighterFin => Element::LampFin { lamps: code / s.n, pos: code % s.n },
            Family::BsFin => Element::BsFin { a: code / s.n, t: code % s.n },
            Family::SolFin => {
                let o = s.o_a.unwrap();
                let t = code % o;
                let v = code / o;
                Element::SolFin { v: [v / s.n, v % s.n], t }
            }
            _ => panic!("decode on infinite group {}", s.family),
        }
    }

    /// Projection of an element onto the cyclic quotient: (position, modulus).
    /// The modulus is 0 for infinite groups.
    pub fn cyclic_part(&self, x: &Element) -> (i64, u64) {
        match *x {
            Element::LampFin { pos, .. } => (pos as i64, self.spec.n),
            Element::BsFin { t, .. } => (t as i64, self.spec.n),
            Element::SolFin { t, .. } => (t as i64, self.spec.o_a.unwrap()),
            Element::LampInf { pos, .. } => (pos, 0),
            Element::BsInf { t, .. } => (t, 0),
            Element::SolInf { t, .. } => (t, 0),
        }
    }

    /// Whether `x` lies in the kernel N of the map to the cyclic factor.
    pub fn in_kernel(&self, x: &Element) -> bool {
        self.cyclic_part(x).0 == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: SpecParams) -> GroupSpec {
        make_spec(&p).unwrap()
    }

    #[test]
    fn orders() {
        let l = spec(SpecParams::new(Family::LamplighterFin).m(2).n(4));
        assert_eq!(l.order, Some(64));
        let b = spec(SpecParams::new(Family::BsFin).m(2).n(4));
        assert_eq!(b.q, Some(15));
        assert_eq!(b.order, Some(60));
        let s = spec(SpecParams::new(Family::SolFin).n(5));
        assert_eq!(s.o_a, Some(10));
        assert_eq!(s.order, Some(250));
        assert_eq!(spec(SpecParams::new(Family::LamplighterFin).m(3).n(5)).order, Some(243 * 5));
        assert_eq!(spec(SpecParams::new(Family::BsFin).m(3).n(3)).order, Some(26 * 3));
    }

    #[test]
    fn param_errors() {
        assert!(matches!(
            make_spec(&SpecParams::new(Family::LamplighterFin).m(1).n(4)),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            make_spec(&SpecParams::new(Family::BsFin).m(2).n(1)),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            make_spec(&SpecParams::new(Family::SolFin).n(5).matrix([[1, 1], [0, 1]])),
            Err(Error::BadMatrix { .. })
        ));
        assert!(matches!(
            make_spec(&SpecParams::new(Family::LamplighterFin).m(2).n(30)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            make_spec(&SpecParams::new(Family::LamplighterFin).m(2).n(8).cap(1000)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(make_spec(&SpecParams::new(Family::LamplighterInf).m(2).n(3)).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s: SpecParams = serde_json::from_str(r#"{"family":"sol-fin","n":5,"A":[[2,1],[1,1]]}"#).unwrap();
        let g = make_spec(&s).unwrap();
        assert_eq!(g.order, Some(250));
        let again: SpecParams = serde_json::from_str(&serde_json::to_string(&g.params()).unwrap()).unwrap();
        assert_eq!(make_spec(&again).unwrap(), g);
        assert!(serde_json::from_str::<SpecParams>(r#"{"family":"bs-fin","m":2,"n":3,"x":1}"#).is_err());
    }

    #[test]
    fn generator_counts() {
        let count = |p: SpecParams| Group::from_params(&p).unwrap().generators().len();
        assert_eq!(count(SpecParams::new(Family::LamplighterFin).m(2).n(4)), 3);
        assert_eq!(count(SpecParams::new(Family::BsFin).m(3).n(3)), 4);
        assert_eq!(count(SpecParams::new(Family::LamplighterFin).m(2).n(2)), 2);
        assert_eq!(count(SpecParams::new(Family::LamplighterInf).m(2)), 3);
        assert_eq!(count(SpecParams::new(Family::SolFin).n(5)), 4);
        assert_eq!(count(SpecParams::new(Family::SolInf)), 4);
    }

    #[test]
    fn l22_generators_are_involutions() {
        let g = Group::from_params(&SpecParams::new(Family::LamplighterFin).m(2).n(2)).unwrap();
        for s in g.generators() {
            assert_eq!(g.mul(s, s).unwrap(), g.identity());
        }
    }

    #[test]
    fn codes_are_bijective() {
        for p in [
            SpecParams::new(Family::LamplighterFin).m(3).n(3),
            SpecParams::new(Family::BsFin).m(2).n(4),
            SpecParams::new(Family::SolFin).n(4),
        ] {
            let g = Group::from_params(&p).unwrap();
            let order = g.order().unwrap();
            for c in 0..order {
                let x = g.decode(c);
                assert_eq!(g.code(&x), Some(c));
                g.check(&x).unwrap();
            }
        }
    }
}
