//! Rational torsion via Nagell-Lutz on the integral model
//! Y^2 = X^3 - 27 c4 X - 54 c6, with Mazur's bound on element orders.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{factor, isqrt, PPower};
use crate::curve_model::{minimal_model, WeierstrassCurve};
use crate::error::Result;
use crate::local_analysis::{local_packet, ReductionType};

/// Largest order of a rational torsion point over Q.
pub const MAX_TORSION_ORDER: u32 = 12;

/// An affine rational point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

fn rat_str(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rat_str(&self.x), rat_str(&self.y))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [rat_str(&self.x), rat_str(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        let parse = |s: &str| {
            crate::curve_model::parse_rational(s).map_err(serde::de::Error::custom)
        };
        Ok(RationalPoint { x: parse(&x)?, y: parse(&y)? })
    }
}

/// Projective point: `None` is the point at infinity.
pub type Point = Option<RationalPoint>;

/// Group law on a general Weierstrass model over Q.
pub fn add_points(c: &WeierstrassCurve, p: &Point, q: &Point) -> Point {
    let (p1, p2) = match (p, q) {
        (None, _) => return q.clone(),
        (_, None) => return p.clone(),
        (Some(a), Some(b)) => (a, b),
    };
    let [a1, a2, a3, a4, a6] = c.a_invariants();
    let (x1, y1, x2, y2) = (&p1.x, &p1.y, &p2.x, &p2.y);
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let (lambda, nu) = if x1 == x2 {
        let denom = &two * y1 + a1 * x1 + a3;
        if denom.is_zero() || (y1 + y2 + a1 * x2 + a3).is_zero() {
            return None;
        }
        let lambda = (&three * x1 * x1 + &two * a2 * x1 + a4 - a1 * y1) / &denom;
        let nu = (-(x1 * x1 * x1) + a4 * x1 + &two * a6 - a3 * y1) / &denom;
        (lambda, nu)
    } else {
        let dx = x2 - x1;
        ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
    };
    let x3 = &lambda * &lambda + a1 * &lambda - a2 - x1 - x2;
    let y3 = -(&lambda + a1) * &x3 - nu - a3;
    Some(RationalPoint { x: x3, y: y3 })
}

pub fn negate_point(c: &WeierstrassCurve, p: &Point) -> Point {
    p.as_ref().map(|pt| RationalPoint {
        x: pt.x.clone(),
        y: -&pt.y - c.a1() * &pt.x - c.a3(),
    })
}

pub fn multiply_point(c: &WeierstrassCurve, p: &Point, k: u32) -> Point {
    let mut acc = None;
    for _ in 0..k {
        acc = add_points(c, &acc, p);
    }
    acc
}

pub fn is_on_curve(c: &WeierstrassCurve, p: &RationalPoint) -> bool {
    let [a1, a2, a3, a4, a6] = c.a_invariants();
    let (x, y) = (&p.x, &p.y);
    y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6
}

/// Order of a point if it is at most `bound`.
pub fn point_order(c: &WeierstrassCurve, p: &Point, bound: u32) -> Option<u32> {
    let mut acc = p.clone();
    for k in 1..=bound {
        if acc.is_none() {
            return Some(k);
        }
        acc = add_points(c, &acc, p);
    }
    None
}

/// One of the fifteen groups allowed by Mazur's theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TorsionStructure {
    /// Z/n, with n = 1 the trivial group.
    Cyclic(u32),
    /// Z/2 x Z/2m.
    TwoByTwoM(u32),
}

impl TorsionStructure {
    pub fn order(&self) -> u32 {
        match *self {
            TorsionStructure::Cyclic(n) => n,
            TorsionStructure::TwoByTwoM(m) => 4 * m,
        }
    }

    pub fn is_admissible(&self) -> bool {
        match *self {
            TorsionStructure::Cyclic(n) => (1..=10).contains(&n) || n == 12,
            TorsionStructure::TwoByTwoM(m) => (1..=4).contains(&m),
        }
    }
}

impl fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TorsionStructure::Cyclic(1) => write!(f, "trivial"),
            TorsionStructure::Cyclic(n) => write!(f, "Z/{n}"),
            TorsionStructure::TwoByTwoM(m) => write!(f, "Z/2xZ/{}", 2 * m),
        }
    }
}

impl FromStr for TorsionStructure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("bad torsion structure {s:?}");
        if s == "trivial" {
            return Ok(TorsionStructure::Cyclic(1));
        }
        let out = if let Some(rest) = s.strip_prefix("Z/2xZ/") {
            let n: u32 = rest.parse().map_err(|_| bad())?;
            if !n.is_multiple_of(2) {
                return Err(bad());
            }
            TorsionStructure::TwoByTwoM(n / 2)
        } else if let Some(rest) = s.strip_prefix("Z/") {
            TorsionStructure::Cyclic(rest.parse().map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        if out.is_admissible() {
            Ok(out)
        } else {
            Err(bad())
        }
    }
}

impl Serialize for TorsionStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TorsionStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// E(Q)_tors on the minimal model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionInfo {
    pub group_structure: TorsionStructure,
    pub order: u32,
    /// Generators with their orders.
    pub generators: Vec<(RationalPoint, u32)>,
    /// All nonzero torsion points, sorted.
    pub points: Vec<RationalPoint>,
}

impl TorsionInfo {
    pub fn p_part(&self, p: u64) -> PPower {
        PPower::part_of_u64(self.order as u64, p)
    }
}

fn eval_cubic(a: &BigInt, c: &BigInt, x: &BigInt) -> BigInt {
    x * x * x + a * x + c
}

/// Integer roots of x^3 + a x + c, by bisection on intervals where the
/// cubic is monotone.
pub fn integer_roots_depressed_cubic(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let bound = BigInt::one() + a.abs().max(c.abs());
    let mut intervals: Vec<(BigInt, BigInt, bool)> = Vec::new();
    if a.is_negative() {
        let s = isqrt(&(-a).div_floor(&BigInt::from(3)));
        intervals.push((-&bound, -&s - 1, true));
        intervals.push((-&s, s.clone(), false));
        intervals.push((&s + 1, bound.clone(), true));
    } else {
        intervals.push((-&bound, bound.clone(), true));
    }
    let mut roots = BTreeSet::new();
    for (lo, hi, increasing) in intervals {
        if lo > hi {
            continue;
        }
        // smallest x in [lo, hi] with sign condition reached
        let reached = |x: &BigInt| {
            let v = eval_cubic(a, c, x);
            if increasing {
                !v.is_negative()
            } else {
                !v.is_positive()
            }
        };
        if !reached(&hi) {
            continue;
        }
        let (mut l, mut h) = (lo, hi);
        while l < h {
            let mid = (&l + &h).div_floor(&BigInt::from(2));
            if reached(&mid) {
                h = mid;
            } else {
                l = mid + 1;
            }
        }
        if eval_cubic(a, c, &l).is_zero() {
            roots.insert(l);
        }
    }
    roots.into_iter().collect()
}

/// Non-negative y with y^2 dividing n.
fn square_divisor_roots(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for (p, e) in factor(n) {
        let p = BigInt::from(p);
        let mut next = Vec::new();
        for y in &out {
            let mut pk = BigInt::one();
            for _ in 0..=(e / 2) {
                next.push(y * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out
}

/// Rational torsion subgroup, with points on the minimal model.
pub fn torsion_subgroup(c: &WeierstrassCurve) -> Result<TorsionInfo> {
    let (min, _) = minimal_model(c)?;
    let c4 = min.c4().to_integer();
    let c6 = min.c6().to_integer();
    let a = BigInt::from(-27) * &c4;
    let b = BigInt::from(-54) * &c6;
    let short = WeierstrassCurve::from_bigints([
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
        a.clone(),
        b.clone(),
    ])?;
    let disc = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;

    let mut found: BTreeSet<RationalPoint> = BTreeSet::new();
    let mut ys = vec![BigInt::zero()];
    ys.extend(square_divisor_roots(&disc));
    for y in ys {
        for x in integer_roots_depressed_cubic(&a, &(&b - &y * &y)) {
            for yy in [y.clone(), -y.clone()] {
                let pt = RationalPoint {
                    x: BigRational::from_integer(x.clone()),
                    y: BigRational::from_integer(yy),
                };
                if found.contains(&pt) {
                    continue;
                }
                if point_order(&short, &Some(pt.clone()), MAX_TORSION_ORDER).is_some() {
                    found.insert(pt);
                }
            }
        }
    }

    // back to the minimal model: X = 36x + 3 b2, Y = 108 (2y + a1 x + a3)
    let to_min = |pt: &RationalPoint| {
        let x = (&pt.x - BigRational::from_integer(3.into()) * min.b2())
            / BigRational::from_integer(36.into());
        let y = (&pt.y / BigRational::from_integer(108.into()) - min.a1() * &x - min.a3())
            / BigRational::from_integer(2.into());
        RationalPoint { x, y }
    };
    let points: Vec<RationalPoint> = {
        let set: BTreeSet<RationalPoint> = found.iter().map(to_min).collect();
        set.into_iter().collect()
    };
    let with_orders: Vec<(RationalPoint, u32)> = points
        .iter()
        .map(|pt| {
            let ord = point_order(&min, &Some(pt.clone()), MAX_TORSION_ORDER)
                .expect("torsion point keeps its order under isomorphism");
            (pt.clone(), ord)
        })
        .collect();

    let order = points.len() as u32 + 1;
    let two_torsion: Vec<&RationalPoint> =
        with_orders.iter().filter(|(_, o)| *o == 2).map(|(p, _)| p).collect();
    let max_elem = with_orders.iter().max_by_key(|(_, o)| *o).cloned();

    let (group_structure, generators) = if two_torsion.len() == 3 {
        let (gen, ord) = max_elem.expect("full 2-torsion is nonempty");
        let half = multiply_point(&min, &Some(gen.clone()), ord / 2);
        let other = two_torsion
            .iter()
            .find(|t| Some((**t).clone()) != half)
            .map(|t| (*t).clone())
            .expect("a 2-torsion point outside the cyclic part");
        (TorsionStructure::TwoByTwoM(order / 4), vec![(gen, ord), (other, 2)])
    } else {
        match max_elem {
            None => (TorsionStructure::Cyclic(1), Vec::new()),
            Some((gen, ord)) => (TorsionStructure::Cyclic(order), vec![(gen, ord)]),
        }
    };
    if group_structure.order() != order || !group_structure.is_admissible() {
        return Err(crate::error::Error::Internal(format!(
            "torsion of order {order} does not match structure {group_structure}"
        )));
    }
    Ok(TorsionInfo { group_structure, order, generators, points })
}

pub fn torsion_p_part(c: &WeierstrassCurve, p: u64) -> Result<PPower> {
    Ok(torsion_subgroup(c)?.p_part(p))
}

/// Outcome of checking that supersingular reduction with a_p = 0 kills
/// p-torsion over Q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TorsionVerdict {
    Consistent { vacuous: bool },
    Inconsistent { torsion_p_part: PPower, a_p: i64 },
}

impl TorsionVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, TorsionVerdict::Consistent { .. })
    }
}

pub fn check_torsion_vanishing(c: &WeierstrassCurve, p: u64) -> Result<TorsionVerdict> {
    let local = local_packet(c, &BigUint::from(p))?;
    let applies =
        local.reduction_type == ReductionType::GoodSupersingular && local.a_q == Some(0);
    if !applies {
        return Ok(TorsionVerdict::Consistent { vacuous: true });
    }
    let part = torsion_p_part(c, p)?;
    if part.is_one() {
        Ok(TorsionVerdict::Consistent { vacuous: false })
    } else {
        Ok(TorsionVerdict::Inconsistent { torsion_p_part: part, a_p: 0 })
    }
}
