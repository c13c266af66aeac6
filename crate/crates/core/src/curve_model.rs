//! Weierstrass models over Q.
//!
//! A curve is stored by its five a-invariants together with the derived
//! b-, c-invariants and the discriminant. All arithmetic is exact. The
//! global minimal model is produced with the Laska-Kraus-Connell method:
//! scale away common p^12 factors of the discriminant subject to Kraus's
//! integrality conditions at 2 and 3, then rebuild a reduced model with
//! a1, a3 in {0, 1} and a2 in {-1, 0, 1}.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn fmt_rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse "n" or "n/d" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::NonRational(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| bad())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    a: [BigRational; 5],
    b2: BigRational,
    b4: BigRational,
    b6: BigRational,
    b8: BigRational,
    c4: BigRational,
    c6: BigRational,
    delta: BigRational,
    pub label: Option<String>,
}

impl WeierstrassCurve {
    /// Builds a curve from [a1, a2, a3, a4, a6], rejecting singular models.
    pub fn new(a: [BigRational; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = &a;
        let b2 = a1 * a1 + rat(4) * a2;
        let b4 = rat(2) * a4 + a1 * a3;
        let b6 = a3 * a3 + rat(4) * a6;
        let b8 = a1 * a1 * a6 + rat(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4 = &b2 * &b2 - rat(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + rat(36) * &b2 * &b4 - rat(216) * &b6;
        let delta = -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6
            + rat(9) * &b2 * &b4 * &b6;

        // self-check of the stored invariants
        if rat(4) * &b8 != &b2 * &b6 - &b4 * &b4
            || rat(1728) * &delta != &c4 * &c4 * &c4 - &c6 * &c6
        {
            return Err(Error::Internal("Weierstrass invariant identities failed".into()));
        }
        if delta.is_zero() {
            return Err(Error::SingularModel);
        }
        Ok(WeierstrassCurve { a, b2, b4, b6, b8, c4, c6, delta, label: None })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(rat))
    }

    pub fn from_bigints(a: [BigInt; 5]) -> Result<Self> {
        Self::new(a.map(BigRational::from_integer))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn a_invariants(&self) -> &[BigRational; 5] {
        &self.a
    }
    pub fn a1(&self) -> &BigRational {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigRational {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigRational {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigRational {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigRational {
        &self.a[4]
    }
    pub fn b2(&self) -> &BigRational {
        &self.b2
    }
    pub fn b4(&self) -> &BigRational {
        &self.b4
    }
    pub fn b6(&self) -> &BigRational {
        &self.b6
    }
    pub fn b8(&self) -> &BigRational {
        &self.b8
    }
    pub fn c4(&self) -> &BigRational {
        &self.c4
    }
    pub fn c6(&self) -> &BigRational {
        &self.c6
    }
    pub fn discriminant(&self) -> &BigRational {
        &self.delta
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integer())
    }

    /// The a-invariants as integers, if the model is integral.
    pub fn integral_a(&self) -> Option<[BigInt; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(self.a.clone().map(|x| x.to_integer()))
    }

    /// Integer discriminant of an integral model.
    pub fn integral_discriminant(&self) -> Option<BigInt> {
        self.delta.is_integer().then(|| self.delta.to_integer())
    }

    /// Comma-separated "a1,a2,a3,a4,a6" with fractions written as "n/d".
    pub fn coefficients_string(&self) -> String {
        self.a.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
    }

    /// True when the model is the reduced global minimal model.
    pub fn is_minimal(&self) -> bool {
        minimal_model(self).map(|(m, _)| m.a == self.a).unwrap_or(false)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.coefficients_string())
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;

    /// Parses the curve text format "a1,a2,a3,a4,a6".
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::NonRational(format!(
                "{s:?}: expected five comma-separated coefficients"
            )));
        }
        let mut a: [BigRational; 5] = Default::default();
        for (slot, part) in a.iter_mut().zip(parts) {
            *slot = parse_rational(part)?;
        }
        WeierstrassCurve::new(a)
    }
}

/// Change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelTransform {
    pub u: BigRational,
    pub r: BigRational,
    pub s: BigRational,
    pub t: BigRational,
}

impl ModelTransform {
    pub fn identity() -> Self {
        ModelTransform { u: rat(1), r: rat(0), s: rat(0), t: rat(0) }
    }

    pub fn new(u: BigRational, r: BigRational, s: BigRational, t: BigRational) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::Internal("transform with u = 0".into()));
        }
        Ok(ModelTransform { u, r, s, t })
    }

    pub fn scaling(u: BigRational) -> Self {
        ModelTransform { u, r: rat(0), s: rat(0), t: rat(0) }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Model obtained by applying this change of coordinates.
    pub fn apply(&self, c: &WeierstrassCurve) -> WeierstrassCurve {
        let ModelTransform { u, r, s, t } = self;
        let [a1, a2, a3, a4, a6] = &c.a;
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let n1 = (a1 + rat(2) * s) / u;
        let n2 = (a2 - s * a1 + rat(3) * r - s * s) / &u2;
        let n3 = (a3 + r * a1 + rat(2) * t) / &u3;
        let n4 = (a4 - s * a3 + rat(2) * r * a2 - (t + r * s) * a1 + rat(3) * r * r
            - rat(2) * s * t)
            / &u4;
        let n6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / &u6;
        let mut out = WeierstrassCurve::new([n1, n2, n3, n4, n6])
            .expect("isomorphic model of a nonsingular curve is nonsingular");
        out.label = c.label.clone();
        out
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ModelTransform) -> ModelTransform {
        let u1 = &self.u;
        let u1sq = u1 * u1;
        ModelTransform {
            u: u1 * &next.u,
            r: &self.r + &u1sq * &next.r,
            s: &self.s + u1 * &next.s,
            t: &self.t + &u1sq * u1 * &next.t + &self.s * &u1sq * &next.r,
        }
    }

    pub fn inverse(&self) -> ModelTransform {
        let u = &self.u;
        ModelTransform {
            u: rat(1) / u,
            r: -&self.r / (u * u),
            s: -&self.s / u,
            t: (&self.r * &self.s - &self.t) / (u * u * u),
        }
    }
}

/// Solve for the transform with the given u taking `from` to `to`;
/// the two models must share c4 and c6 up to the u-scaling.
fn transform_between(
    from: &WeierstrassCurve,
    to: &WeierstrassCurve,
    u: &BigRational,
) -> ModelTransform {
    let [a1, a2, a3, _, _] = &from.a;
    let s = (u * to.a1() - a1) / rat(2);
    let r = (u * u * to.a2() - a2 + &s * a1 + &s * &s) / rat(3);
    let t = (u * u * u * to.a3() - a3 - &r * a1) / rat(2);
    ModelTransform { u: u.clone(), r, s, t }
}

/// Kraus's conditions for (c4, c6) to come from an integral model.
fn kraus_ok(c4: &BigInt, c6: &BigInt) -> bool {
    let three = BigInt::from(3);
    if arith::val_or_inf(c6, &three) == 2 {
        return false;
    }
    let b = c6.mod_floor(&BigInt::from(32)).to_u32().unwrap();
    let a = c4.mod_floor(&BigInt::from(16)).to_u32().unwrap();
    b % 4 == 3 || (a == 0 && (b == 0 || b == 8))
}

/// Reduced model with a1, a3 in {0,1}, a2 in {-1,0,1} for valid (c4, c6).
fn reduced_model_from_c4c6(c4: &BigInt, c6: &BigInt) -> Result<WeierstrassCurve> {
    let twelve = BigInt::from(12);
    let mut b2 = (-c6).mod_floor(&twelve);
    if b2 > BigInt::from(6) {
        b2 -= &twelve;
    }
    let exact = |n: BigInt, d: i64| -> Result<BigInt> {
        let (q, r) = n.div_rem(&BigInt::from(d));
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Internal(format!("c4/c6 pair fails Kraus integrality at /{d}")))
        }
    };
    let b4 = exact(&b2 * &b2 - c4, 24)?;
    let b6 = exact(-(&b2 * &b2 * &b2) + BigInt::from(36) * &b2 * &b4 - c6, 216)?;
    let two = BigInt::from(2);
    let a1 = b2.mod_floor(&two);
    let a3 = b6.mod_floor(&two);
    let a2 = exact(&b2 - &a1, 4)?;
    let a4 = exact(&b4 - &a1 * &a3, 2)?;
    let a6 = exact(&b6 - &a3, 4)?;
    WeierstrassCurve::from_bigints([a1, a2, a3, a4, a6])
}

/// Global minimal model over Q and the transform from `c` to it.
///
/// Rational models are first scaled to an integral one by u = 1/m with m the
/// lcm of the coefficient denominators.
pub fn minimal_model(c: &WeierstrassCurve) -> Result<(WeierstrassCurve, ModelTransform)> {
    let m = c.a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let clear = ModelTransform::scaling(BigRational::new(BigInt::one(), m));
    let integral = if clear.is_identity() { c.clone() } else { clear.apply(c) };
    debug_assert!(integral.is_integral());

    let c4 = integral.c4.to_integer();
    let c6 = integral.c6.to_integer();
    let delta = integral.delta.to_integer();
    let g = (&c6 * &c6).gcd(&delta);

    let mut u = BigInt::one();
    for (p, e) in arith::factor(&g) {
        let mut d = e / 12;
        if d == 0 {
            continue;
        }
        let p = BigInt::from(p);
        let pd = |k: u32| num_traits::pow(p.clone(), k as usize);
        let scaled_ok = |d: u32| {
            let c4d = &c4 / pd(4 * d);
            let c6d = &c6 / pd(6 * d);
            if p == BigInt::from(2) || p == BigInt::from(3) {
                kraus_ok(&c4d, &c6d)
            } else {
                true
            }
        };
        while d > 0 && !scaled_ok(d) {
            d -= 1;
        }
        u *= pd(d);
    }

    let u4 = num_traits::pow(u.clone(), 4);
    let u6 = num_traits::pow(u.clone(), 6);
    let mut min = reduced_model_from_c4c6(&(&c4 / &u4), &(&c6 / &u6))?;
    min.label = c.label.clone();

    let step = transform_between(&integral, &min, &BigRational::from_integer(u));
    let total = clear.then(&step);
    if total.apply(c).a != min.a {
        return Err(Error::Internal("minimal model transform does not map the input".into()));
    }
    Ok((min, total))
}

/// An integral model reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveOverFp {
    pub q: u64,
    pub a: [u64; 5],
    pub singular: bool,
}

impl CurveOverFp {
    fn residues(&self) -> [i128; 5] {
        self.a.map(|x| x as i128)
    }

    /// (b2, b4, b6) reduced mod q.
    pub fn b_invariants(&self) -> (u64, u64, u64) {
        let q = self.q as i128;
        let [a1, a2, a3, a4, a6] = self.residues();
        let b2 = (a1 * a1 + 4 * a2).rem_euclid(q);
        let b4 = (2 * a4 + a1 * a3).rem_euclid(q);
        let b6 = (a3 * a3 + 4 * a6).rem_euclid(q);
        (b2 as u64, b4 as u64, b6 as u64)
    }

    /// (c4, c6) reduced mod q.
    pub fn c_invariants(&self) -> (u64, u64) {
        let q = self.q as i128;
        let (b2, b4, b6) = self.b_invariants();
        let (b2, b4, b6) = (b2 as i128, b4 as i128, b6 as i128);
        let c4 = (b2 * b2 - 24 * b4).rem_euclid(q);
        let c6 = ((-(b2 * b2 % q) * b2 + 36 * b2 * b4 - 216 * b6) % q).rem_euclid(q);
        (c4 as u64, c6 as u64)
    }

    /// Right-hand side value at x for the curve in the completed-square
    /// form (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    #[inline]
    pub fn rhs(&self, x: u64, b: (u64, u64, u64)) -> u64 {
        let q = self.q as u128;
        let x = x as u128;
        let (b2, b4, b6) = (b.0 as u128, b.1 as u128, b.2 as u128);
        let v = ((4 * x + b2) % q * x % q + 2 * b4) % q * x % q + b6;
        (v % q) as u64
    }
}

/// Reduce an integral model modulo the prime q.
pub fn reduce_mod(c: &WeierstrassCurve, q: u64) -> Result<CurveOverFp> {
    if !arith::is_prime_u64(q) {
        return Err(Error::UnsupportedPrime(format!("{q} is not prime")));
    }
    let qb = BigInt::from(q);
    let mut a = [0u64; 5];
    for (slot, x) in a.iter_mut().zip(c.a.iter()) {
        if x.denom().is_multiple_of(&qb) {
            return Err(Error::NotIntegralAt(q.to_string()));
        }
        // x mod q for a q-integral rational
        let inv = arith::inv_mod(x.denom(), &qb).expect("denominator is a unit mod q");
        *slot = (x.numer() * inv).mod_floor(&qb).to_u64().unwrap();
    }
    let ints = a.map(BigInt::from);
    let reduced = WeierstrassCurve::from_bigints(ints.clone());
    let singular = match reduced {
        Ok(r) => r.delta.to_integer().is_multiple_of(&qb),
        Err(Error::SingularModel) => true,
        Err(e) => return Err(e),
    };
    Ok(CurveOverFp { q, a, singular })
}

/// Primes dividing the numerator of the discriminant of an integral model.
pub fn bad_primes(c: &WeierstrassCurve) -> Vec<BigUint> {
    let d = c.delta.numer() * c.delta.denom();
    arith::factor(&d).into_iter().map(|(p, _)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(s: &str) -> WeierstrassCurve {
        s.parse().unwrap()
    }

    #[test]
    fn invariants_of_known_curves() {
        let e = curve("0,0,0,-1,0");
        assert_eq!(*e.discriminant(), rat(64));
        assert_eq!(*e.c4(), rat(48));

        let e = curve("0,-1,1,-10,-20");
        assert_eq!(*e.b2(), rat(-4));
        assert_eq!(*e.b4(), rat(-20));
        assert_eq!(*e.b6(), rat(-79));
        assert_eq!(*e.b8(), rat(-21));
        assert_eq!(*e.discriminant(), rat(-161051));
        assert_eq!(*e.c4(), rat(496));
    }

    #[test]
    fn rejects_singular_and_garbage() {
        assert!(matches!("0,0,0,0,0".parse::<WeierstrassCurve>(), Err(Error::SingularModel)));
        assert!(matches!("0,0,0,x,0".parse::<WeierstrassCurve>(), Err(Error::NonRational(_))));
        assert!(matches!("0,0,0,1/0,0".parse::<WeierstrassCurve>(), Err(Error::NonRational(_))));
        assert!(matches!("0,0,0,1".parse::<WeierstrassCurve>(), Err(Error::NonRational(_))));
    }

    #[test]
    fn minimal_model_examples() {
        let (m, t) = minimal_model(&curve("0,0,0,-16,0")).unwrap();
        assert_eq!(m.coefficients_string(), "0,0,0,-1,0");
        assert_eq!(t.u, rat(2));

        let e = curve("0,-1,1,-10,-20");
        let (m, t) = minimal_model(&e).unwrap();
        assert_eq!(m, e);
        assert!(t.is_identity());

        let e = curve("0,0,0,-1/4,0");
        let (m, t) = minimal_model(&e).unwrap();
        assert!(m.is_integral());
        assert_eq!(m.coefficients_string(), "0,0,0,-4,0");
        assert_eq!(t.u, BigRational::new(1.into(), 2.into()));
        let ratio = e.discriminant() / m.discriminant();
        assert_eq!(ratio, num_traits::pow(t.u.clone(), 12));
    }

    #[test]
    fn minimal_model_is_idempotent_on_scaled_models() {
        let base = curve("1,0,1,4,-6");
        let t = ModelTransform::new(rat(1) / rat(6), rat(5), rat(-2), rat(7)).unwrap();
        let scaled = t.apply(&base);
        let (m, tm) = minimal_model(&scaled).unwrap();
        assert_eq!(m, base);
        let (m2, t2) = minimal_model(&m).unwrap();
        assert_eq!(m2, m);
        assert!(t2.is_identity());
        assert_eq!(tm.apply(&scaled), m);
    }

    #[test]
    fn transform_inverse_and_composition() {
        let e = curve("0,-1,1,-10,-20");
        let t = ModelTransform::new(rat(3), BigRational::new(1.into(), 2.into()), rat(-1), rat(4))
            .unwrap();
        assert!(t.then(&t.inverse()).is_identity());
        assert!(t.inverse().then(&t).is_identity());
        assert_eq!(t.inverse().apply(&t.apply(&e)), e);
        let t2 = ModelTransform::new(rat(-2), rat(1), rat(0), rat(-3)).unwrap();
        assert_eq!(t.then(&t2).apply(&e), t2.apply(&t.apply(&e)));
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_mod(&curve("0,0,0,-1,0"), 7).unwrap();
        assert!(!r.singular);
        assert_eq!(r.a, [0, 0, 0, 6, 0]);
        assert!(reduce_mod(&curve("0,-1,1,-10,-20"), 11).unwrap().singular);
        assert!(matches!(reduce_mod(&curve("0,0,0,-1/2,0"), 2), Err(Error::NotIntegralAt(_))));
        // 1/2 is 4 mod 7
        assert_eq!(reduce_mod(&curve("0,0,0,1/2,1"), 7).unwrap().a[3], 4);
    }
}
