//! Integer helpers shared by the curve modules: primality, factorization,
//! valuations, residue symbols and exact powers of a fixed prime.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol (a/q) for an odd prime q, as -1, 0 or 1.
pub fn legendre_u64(a: u64, q: u64) -> i32 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    }
}

/// Square root modulo an odd prime (Tonelli-Shanks). `None` for non-residues.
pub fn sqrt_mod(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if legendre_u64(a, q) != 1 {
        return None;
    }
    if q % 4 == 3 {
        return Some(pow_mod(a, (q + 1) / 4, q));
    }
    let s = (q - 1).trailing_zeros();
    let odd = (q - 1) >> s;
    let mut z = 2;
    while legendre_u64(z, q) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, odd, q);
    let mut t = pow_mod(a, odd, q);
    let mut r = pow_mod(a, odd.div_ceil(2), q);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, q);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        r = mul_mod(r, b, q);
    }
    Some(r)
}

/// Distinct prime factors of a 64-bit integer by trial division.
/// Only used on group orders near q + 1 with q at most 10^9.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// v_p(n) for n != 0; `None` for n = 0.
pub fn valuation(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Valuation with v(0) reported as `u32::MAX`.
pub fn val_or_inf(n: &BigInt, p: &BigInt) -> u32 {
    valuation(n, p).unwrap_or(u32::MAX)
}

pub fn val_u64(n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

/// Least non-negative residue.
pub fn modp(n: &BigInt, p: &BigInt) -> BigInt {
    n.mod_floor(p)
}

pub fn inv_mod(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(p).extended_gcd(p);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(p))
    } else {
        None
    }
}

/// Euler criterion over a prime of arbitrary size: true when `a` is a
/// square modulo `p` (zero counts as a square).
pub fn is_square_mod(a: &BigInt, p: &BigInt) -> bool {
    let a = a.mod_floor(p);
    if a.is_zero() || *p == BigInt::from(2) {
        return true;
    }
    let e = (p - 1u32) >> 1;
    a.modpow(&e, p).is_one()
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// Miller-Rabin with the first 25 prime bases; deterministic far beyond
/// 64 bits and a negligible-error test above that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in SMALL_PRIMES.iter() {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in SMALL_PRIMES.iter() {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, seed: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(seed);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32 + seed as u32);
    let m = 64u32;
    let mut g = one.clone();
    let mut r = 1u64;
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..(m as u64).min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m as u64;
        }
        r *= 2;
        if r > (1 << 26) {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let mut seed = 1u64;
    loop {
        if let Some(d) = pollard_brent(&n, seed) {
            let other = &n / &d;
            split_into(d, out);
            split_into(other, out);
            return;
        }
        seed += 1;
    }
}

/// Prime factorization of |n| as (prime, exponent) pairs in increasing order.
/// Zero has no factorization and yields an empty list.
pub fn factor(n: &BigInt) -> Vec<(BigUint, u32)> {
    let mut m = n.magnitude().clone();
    if m.is_zero() {
        return Vec::new();
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let mut d = 2u32;
    while d < 10_000 {
        if (&m % d).is_zero() {
            while (&m % d).is_zero() {
                m /= d;
                primes.push(BigUint::from(d));
            }
        }
        if BigUint::from(d) * BigUint::from(d) > m {
            break;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if BigUint::from(d) * BigUint::from(d) > m {
        if !m.is_one() {
            primes.push(m);
        }
    } else {
        split_into(m, &mut primes);
    }
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// An exact power p^exp of a fixed prime, exponent possibly negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPower {
    pub p: u64,
    pub exp: i64,
}

impl PPower {
    pub fn one(p: u64) -> Self {
        PPower { p, exp: 0 }
    }

    pub fn new(p: u64, exp: i64) -> Self {
        PPower { p, exp }
    }

    /// The p-part p^{v_p(n)} of a nonzero integer.
    pub fn part_of(n: &BigInt, p: u64) -> Self {
        let v = valuation(n, &BigInt::from(p)).expect("p-part of zero");
        PPower { p, exp: v as i64 }
    }

    pub fn part_of_u64(n: u64, p: u64) -> Self {
        PPower { p, exp: val_u64(n, p) as i64 }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: PPower) -> PPower {
        assert_eq!(self.p, other.p, "multiplying powers of different primes");
        PPower { p: self.p, exp: self.exp + other.exp }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: PPower) -> PPower {
        assert_eq!(self.p, other.p, "dividing powers of different primes");
        PPower { p: self.p, exp: self.exp - other.exp }
    }

    pub fn pow(self, k: i64) -> PPower {
        PPower { p: self.p, exp: self.exp * k }
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    /// p^|exp| as an integer.
    pub fn magnitude(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.exp.unsigned_abs() as usize)
    }

    /// Decimal rendering: "p^e" expanded, or "1/p^e" for negative exponents.
    pub fn to_decimal(&self) -> String {
        if self.exp >= 0 {
            self.magnitude().to_string()
        } else {
            format!("1/{}", self.magnitude())
        }
    }

    /// Parse a decimal string that must equal a non-negative power of p.
    pub fn parse_decimal(s: &str, p: u64) -> Result<Self, NotPPower> {
        let n = BigInt::from_str(s.trim()).map_err(|_| NotPPower(s.to_string(), p))?;
        if n.sign() != Sign::Plus {
            return Err(NotPPower(s.to_string(), p));
        }
        let part = PPower::part_of(&n, p);
        if BigInt::from(part.magnitude()) == n {
            Ok(part)
        } else {
            Err(NotPPower(s.to_string(), p))
        }
    }
}

impl fmt::Display for PPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0:?} is not a power of {1}")]
pub struct NotPPower(pub String, pub u64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn sqrt_mod_roundtrip() {
        for q in [3u64, 5, 7, 13, 17, 41, 97, 1_000_000_009] {
            for a in 0..60u64 {
                if let Some(r) = sqrt_mod(a, q) {
                    assert_eq!(mul_mod(r, r, q), a % q);
                } else {
                    assert_eq!(legendre_u64(a, q), -1);
                }
            }
        }
    }

    #[test]
    fn factor_recovers_number() {
        let cases = [
            big(-161051),
            big(64),
            big(1),
            BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * big(12),
            BigInt::from(4_294_967_311u64) * BigInt::from(4_294_967_357u64),
        ];
        for n in cases {
            let f = factor(&n);
            let mut prod = BigInt::one();
            for (p, e) in &f {
                assert!(is_probable_prime(p));
                prod *= num_traits::pow(BigInt::from(p.clone()), *e as usize);
            }
            assert_eq!(prod, n.abs());
        }
        assert_eq!(factor(&big(-161051)), vec![(BigUint::from(11u32), 5)]);
    }

    #[test]
    fn ppower_parse_and_render() {
        assert_eq!(PPower::parse_decimal("49", 7).unwrap(), PPower::new(7, 2));
        assert_eq!(PPower::parse_decimal("1", 7).unwrap(), PPower::one(7));
        assert!(PPower::parse_decimal("14", 7).is_err());
        assert!(PPower::parse_decimal("0", 7).is_err());
        assert!(PPower::parse_decimal("-7", 7).is_err());
        assert!(PPower::parse_decimal("x", 7).is_err());
        assert_eq!(PPower::new(5, -2).to_decimal(), "1/25");
    }
}
