//! Local arithmetic at a single prime: point counts, reduction type, and
//! the Tate data (Kodaira symbol, conductor exponent, Tamagawa number).

mod counting;
mod tate;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use counting::{
    count_points, count_points_bsgs, count_points_enumeration, trace_of_frobenius,
    COUNTING_LIMIT, ENUMERATION_LIMIT,
};
pub use tate::{tate_algorithm, Kodaira, TateData};

use crate::arith::PPower;
use crate::curve_model::{minimal_model, reduce_mod, WeierstrassCurve};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    GoodOrdinary,
    GoodSupersingular,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionType {
    pub fn is_good(self) -> bool {
        matches!(self, ReductionType::GoodOrdinary | ReductionType::GoodSupersingular)
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReductionType::GoodOrdinary => "good_ordinary",
            ReductionType::GoodSupersingular => "good_supersingular",
            ReductionType::SplitMultiplicative => "split_multiplicative",
            ReductionType::NonsplitMultiplicative => "nonsplit_multiplicative",
            ReductionType::Additive => "additive",
        }
    }
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything computed about the curve at one prime q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    #[serde(with = "crate::serde_big::biguint")]
    pub q: BigUint,
    pub reduction_type: ReductionType,
    /// Trace of Frobenius, present for good reduction.
    pub a_q: Option<i64>,
    pub kodaira: Kodaira,
    pub conductor_exp: u32,
    pub tamagawa: u32,
}

impl LocalData {
    /// p^{v_p(c_q)}.
    pub fn tamagawa_p_part(&self, p: u64) -> PPower {
        PPower::part_of_u64(self.tamagawa as u64, p)
    }

    /// |E~(F_q)| for good reduction.
    pub fn reduced_order(&self) -> Option<BigInt> {
        self.a_q.map(|a| BigInt::from(self.q.clone()) + 1 - a)
    }

    /// p-part of |E~(F_p)|, defined only at q = p with good reduction.
    pub fn d_p_part(&self, p: u64) -> Option<PPower> {
        if self.q != BigUint::from(p) || !self.reduction_type.is_good() {
            return None;
        }
        self.reduced_order().map(|n| PPower::part_of(&n, p))
    }
}

fn check_odd_prime(q: u64) -> Result<()> {
    if q == 2 || !crate::arith::is_prime_u64(q) {
        return Err(Error::UnsupportedPrime(format!("{q} is not an odd prime")));
    }
    Ok(())
}

/// Reduction type at an odd prime q, computed on the minimal model.
pub fn classify_reduction(c: &WeierstrassCurve, q: u64) -> Result<ReductionType> {
    check_odd_prime(q)?;
    let (min, _) = minimal_model(c)?;
    let reduced = reduce_mod(&min, q)?;
    if !reduced.singular {
        let a = trace_of_frobenius(&reduced)?;
        return Ok(good_type(a, q));
    }
    let tate = tate_algorithm(&min, &BigUint::from(q))?;
    Ok(bad_type(&tate))
}

fn good_type(a: i64, q: u64) -> ReductionType {
    if a.rem_euclid(q as i64) == 0 {
        ReductionType::GoodSupersingular
    } else {
        ReductionType::GoodOrdinary
    }
}

fn bad_type(t: &TateData) -> ReductionType {
    match t.split {
        Some(true) => ReductionType::SplitMultiplicative,
        Some(false) => ReductionType::NonsplitMultiplicative,
        None => ReductionType::Additive,
    }
}

/// Frobenius trace at 2 by listing the affine points over F_2.
fn trace_at_two(a: &[u64; 5]) -> i64 {
    let [a1, a2, a3, a4, a6] = *a;
    let mut n = 1;
    for x in 0..2u64 {
        for y in 0..2u64 {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs + rhs) % 2 == 0 {
                n += 1;
            }
        }
    }
    3 - n
}

/// Full local data at any prime q. Point counting runs only at good primes;
/// at q = 2 the four affine points are listed directly.
pub fn local_packet(c: &WeierstrassCurve, q: &BigUint) -> Result<LocalData> {
    let (min, _) = minimal_model(c)?;
    let tate = tate_algorithm(&min, q)?;
    let (reduction_type, a_q) = if tate.kodaira == Kodaira::I0 {
        let small = q
            .to_u64()
            .filter(|&v| v <= COUNTING_LIMIT)
            .ok_or_else(|| Error::PrimeTooLarge(q.to_string()))?;
        let reduced = reduce_mod(&min, small)?;
        let a = if small == 2 {
            trace_at_two(&reduced.a)
        } else {
            trace_of_frobenius(&reduced)?
        };
        (good_type(a, small), Some(a))
    } else {
        (bad_type(&tate), None)
    };
    Ok(LocalData {
        q: q.clone(),
        reduction_type,
        a_q,
        kodaira: tate.kodaira,
        conductor_exp: tate.conductor_exp,
        tamagawa: tate.tamagawa,
    })
}

/// Whether q divides the minimal discriminant.
pub fn is_bad_prime(c: &WeierstrassCurve, q: &BigUint) -> Result<bool> {
    let (min, _) = minimal_model(c)?;
    let d = min.integral_discriminant().expect("minimal model is integral");
    Ok(d.is_multiple_of(&BigInt::from(q.clone())))
}
