//! The pipeline over Q: from a curve and p to the local data packet the
//! formula consumes.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::PPower;
use crate::curve_model::{bad_primes, minimal_model, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::euler_characteristic::{AwayFactor, FieldLocalData, PrimeAboveP};
use crate::global_invariants::{torsion_subgroup, TorsionInfo};
use crate::local_analysis::{local_packet, LocalData};

/// Source of local data; lets callers put a cache in front of Tate's algorithm.
pub trait LocalSource: Sync {
    fn local(&self, minimal: &WeierstrassCurve, q: &BigUint) -> Result<LocalData>;
}

pub struct Direct;

impl LocalSource for Direct {
    fn local(&self, minimal: &WeierstrassCurve, q: &BigUint) -> Result<LocalData> {
        local_packet(minimal, q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveAnalysis {
    pub minimal_model: String,
    /// Bad primes in increasing order, followed by p if p is good.
    pub local: Vec<LocalData>,
    pub torsion: TorsionInfo,
    pub field_data: FieldLocalData,
}

/// Compute local data at every bad prime and at p, the torsion subgroup, and
/// the packet for F = Q with the supplied Sha p-part.
pub fn analyze_curve(
    c: &WeierstrassCurve,
    p: u64,
    sha_p_order: PPower,
    selmer_finite: bool,
    source: &dyn LocalSource,
) -> Result<CurveAnalysis> {
    if p == 2 || !crate::arith::is_prime_u64(p) {
        return Err(Error::EvenOrCompositeP(p.to_string()));
    }
    let (min, _) = minimal_model(c)?;
    let pq = BigUint::from(p);
    let mut primes = bad_primes(&min);
    primes.sort();
    let p_is_bad = primes.contains(&pq);
    let mut local = Vec::with_capacity(primes.len() + 1);
    for q in &primes {
        local.push(source.local(&min, q)?);
    }
    let at_p = if p_is_bad {
        local.iter().find(|l| l.q == pq).cloned().expect("p listed among bad primes")
    } else {
        let l = source.local(&min, &pq)?;
        local.push(l.clone());
        l
    };
    let torsion = torsion_subgroup(&min)?;

    let above = PrimeAboveP {
        ramification: 1,
        residue_degree: 1,
        reduction: at_p.reduction_type,
        a: at_p.a_q,
        d_p_part: at_p.d_p_part(p),
        base_is_qp: true,
        unramified: true,
    };
    let away = local
        .iter()
        .filter(|l| !l.reduction_type.is_good())
        .map(|l| AwayFactor { label: l.q.to_string(), value: l.tamagawa_p_part(p) })
        .collect();
    let field_data = FieldLocalData {
        p,
        primes_above_p: vec![above],
        away_tamagawa_p_parts: away,
        torsion_p_part: torsion.p_part(p),
        sha_p_order,
        selmer_finite,
    };
    Ok(CurveAnalysis { minimal_model: min.coefficients_string(), local, torsion, field_data })
}
