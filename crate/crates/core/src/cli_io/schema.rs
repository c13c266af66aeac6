//! JSON wire format of [`FieldLocalData`]. Powers of p travel as decimal strings.

use serde::{Deserialize, Serialize};

use crate::arith::PPower;
use crate::error::Error;
use crate::euler_characteristic::{AwayFactor, FieldLocalData, PrimeAboveP};
use crate::local_analysis::ReductionType;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeWire {
    pub e: u32,
    pub f: u32,
    pub reduction: ReductionType,
    pub a: Option<i64>,
    pub d_p_part: Option<String>,
    pub base_is_qp: bool,
    pub unramified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwayWire {
    pub label: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldLocalDataWire {
    pub p: u64,
    pub primes_above_p: Vec<PrimeWire>,
    pub away_tamagawa_p_parts: Vec<AwayWire>,
    pub torsion_p_part: String,
    pub sha_p_order: String,
    pub selmer_finite: bool,
}

impl TryFrom<FieldLocalDataWire> for FieldLocalData {
    type Error = Error;

    fn try_from(w: FieldLocalDataWire) -> Result<Self, Error> {
        let p = w.p;
        let pp = |s: &str| PPower::parse_decimal(s, p).map_err(Error::from);
        let primes_above_p = w
            .primes_above_p
            .iter()
            .map(|x| {
                Ok(PrimeAboveP {
                    ramification: x.e,
                    residue_degree: x.f,
                    reduction: x.reduction,
                    a: x.a,
                    d_p_part: x.d_p_part.as_deref().map(pp).transpose()?,
                    base_is_qp: x.base_is_qp,
                    unramified: x.unramified,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let away_tamagawa_p_parts = w
            .away_tamagawa_p_parts
            .iter()
            .map(|a| Ok(AwayFactor { label: a.label.clone(), value: pp(&a.value)? }))
            .collect::<Result<Vec<_>, Error>>()?;
        let data = FieldLocalData {
            p,
            primes_above_p,
            away_tamagawa_p_parts,
            torsion_p_part: pp(&w.torsion_p_part)?,
            sha_p_order: pp(&w.sha_p_order)?,
            selmer_finite: w.selmer_finite,
        };
        data.validate()?;
        Ok(data)
    }
}

impl From<FieldLocalData> for FieldLocalDataWire {
    fn from(d: FieldLocalData) -> Self {
        FieldLocalDataWire {
            p: d.p,
            primes_above_p: d
                .primes_above_p
                .iter()
                .map(|w| PrimeWire {
                    e: w.ramification,
                    f: w.residue_degree,
                    reduction: w.reduction,
                    a: w.a,
                    d_p_part: w.d_p_part.map(|x| x.to_decimal()),
                    base_is_qp: w.base_is_qp,
                    unramified: w.unramified,
                })
                .collect(),
            away_tamagawa_p_parts: d
                .away_tamagawa_p_parts
                .iter()
                .map(|a| AwayWire { label: a.label.clone(), value: a.value.to_decimal() })
                .collect(),
            torsion_p_part: d.torsion_p_part.to_decimal(),
            sha_p_order: d.sha_p_order.to_decimal(),
            selmer_finite: d.selmer_finite,
        }
    }
}
