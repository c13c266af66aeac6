//! Hypothesis checking and assembly of the Gamma-Euler characteristic of
//! signed Selmer groups over the cyclotomic Z_p-extension.
//!
//! The arithmetic input is a [`FieldLocalData`] packet: the primes of F above
//! p with their local degrees and reduction data, the p-parts of Tamagawa
//! numbers away from p, the torsion p-part and the p-part of Sha. Over Q the
//! packet is built from a curve by [`crate::analysis`]; for other base fields
//! it is supplied by the user.
//!
//! The predicted value is
//!
//! ```text
//! chi = |Sha(p)| / |E(F)(p)|^2 * prod_v c_v^(p) * prod_{v ordinary above p} (d_v^(p))^2
//! ```
//!
//! and it does not depend on the sign vector. Hypothesis (S4) is waived when
//! every sign is minus.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, valuation, PPower};
use crate::error::{Error, Result};
use crate::local_analysis::ReductionType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// One sign per supersingular prime above p, in the order the primes are listed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn all_minus(r: usize) -> Self {
        SignVector(vec![Sign::Minus; r])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True for a nonempty vector of minus signs only.
    pub fn is_all_minus(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|s| *s == Sign::Minus)
    }

    /// All 2^r vectors of length r, in lexicographic order with + first.
    pub fn enumerate(r: usize) -> Vec<SignVector> {
        (0..(1u64 << r))
            .map(|mask| {
                SignVector(
                    (0..r)
                        .map(|i| if mask >> (r - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        for s in &self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    /// Parses strings such as "+-+"; "" and "()" give the empty vector.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "()" {
            return Ok(SignVector::default());
        }
        t.chars()
            .filter(|c| !matches!(c, ',' | ' ' | '(' | ')'))
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::BadSigns(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignVector)
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Local data at a prime w of F above p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeAboveP {
    pub ramification: u32,
    pub residue_degree: u32,
    pub reduction: ReductionType,
    /// a_w; over F_p this is 1 + p - |E~(F_p)|.
    pub a: Option<i64>,
    /// p-part of |E~(f_w)|, present exactly for good reduction.
    pub d_p_part: Option<PPower>,
    /// The completion of the base field F' at the prime below w is Q_p.
    pub base_is_qp: bool,
    /// The prime below w is unramified in F/F'.
    pub unramified: bool,
}

impl PrimeAboveP {
    /// [F_w : Q_p] = e_w f_w.
    pub fn local_degree(&self) -> u64 {
        self.ramification as u64 * self.residue_degree as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AwayFactor {
    pub label: String,
    pub value: PPower,
}

/// Local arithmetic of E over a base field F, as consumed by the formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "crate::cli_io::schema::FieldLocalDataWire",
    into = "crate::cli_io::schema::FieldLocalDataWire"
)]
pub struct FieldLocalData {
    pub p: u64,
    pub primes_above_p: Vec<PrimeAboveP>,
    /// Tamagawa p-parts at every prime contributing one; good primes may be omitted.
    pub away_tamagawa_p_parts: Vec<AwayFactor>,
    pub torsion_p_part: PPower,
    pub sha_p_order: PPower,
    pub selmer_finite: bool,
}

fn check_p(p: u64) -> Result<()> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::EvenOrCompositeP(p.to_string()));
    }
    Ok(())
}

impl FieldLocalData {
    /// Structural checks: p odd prime, positive local degrees, every power
    /// taken with respect to p, and d_p_part present exactly for good reduction.
    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        let same_p = |v: &PPower, what: &str| {
            if v.p != self.p || v.exp < 0 {
                Err(Error::Schema(format!("{what} must be a non-negative power of {}", self.p)))
            } else {
                Ok(())
            }
        };
        for (i, w) in self.primes_above_p.iter().enumerate() {
            if w.ramification == 0 || w.residue_degree == 0 {
                return Err(Error::Schema(format!("primes_above_p[{i}]: e and f must be positive")));
            }
            match (&w.d_p_part, w.reduction.is_good()) {
                (Some(d), true) => same_p(d, &format!("primes_above_p[{i}].d_p_part"))?,
                (None, false) => {}
                (None, true) => {
                    return Err(Error::Schema(format!(
                        "primes_above_p[{i}]: d_p_part is required for good reduction"
                    )))
                }
                (Some(_), false) => {
                    return Err(Error::Schema(format!(
                        "primes_above_p[{i}]: d_p_part is only defined for good reduction"
                    )))
                }
            }
        }
        for f in &self.away_tamagawa_p_parts {
            same_p(&f.value, &format!("away_tamagawa_p_parts[{}]", f.label))?;
        }
        same_p(&self.torsion_p_part, "torsion_p_part")?;
        same_p(&self.sha_p_order, "sha_p_order")?;
        Ok(())
    }

    pub fn supersingular(&self) -> impl Iterator<Item = &PrimeAboveP> {
        self.primes_above_p.iter().filter(|w| w.reduction == ReductionType::GoodSupersingular)
    }

    /// r = |S_p^ss(F)|.
    pub fn supersingular_count(&self) -> usize {
        self.supersingular().count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail(String),
    Waived(String),
}

impl Check {
    pub fn is_fail(&self) -> bool {
        matches!(self, Check::Fail(_))
    }

    fn from_failures(fails: Vec<String>) -> Check {
        if fails.is_empty() {
            Check::Pass
        } else {
            Check::Fail(fails.join("; "))
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => write!(f, "pass"),
            Check::Fail(r) => write!(f, "FAIL ({r})"),
            Check::Waived(r) => write!(f, "waived ({r})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelmerFiniteness {
    Asserted,
    NotAsserted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub s1: Check,
    pub s2: Check,
    pub s3: Check,
    pub s4: Check,
    pub selmer_finiteness: SelmerFiniteness,
    pub supersingular_count: usize,
    /// S_p^ss is empty and the classical ordinary formula applies.
    pub classical_ordinary_case: bool,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    /// S1-S4 hold, regardless of the finiteness assertion.
    pub fn conditions_hold(&self) -> bool {
        ![&self.s1, &self.s2, &self.s3, &self.s4].iter().any(|c| c.is_fail())
    }

    pub fn failure_summary(&self) -> String {
        let mut parts = Vec::new();
        for (name, c) in [("S1", &self.s1), ("S2", &self.s2), ("S3", &self.s3), ("S4", &self.s4)] {
            if let Check::Fail(r) = c {
                parts.push(format!("{name}: {r}"));
            }
        }
        if self.selmer_finiteness == SelmerFiniteness::NotAsserted {
            parts.push("finiteness of Sel(E/F) not asserted".into());
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Evaluate (S1)-(S4) and the finiteness assertion for the sign vector `s`.
pub fn check_hypotheses(data: &FieldLocalData, s: &SignVector) -> Result<HypothesisReport> {
    data.validate()?;
    let p = data.p;
    let r = data.supersingular_count();
    if s.len() != r {
        return Err(Error::SignLengthMismatch { expected: r, got: s.len() });
    }
    let mut notes = Vec::new();

    let bad: Vec<String> = data
        .primes_above_p
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.reduction.is_good())
        .map(|(i, w)| format!("prime #{} above {p} has {} reduction", i + 1, w.reduction))
        .collect();
    let s1 = Check::from_failures(bad);
    let classical = r == 0;
    if classical {
        notes.push(format!(
            "no supersingular primes above {p}: classical ordinary formula, empty supersingular product"
        ));
    }

    let mut s2_fails = Vec::new();
    let mut s3_fails = Vec::new();
    let mut s4_fails = Vec::new();
    for (i, w) in data.supersingular().enumerate() {
        let idx = i + 1;
        if !w.base_is_qp {
            s2_fails.push(format!("supersingular prime {idx}: base completion is not Q_{p}"));
        }
        match w.a {
            Some(0) => {}
            Some(a) => s2_fails.push(format!("supersingular prime {idx}: a = {a} != 0")),
            None => s2_fails.push(format!("supersingular prime {idx}: a not supplied")),
        }
        if !w.unramified {
            s3_fails.push(format!("supersingular prime {idx} ramifies in F/F'"));
        }
        if w.local_degree() % 4 == 0 {
            s4_fails.push(format!(
                "supersingular prime {idx}: [F_w:Q_{p}] = {} = 0 mod 4",
                w.local_degree()
            ));
        }
    }
    let s2 = Check::from_failures(s2_fails);
    let s3 = Check::from_failures(s3_fails);
    let s4 = if s.is_all_minus() {
        Check::Waived("all signs are minus".into())
    } else {
        if !s4_fails.is_empty() && s.0.contains(&Sign::Minus) {
            notes.push(
                "S4 is enforced at every supersingular prime because at least one sign is +".into(),
            );
        }
        Check::from_failures(s4_fails)
    };

    let selmer_finiteness = if data.selmer_finite {
        SelmerFiniteness::Asserted
    } else {
        SelmerFiniteness::NotAsserted
    };
    let mut report = HypothesisReport {
        s1,
        s2,
        s3,
        s4,
        selmer_finiteness,
        supersingular_count: r,
        classical_ordinary_case: classical,
        overall: false,
        notes,
    };
    report.overall = report.conditions_hold() && selmer_finiteness == SelmerFiniteness::Asserted;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakdown {
    pub sha_p: PPower,
    /// |E(F)(p)|^2, the denominator.
    pub torsion_p_sq: PPower,
    pub tamagawa_product_p_part: PPower,
    pub ordinary_d_sq_product: PPower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerCharResult {
    pub chi: PPower,
    pub breakdown: Breakdown,
    pub sign_vector_used: SignVector,
    pub hypotheses_overridden: bool,
    pub notes: Vec<String>,
}

impl EulerCharResult {
    /// chi * |E(F)(p)|^2 = |Sha(p)| * prod c^(p) * prod (d^(p))^2.
    pub fn breakdown_identity_holds(&self) -> bool {
        let b = &self.breakdown;
        self.chi.mul(b.torsion_p_sq)
            == b.sha_p.mul(b.tamagawa_product_p_part).mul(b.ordinary_d_sq_product)
    }
}

/// Assemble the Euler characteristic. Fails with `HypothesisFailure` unless
/// the hypotheses hold or `override_hypotheses` is set.
pub fn euler_char(
    data: &FieldLocalData,
    s: &SignVector,
    override_hypotheses: bool,
) -> Result<EulerCharResult> {
    let report = check_hypotheses(data, s)?;
    if !report.overall && !override_hypotheses {
        return Err(Error::HypothesisFailure(Box::new(report)));
    }
    let p = data.p;
    let tamagawa = data
        .away_tamagawa_p_parts
        .iter()
        .fold(PPower::one(p), |acc, f| acc.mul(f.value));
    let d_sq = data
        .primes_above_p
        .iter()
        .filter(|w| w.reduction == ReductionType::GoodOrdinary)
        .filter_map(|w| w.d_p_part)
        .fold(PPower::one(p), |acc, d| acc.mul(d.pow(2)));
    let torsion_sq = data.torsion_p_part.pow(2);
    let chi = data.sha_p_order.mul(tamagawa).mul(d_sq).div(torsion_sq);

    let mut notes = vec![format!(
        "assumes Sel(E/F) is finite and |Sha(E/F)({p})| = {} (supplied, not computed)",
        data.sha_p_order
    )];
    notes.extend(report.notes.iter().cloned());
    if !report.overall {
        notes.push(format!("hypotheses overridden: {}", report.failure_summary()));
    }
    if report.supersingular_count > 0 {
        notes.push("the value does not depend on the sign vector".into());
    }
    if chi.exp < 0 {
        notes.push(format!(
            "warning: negative exponent {}; an Euler characteristic is a positive integer, so the inputs are inconsistent",
            chi.exp
        ));
    }
    Ok(EulerCharResult {
        chi,
        breakdown: Breakdown {
            sha_p: data.sha_p_order,
            torsion_p_sq: torsion_sq,
            tamagawa_product_p_part: tamagawa,
            ordinary_d_sq_product: d_sq,
        },
        sign_vector_used: s.clone(),
        hypotheses_overridden: !report.overall,
        notes,
    })
}

pub const MAX_SIGN_PRIMES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSweepEntry {
    pub signs: SignVector,
    pub chi: Option<PPower>,
    pub s4: Check,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignIndependence {
    pub entries: Vec<SignSweepEntry>,
    /// All hypothesis-passing vectors gave the same value.
    pub consistent: bool,
    pub common_chi: Option<PPower>,
}

/// Evaluate the formula for every sign vector and compare the values.
pub fn sign_independence(data: &FieldLocalData) -> Result<SignIndependence> {
    data.validate()?;
    let r = data.supersingular_count();
    if r == 0 {
        return Err(Error::NoSupersingularPrimes);
    }
    if r > MAX_SIGN_PRIMES {
        return Err(Error::TooManySigns(r));
    }
    let mut entries = Vec::new();
    for signs in SignVector::enumerate(r) {
        let report = check_hypotheses(data, &signs)?;
        let (chi, failure) = match euler_char(data, &signs, false) {
            Ok(res) => (Some(res.chi), None),
            Err(Error::HypothesisFailure(rep)) => (None, Some(rep.failure_summary())),
            Err(e) => return Err(e),
        };
        entries.push(SignSweepEntry { signs, chi, s4: report.s4, failure });
    }
    let values: Vec<PPower> = entries.iter().filter_map(|e| e.chi).collect();
    let consistent = values.windows(2).all(|w| w[0] == w[1]);
    let common_chi = if consistent { values.first().copied() } else { None };
    Ok(SignIndependence { entries, consistent, common_chi })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingConclusion {
    pub asserted: SignVector,
    /// Every signed Selmer group that must vanish, the asserted one included.
    pub vanishing: Vec<SignVector>,
    /// The supplied Sha, Tamagawa and ordinary d p-parts are all trivial, as
    /// the vanishing forces.
    pub consistent_with_data: bool,
    pub notes: Vec<String>,
}

/// From a user assertion that one signed Selmer group vanishes over the
/// cyclotomic extension, conclude that all of them do.
pub fn propagate_vanishing(
    data: &FieldLocalData,
    asserted: &SignVector,
) -> Result<VanishingConclusion> {
    data.validate()?;
    let r = data.supersingular_count();
    if asserted.len() != r {
        return Err(Error::SignLengthMismatch { expected: r, got: asserted.len() });
    }
    if r > MAX_SIGN_PRIMES {
        return Err(Error::TooManySigns(r));
    }
    let vectors = SignVector::enumerate(r);
    for s in &vectors {
        let mut report = check_hypotheses(data, s)?;
        if r == 0 {
            report.s1 = Check::Fail("no supersingular prime above p".into());
        }
        if !report.conditions_hold() {
            return Err(Error::HypothesisFailure(Box::new(report)));
        }
    }
    let p = data.p;
    let mut notes = vec![
        format!("inferred from the assertion that the {asserted} signed Selmer group vanishes; the assertion itself is not verified"),
        "Sel(E/F) = 0, so in particular it is finite".to_string(),
    ];
    let trivial_tamagawa = data.away_tamagawa_p_parts.iter().all(|f| f.value.is_one());
    let trivial_d = data
        .primes_above_p
        .iter()
        .filter(|w| w.reduction == ReductionType::GoodOrdinary)
        .all(|w| w.d_p_part.is_none_or(|d| d.is_one()));
    let consistent = data.sha_p_order.is_one() && trivial_tamagawa && trivial_d;
    if !consistent {
        notes.push(format!(
            "warning: vanishing forces |Sha({p})|, every Tamagawa {p}-part and every ordinary d {p}-part to be 1, but the supplied data disagree"
        ));
    }
    Ok(VanishingConclusion {
        asserted: asserted.clone(),
        vanishing: vectors,
        consistent_with_data: consistent,
        notes,
    })
}

/// A power series f(T) in Z_p[[T]] given by integer representatives of its
/// first coefficients, optionally known only modulo p^precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    pub p: u64,
    pub coeffs: Vec<BigInt>,
    pub precision: Option<u32>,
}

impl LambdaSeries {
    pub fn new(p: u64, coeffs: Vec<BigInt>, precision: Option<u32>) -> Result<Self> {
        check_p(p)?;
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroSeries);
        }
        Ok(LambdaSeries { p, coeffs, precision })
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Product of truncated series; precision is the smaller of the two.
    pub fn mul(&self, other: &LambdaSeries) -> Result<LambdaSeries> {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let precision = match (self.precision, other.precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        LambdaSeries::new(self.p, out, precision)
    }
}

/// Euler characteristic p^{v_p(f(0))} of a torsion module with
/// characteristic series f and finite Gamma-invariants.
pub fn lambda_euler_char(f: &LambdaSeries) -> Result<PPower> {
    let c0 = f.constant_term();
    if c0.is_zero() {
        return Err(Error::NonFiniteInvariants);
    }
    let v = valuation(&c0.abs(), &BigInt::from(f.p)).expect("nonzero constant term");
    if let Some(prec) = f.precision {
        if v >= prec {
            return Err(Error::PrecisionExhausted(prec));
        }
    }
    Ok(PPower::new(f.p, v as i64))
}
