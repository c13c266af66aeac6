//! Euler characteristics of signed Selmer groups of elliptic curves over the
//! cyclotomic Z_p-extension.
//!
//! The crate computes the arithmetic that enters the formula for a curve
//! over Q (minimal models, reduction types, Tamagawa numbers, point counts,
//! rational torsion), checks the hypotheses on the supersingular primes, and
//! assembles the predicted Euler characteristic as an exact power of p.

pub mod analysis;
pub mod arith;
pub mod cli_io;
pub mod curve_model;
pub mod error;
pub mod euler_characteristic;
pub mod global_invariants;
pub mod local_analysis;
mod serde_big;

pub use arith::PPower;
pub use curve_model::{minimal_model, reduce_mod, CurveOverFp, ModelTransform, WeierstrassCurve};
pub use error::{Error, Result};
pub use euler_characteristic::{
    check_hypotheses, euler_char, lambda_euler_char, propagate_vanishing, sign_independence,
    EulerCharResult, FieldLocalData, HypothesisReport, LambdaSeries, SignVector,
};
pub use global_invariants::{check_torsion_vanishing, torsion_p_part, torsion_subgroup, TorsionInfo};
pub use local_analysis::{
    classify_reduction, count_points, local_packet, tate_algorithm, LocalData, ReductionType,
};
