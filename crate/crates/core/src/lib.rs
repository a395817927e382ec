//! Exact machinery for out-of-distribution PAC learning experiments.
//!
//! The crate is organized bottom-up:
//!
//! * [`distribution`]: exact finite distributions over `S^n` with
//!   marginalization, conditioning, composition and seeded sampling.
//! * [`alpha`]: the worst-case probability amplification functional
//!   `alpha_{D,D'}(eps)`, exact and relaxed.
//! * [`hypothesis`] and [`shatter`]: finite hypothesis classes, `Feat(h)`,
//!   the k-sparse lift, shattering, exact VC-dimension and Sauer counts.
//! * [`bounds`]: closed-form VC and sample-complexity calculators.
//! * [`junta`]: subspace juntas `g(Wx)`, joint spans, projections and the
//!   square-wave shattering construction in dyadic arithmetic.
//! * [`lab`]: consistent-hypothesis enumeration and the reproducible
//!   experiments built on top of everything else.

pub mod alpha;
pub mod bounds;
pub mod distribution;
mod error;
pub mod hypothesis;
pub mod junta;
pub mod lab;
pub mod rational;
pub mod rng;
pub mod shatter;

pub use alpha::{
    alpha_bounds, alpha_exact, alpha_uniform_exponential, verify_alpha_contrapositive,
    AlphaBounds, AlphaMethod, AlphaQuery, AlphaResult, ShiftDirection,
};
pub use distribution::{FeatureSpace, FiniteDistribution, StructuredPoint, Value};
pub use error::{Error, Result};
pub use hypothesis::{feat, sparse_lift, Hypothesis, HypothesisClass};
pub use junta::{InnerFunction, PointMassMeasure, SubspaceJunta};
pub use rational::Q;
pub use shatter::{
    sauer_check, shatters, vc_dimension_exact, ShatterCertificate, ShatterOutcome, VcDimension,
};

/// Version string embedded in every machine-readable report.
pub const VERSION: &str = concat!("oodlab ", env!("CARGO_PKG_VERSION"));
