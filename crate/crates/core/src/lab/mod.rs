//! Experiments: ERM by enumeration, the grue and XOR-pixel scenarios,
//! randomized exact checks of the transfer identities, and seeded sweeps.

pub mod config;
pub mod engines;
pub mod erm;
pub mod scenarios;
pub mod stats;
pub mod sweep;

pub use erm::{consistent_set, worst_consistent_ood_error, LabeledSample};
pub use scenarios::{grue, xor_pixel, FiniteScenario, GrueParams};
pub use sweep::{sweep, SweepParams, SweepReport};
