//! Uniform-sampling approximation for weighted MAX-CSP and MAX-k-SAT.
//!
//! Sampling assignments uniformly and keeping the best one reaches
//! `w* − ε·w` with high probability because exponentially many assignments
//! lie that close to the optimum. This crate provides
//!
//! * [`instance`]: truth-table constraints, assignments and their weights;
//! * [`formats`]: DIMACS CNF / WCNF and a native truth-table format;
//! * [`bounds`]: binary entropy, the near-optimal counting bound and the
//!   runtime exponents of this and competing algorithms;
//! * [`sampler`]: the sampling algorithm with a failure-probability budget;
//! * [`oracle`]: exhaustive enumeration that checks every bound on small
//!   instances.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod formats;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod sampler;
mod scalar;

pub use error::{Error, Result};
pub use instance::{Assignment, TruthTable};
pub use scalar::Scalar;

pub type CspInstance = instance::CspInstance<f64>;
pub type CspInstanceF32 = instance::CspInstance<f32>;
pub type Constraint = instance::Constraint<f64>;
pub type ConstraintF32 = instance::Constraint<f32>;
pub type CountingBound = bounds::CountingBound<f64>;
pub type ExponentReport = bounds::ExponentReport<f64>;
pub type SamplerConfig = sampler::SamplerConfig<f64>;
pub type SamplerResult = sampler::SamplerResult<f64>;
pub type VerificationReport = oracle::VerificationReport<f64>;
