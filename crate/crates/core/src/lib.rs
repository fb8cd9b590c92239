//! Majority votes over weakly relevant and irrelevant boolean variables.
//!
//! * [`tail`]: exact binomial tails and audited tail inequalities.
//! * [`source`]: the seeded generative source and datasets.
//! * [`vote`]: vote models, exact and Monte Carlo error, closed-form bounds.
//! * [`learner`]: empirical edges and the edge-threshold learners.
//! * [`theory`]: learning-bound evaluators, lower-bound quantities and the
//!   small-instance posterior oracle.
//! * [`harness`]: sweeps and the reproduction experiments.

pub mod error;
pub mod harness;
pub mod learner;
pub mod rational;
pub mod rng;
pub mod source;
pub mod tail;
pub mod theory;
pub mod vote;

pub use error::{Error, Result};
pub use rational::Rational;
