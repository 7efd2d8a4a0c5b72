//! Analytics and Monte Carlo engine for group-cell handover (GCHO) and
//! handover skipping (GCHO-S) in user-centric cooperative ultra-dense
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: Poisson deployments, k-nearest queries, distance laws, trajectories.
//! - [`channel`]: dual-slope path loss and SIR under cooperative transmission.
//! - [`analytics`]: closed-form handover rates, costs, coverage probability.
//! - [`simulator`]: handover state machines and coverage oracles.
//! - [`harness`]: scenario configuration, figure sweeps, CSV output, validation.
//!
//! Monte Carlo loops run on rayon when the `parallel` feature is enabled
//! (the default). Every trial derives its randomness from
//! `(base_seed, trial_index)` and all aggregates are summed as integers, so
//! results do not depend on the number of worker threads.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod analytics;
pub mod channel;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod harness;
pub mod quadrature;
pub mod rng;
pub mod scenario;
pub mod simulator;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scenario::ScenarioParams;
