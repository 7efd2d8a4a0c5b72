//! Monte Carlo engine: handover state machines along random trajectories and
//! brute-force coverage oracles.

mod coverage;
mod handover;

pub use coverage::*;
pub use handover::*;
