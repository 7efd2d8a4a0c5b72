//! Closed-form results: handover rates and boundary intensities, handover and
//! signalling costs, cost-aware coverage and ASE, optimal group-cell size,
//! and the coverage probability of a cell-edge UE.

mod costs;
mod coverage;
mod rates;

pub use costs::*;
pub use coverage::*;
pub use rates::*;
