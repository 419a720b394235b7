//! Acceptance criteria for `uphocore`, checked against brute-force oracles.

pub mod criteria;
pub mod fixtures;
pub mod oracles;

pub use criteria::{run_all, run_criterion, CriterionOutcome, CRITERIA, DEFAULT_SEED};
