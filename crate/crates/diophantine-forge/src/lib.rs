//! Reduction of Diophantine equations over the naturals to a fixed-shape
//! equation in eleven integer unknowns, with exact degree accounting.
//!
//! The pipeline: binary-carry arithmetic lemmas (`bitarith`) feed a digit
//! coding of candidate solutions (`coding`); Lucas-sequence machinery
//! (`lucas`) and the bridge construction (`bridge`) replace the binomial
//! divisibility test by polynomial relations; the sign-product combiner
//! (`combine`) folds those relations into one equation; `construct`
//! assembles the final expression DAG and its degree report.

pub mod bitarith;
pub mod bridge;
pub mod checks;
pub mod cli;
pub mod coding;
pub mod combine;
pub mod construct;
pub mod error;
pub mod lucas;
pub mod mpoly;

pub use error::{Error, Result};

/// Ceiling, in bits, for integers produced by exact evaluation paths.
/// Everything desk-scale stays far below; astronomically sized regimes are
/// refused with a resource error instead of exhausting memory.
pub(crate) const EVAL_BIT_GUARD: u64 = 1 << 28;
