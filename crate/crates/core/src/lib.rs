//! Ramsey and rainbow Ramsey theory on Boolean lattices.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: subsets of `[n]`, levels, intervals and symmetric chain decompositions.
//! - [`posets`]: pattern posets (`C_k`, `A_k`, `B_k`, `V`, `W`, explicit relations),
//!   height, width, Dilworth partitions and 2-dimension.
//! - [`embedding`]: strong-subposet containment, plain, monochromatic and rainbow.
//! - [`colorings`]: the [`Coloring`] type, the extremal constructions and the
//!   avoidance verifier.
//! - [`extractors`]: constructive proofs run as algorithms that return either a
//!   rainbow structure or a monochromatic certificate.
//! - [`search`]: exact decision of avoidability by canonical backtracking.
//! - [`bounds`]: closed-form lower and upper bounds.
//! - [`satgen`]: DIMACS export of fixed-palette avoidance problems.
//! - [`table`]: reproduction of the exact-value table, cell by cell.
//!
//! Subsets are bit masks over a ground set of at most [`lattice::MAX_GROUND`]
//! elements. Element `i` (1-based) is bit `i - 1`.

pub mod bounds;
pub mod colorings;
pub mod embedding;
pub mod extractors;
pub mod lattice;
mod matching;
pub mod posets;
pub mod sample;
pub mod satgen;
pub mod search;
pub mod table;

pub use colorings::{AvoidanceReport, Coloring};
pub use embedding::Embedding;
pub use lattice::{ChainFamily, Subset};
pub use posets::Poset;
pub use search::{AvoidanceProblem, SearchOutcome};

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed input (poset specs, colorings, models).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A resource cap was hit (copy enumeration, clause count).
    #[error("limit exceeded: {0}")]
    Limit(String),
    /// A decoded artifact failed re-verification.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
