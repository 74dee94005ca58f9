//! Error type shared by all solver modules.

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants distinguish bad input, violated preconditions, numerical
/// breakdown, and the solvability verdicts that are errors from the
/// caller's point of view (no measure could be produced).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("not solvable on these lines: line {line} (x2 = {position}): {reason}")]
    NotSolvableOnTheseLines {
        line: usize,
        position: f64,
        reason: String,
    },

    #[error("inconclusive on line {line} (x2 = {position}): Hankel quantity {hankel} is inside the boundary band")]
    InconclusiveOnLine {
        line: usize,
        position: f64,
        hankel: f64,
    },

    #[error("sufficient condition fails: {0}")]
    SufficientConditionFails(String),

    #[error("a3 search exhausted after {iters} candidates (last a3 = {last_a3}): {detail}")]
    SearchExhausted {
        iters: u32,
        last_a3: f64,
        detail: String,
    },

    #[error("internal assertion: {0}")]
    InternalAssertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
