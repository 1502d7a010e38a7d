use thiserror::Error;

use crate::matrix::Pair;

/// Errors raised by the inconsistency engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix order {0} is below the minimum of {1}")]
    OrderTooSmall(usize, usize),

    #[error("index ({0}, {1}) is not an off-diagonal position of a {2}x{2} matrix")]
    BadIndex(usize, usize, usize),

    #[error("entry ({}, {}) is already present; retract first", .0.0, .0.1)]
    PairPresent(Pair),

    #[error("entry ({}, {}) is missing", .0.0, .0.1)]
    PairMissing(Pair),

    #[error("matrix has {0} missing entries; use min_cm_completion for incomplete matrices")]
    Incomplete(usize),

    #[error("threshold {0} must lie strictly between 0 and 1")]
    BadThreshold(f64),

    #[error("linear program could not be solved: {0}")]
    NumericalFailure(String),

    #[error("nothing to undo")]
    NothingToUndo,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}
