use thiserror::Error;

use crate::bpd::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("grid parse error at ({row},{col}): {msg}")]
    GridParse { row: usize, col: usize, msg: String },

    #[error("{hi} does not cover {lo} in {k}-Bruhat order")]
    NotACover { lo: String, hi: String, k: usize },

    #[error("invalid biletter {b}_{k}: need 1 <= b <= k")]
    InvalidBiletter { b: usize, k: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(Violation),

    #[error("{op} at ({},{}): {reason}", at.0, at.1)]
    Move {
        op: &'static str,
        at: (usize, usize),
        reason: String,
    },

    #[error("chain mismatch: {0}")]
    ChainMismatch(String),

    #[error("divided difference left a nonzero remainder")]
    DivisionRemainder,

    #[error("Schubert expansion failed: {0}")]
    ExpansionFailed(String),

    #[error("separated-descent condition d1(w) ≥ d2(v) violated (d1={d1}, d2={d2})")]
    SeparatedDescent { d1: usize, d2: usize },

    #[error("growth diagram invariant violated: {0}")]
    Growth(String),

    #[error("{0} did not terminate")]
    NonTerminating(&'static str),
}

impl Error {
    /// True when the error stems from malformed or out-of-contract input rather than a broken invariant.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPermutation(_)
                | Error::Parse(_)
                | Error::GridParse { .. }
                | Error::NotACover { .. }
                | Error::InvalidBiletter { .. }
                | Error::InvalidGrid(_)
                | Error::ChainMismatch(_)
                | Error::SeparatedDescent { .. }
        )
    }
}
