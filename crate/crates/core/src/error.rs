use thiserror::Error;

/// Errors raised by the algebra, the operator calculus and the parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not in O_0: identity coefficient {coefficient} is nonzero")]
    NotInO0 { coefficient: String },

    #[error("derivation #{index} is the zero derivation")]
    ZeroDerivation { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("element {0} is not in the table")]
    NotInTable(String),

    #[error("incomplete grid: missing value at exponent {0:?}")]
    IncompleteGrid(Vec<u32>),

    #[error("degree overflow: nonzero coefficient at {index:?} exceeds degree bound {bound}")]
    DegreeOverflow { index: Vec<u32>, bound: usize },

    #[error("additive map must be nonzero")]
    ZeroAdditive,

    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),

    #[error("unknown variable t{index} (ambient has {nvars} variables)")]
    UnknownVariable { index: usize, nvars: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
