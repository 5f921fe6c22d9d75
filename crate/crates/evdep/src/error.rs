use thiserror::Error;

/// Errors produced by estimation, inference and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model parameter is outside the family's admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function evaluated to a non-finite value where a finite one is required.
    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// Root bracketing failed: no sign change over the interval.
    #[error("no sign change on [{lo}, {hi}] (f(lo)={flo}, f(hi)={fhi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    /// Root search failed even after bracket expansion.
    #[error("no root found after expanding bracket to [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    /// Tied observations in a data column; continuous margins are assumed.
    #[error("tied values in column {column}; jitter the data or supply continuous margins")]
    TiedData { column: usize },

    /// The empirical-likelihood hull condition failed: zero is not interior
    /// to the range of the estimating terms.
    #[error("hull violation: zero not interior to [{min_q}, {max_q}]")]
    HullViolation { min_q: f64, max_q: f64 },

    /// The confidence region at the requested level is empty.
    #[error("empty confidence interval at level {level}")]
    EmptyInterval { level: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Input data could not be parsed into two numeric columns.
    #[error("malformed data: {0}")]
    MalformedData(String),

    /// An experiment configuration failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
