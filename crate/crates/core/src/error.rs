use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse polynomial: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is not squarefree (gcd(p, p') = {0})")]
    NotSquarefree(String),

    #[error("precision exhausted: {needed} bits required, maximum is {max}")]
    PrecisionExhausted { needed: u64, max: u32 },

    #[error("value cannot be certified on one side of an integer boundary")]
    BoundaryAmbiguous,

    #[error("sign of an enclosure cannot be decided")]
    IndeterminateSign,

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("recurrence requires a monic polynomial (leading coefficient {0})")]
    NonMonicRecurrence(String),

    #[error("sequence fails to increase at k = {0}")]
    NotIncreasing(i64),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate theta: {0}")]
    DegenerateTheta(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Errors that more working precision could cure.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::BoundaryAmbiguous | Error::IndeterminateSign)
    }
}
