use thiserror::Error;

/// Errors raised by the arithmetic, reduction and classification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("operands live over different fields")]
    FieldMismatch,

    /// The answer depends on coefficients beyond the known precision.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("valuation {valuation} is divisible by p = {p}")]
    NonCoprimeValuation { valuation: i64, p: u32 },

    #[error("dependent generators: {0}")]
    DependentGenerators(String),

    #[error("elimination window {window} too small, element reaches level -{needed}")]
    WindowTooSmall { window: i64, needed: i64 },

    #[error("wrong characteristic: need {expected}, got p = {actual}")]
    WrongCharacteristic { expected: String, actual: u32 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("non-integral lower breaks: {0}")]
    NonIntegralLower(String),

    #[error("degenerate tower: {0}")]
    DegenerateTower(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// A stable snake_case name for the variant, used in structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "invalid_field",
            Error::FieldMismatch => "field_mismatch",
            Error::InsufficientPrecision(_) => "insufficient_precision",
            Error::NonCoprimeValuation { .. } => "non_coprime_valuation",
            Error::DependentGenerators(_) => "dependent_generators",
            Error::WindowTooSmall { .. } => "window_too_small",
            Error::WrongCharacteristic { .. } => "wrong_characteristic",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::NonIntegralLower(_) => "non_integral_lower",
            Error::DegenerateTower(_) => "degenerate_tower",
            Error::Parse(_) => "parse",
        }
    }
}
