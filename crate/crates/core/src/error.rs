use crate::operators::OperatorId;

/// Errors raised by operator evaluation, moduli estimation and the verification harness.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} requires n >= {min}, got n = {n}")]
    DegreeTooSmall { what: &'static str, n: u32, min: u32 },

    #[error("{what} = {value} is outside the admissible range {range}")]
    OutOfRange { what: &'static str, value: f64, range: &'static str },

    #[error("operator {0} needs a coefficient scheme")]
    MissingScheme(OperatorId),

    #[error("operator {0} does not take a coefficient scheme")]
    UnexpectedScheme(OperatorId),

    #[error("the M2 perturbation is only defined for the Bernstein family")]
    InvalidVariant,

    #[error("quadrature rule is exact to degree {exactness}, but degree {required} is needed")]
    QuadratureTooCoarse { exactness: usize, required: usize },

    #[error("function `{function}` has no derivative of order {order}")]
    DerivativeUnavailable { function: String, order: usize },

    #[error("scheme `{0}` has no limit L1")]
    MissingLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
