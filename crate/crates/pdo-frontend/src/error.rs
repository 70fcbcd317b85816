use cheb_core::ChebError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdoError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("nonlinear in u at byte {offset}: {message}")]
    Nonlinear { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("invalid derivative at byte {offset}: {message}")]
    InvalidDerivative { offset: usize, message: String },
    #[error("expected a u-free scalar expression: {detail}")]
    NotScalar { detail: String },
    #[error("unsupported derivative: {detail}")]
    UnsupportedDerivative { detail: String },
    #[error("coefficient functions live on a different rectangle than the operator")]
    DomainMismatch,
    #[error("the expression does not contain the unknown u")]
    MissingUnknown,
    #[error("boundary expression is invalid: {detail}")]
    InvalidBoundary { detail: String },
    #[error(transparent)]
    Sampling(#[from] ChebError),
}
