use cheb_core::ChebError;
use pdo_frontend::PdoError;
use thiserror::Error;
use ultra_ops::UltraError;

#[derive(Debug, Error)]
pub enum SepError {
    #[error("the operator is identically zero")]
    ZeroOperator,
    #[error(transparent)]
    Operator(#[from] UltraError),
    #[error(transparent)]
    Frontend(#[from] PdoError),
    #[error(transparent)]
    Series(#[from] ChebError),
}
