use cheb_core::ChebError;
use pdo_frontend::PdoError;
use separable::SepError;
use sylvester::SylError;
use thiserror::Error;
use ultra_ops::UltraError;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("invalid problem: {detail}")]
    InvalidProblem { detail: String },
    #[error("boundary constraint rows are numerically dependent")]
    DependentConstraints,
    #[error("boundary data is incompatible where constraints meet: defect {defect:e}")]
    Incompatible { defect: f64 },
    #[error("solution not resolved within the degree cap {cap} (reached {nx} x {ny})")]
    Unresolved { nx: usize, ny: usize, cap: usize },
    #[error("solver failed at n_x = {nx}, n_y = {ny}: {source}")]
    SolverAt {
        nx: usize,
        ny: usize,
        #[source]
        source: SylError,
    },
    #[error(transparent)]
    Frontend(#[from] PdoError),
    #[error(transparent)]
    Series(#[from] ChebError),
    #[error(transparent)]
    Operator(#[from] UltraError),
    #[error(transparent)]
    Splitting(#[from] SepError),
}
