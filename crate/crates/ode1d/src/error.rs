use thiserror::Error;
use ultra_ops::UltraError;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("{constraints} constraints but {values} prescribed values")]
    ConstraintCountMismatch { constraints: usize, values: usize },
    #[error("right-hand side lives on [{a1}, {b1}] but the operator on [{a0}, {b0}]")]
    IntervalMismatch { a0: f64, b0: f64, a1: f64, b1: f64 },
    #[error("degree cap {cap} reached before the coefficient tail was resolved")]
    Unresolved { cap: usize },
    #[error("discretization at size {n} is singular at column {column}; the constrained problem is ill posed")]
    IllPosed { n: usize, column: usize },
    #[error(transparent)]
    Operator(#[from] UltraError),
}
