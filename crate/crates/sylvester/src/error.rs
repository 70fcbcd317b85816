use thiserror::Error;
use ultra_ops::UltraError;

#[derive(Debug, Error)]
pub enum SylError {
    #[error("inconsistent dimensions: {detail}")]
    InvalidDimensions { detail: String },
    #[error("constraint rows are numerically dependent")]
    DependentConstraints,
    #[error("boundary data is incompatible: corner defect {defect:e}")]
    IncompatibleData { defect: f64 },
    #[error("internal consistency check failed: {detail}")]
    InternalInconsistency { detail: String },
    #[error("the matrix equation has no unique solution (spectral collision)")]
    NonUniqueSolution,
    #[error("singular reduced system: {detail}")]
    IllPosed { detail: String },
    #[error("estimated working set {needed} bytes exceeds the cap of {cap} bytes")]
    ResourceLimit { needed: usize, cap: usize },
    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
    #[error(transparent)]
    Operator(#[from] UltraError),
}
