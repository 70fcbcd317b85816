use thiserror::Error;

/// Errors from operator construction, assembly, and the almost-banded solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UltraError {
    /// The leading (order-N) coefficient of an operator is identically zero,
    /// or the operator has no terms at all.
    #[error("ill-posed operator: the highest-order coefficient is identically zero")]
    IllPosedOperator,

    /// Coefficients of one operator live on different intervals.
    #[error("coefficient intervals disagree: [{a0}, {b0}] vs [{a1}, {b1}]")]
    IntervalMismatch { a0: f64, b0: f64, a1: f64, b1: f64 },

    /// Dimension disagreement between operator, constraints, or right side.
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// The border block of an almost-banded matrix must occupy the top rows,
    /// with the banded part zero there.
    #[error("almost-banded structure violation: {detail}")]
    InvalidStructure { detail: String },

    /// QR factorization found a negligible pivot: the system is rank-deficient
    /// within tolerance.
    #[error("singular system: column {column} is deficient within tolerance")]
    SingularSystem { column: usize },
}
