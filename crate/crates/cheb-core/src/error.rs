use thiserror::Error;

/// Errors produced by Chebyshev containers, transforms, and adaptive interpolation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChebError {
    /// Interval endpoints must be finite with `a < b`.
    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    /// A coefficient or value sequence was empty where at least one entry is required.
    #[error("empty input: at least one coefficient or sample value is required")]
    EmptyInput,

    /// Evaluation point lies outside the domain (beyond the `10*eps*|b-a|` tolerance).
    #[error("point {x} outside interval [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    /// A sampled function value was NaN or infinite.
    #[error("non-finite sample value at x = {x}{}", y.map(|y| format!(", y = {y}")).unwrap_or_default())]
    NonFiniteSample { x: f64, y: Option<f64> },

    /// Adaptive refinement hit the degree cap without the coefficient tail decaying.
    #[error("interpolant unresolved at degree cap {cap}")]
    Unresolved { cap: usize },

    /// Requested output size is incompatible with the input length.
    #[error("size mismatch: need at least {expected} but got {got}")]
    SizeMismatch { expected: usize, got: usize },
}
