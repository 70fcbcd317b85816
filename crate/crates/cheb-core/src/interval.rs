use crate::error::ChebError;

/// A finite real interval `[a, b]` with `a < b`.
///
/// Every 1D Chebyshev expansion carries one of these; the affine map
/// [`Interval::to_unit`] sends it onto the reference interval `[-1, 1]`
/// where the polynomials themselves live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    /// Creates an interval, validating that both endpoints are finite and `a < b`.
    pub fn new(a: f64, b: f64) -> Result<Self, ChebError> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(ChebError::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    /// The reference interval `[-1, 1]`.
    pub fn unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Affine map onto `[-1, 1]`: `t = 2(x - a)/(b - a) - 1`.
    pub fn to_unit(&self, x: f64) -> f64 {
        2.0 * (x - self.a) / (self.b - self.a) - 1.0
    }

    /// Inverse of [`Interval::to_unit`].
    pub fn from_unit(&self, t: f64) -> f64 {
        self.a + (self.b - self.a) * (t + 1.0) * 0.5
    }

    /// Membership test with tolerance `10 * eps * |b - a|` beyond each endpoint.
    pub fn contains(&self, x: f64) -> bool {
        let tol = 10.0 * f64::EPSILON * self.length();
        x >= self.a - tol && x <= self.b + tol
    }

    /// Derivative scale of [`Interval::to_unit`]: `dt/dx = 2/(b - a)`.
    pub fn derivative_scale(&self) -> f64 {
        2.0 / self.length()
    }
}
