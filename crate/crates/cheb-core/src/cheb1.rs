use ndarray::ArrayView1;
use num_complex::Complex64;

use crate::error::ChebError;
use crate::interval::Interval;

/// A function on an [`Interval`], stored as Chebyshev-T expansion coefficients
/// in ascending degree: `f(x) = sum_j coeffs[j] * T_j(t)` with `t` the image of
/// `x` under the interval's affine map onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cheb1 {
    coeffs: Vec<Complex64>,
    interval: Interval,
}

impl Cheb1 {
    /// Wraps a coefficient vector; at least one coefficient is required.
    pub fn new(coeffs: Vec<Complex64>, interval: Interval) -> Result<Self, ChebError> {
        if coeffs.is_empty() {
            return Err(ChebError::EmptyInput);
        }
        Ok(Self { coeffs, interval })
    }

    /// The constant function `value` on `interval`.
    pub fn constant(value: Complex64, interval: Interval) -> Self {
        Self {
            coeffs: vec![value],
            interval,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Number of stored coefficients (always at least 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Polynomial degree of the stored expansion.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates at `x`; see [`clenshaw_eval`].
    pub fn eval(&self, x: f64) -> Result<Complex64, ChebError> {
        clenshaw_eval(self, x)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Clenshaw recurrence for `sum_j c_j T_j(t)` at a point of `[-1, 1]`.
///
/// No domain check: callers map and validate coordinates first.
pub(crate) fn clenshaw_unit(coeffs: ArrayView1<'_, Complex64>, t: f64) -> Complex64 {
    let n = coeffs.len();
    if n == 0 {
        return Complex64::ZERO;
    }
    let mut b1 = Complex64::ZERO;
    let mut b2 = Complex64::ZERO;
    for j in (1..n).rev() {
        let b = coeffs[j] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    coeffs[0] + t * b1 - b2
}

/// Evaluates `f` at `x` by the Clenshaw recurrence.
///
/// `x` must lie in `f.interval()` up to the tolerance of
/// [`Interval::contains`]; the mapped coordinate is clamped to `[-1, 1]` so
/// endpoint evaluations stay exact under roundoff.
pub fn clenshaw_eval(f: &Cheb1, x: f64) -> Result<Complex64, ChebError> {
    let iv = f.interval();
    if !iv.contains(x) {
        return Err(ChebError::OutOfDomain {
            x,
            a: iv.a(),
            b: iv.b(),
        });
    }
    let t = iv.to_unit(x).clamp(-1.0, 1.0);
    Ok(clenshaw_unit(ArrayView1::from(f.coeffs()), t))
}
