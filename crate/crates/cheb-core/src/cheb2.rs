use ndarray::{Array1, Array2, ArrayView1, Axis};
use num_complex::Complex64;

use crate::cheb1::clenshaw_unit;
use crate::error::ChebError;
use crate::interval::Interval;
use crate::transform::{coeffs_to_vals_raw, vals_to_coeffs_raw};

/// A bivariate function on a rectangle, stored as the `n_y x n_x` matrix `X`
/// of tensor-product Chebyshev coefficients:
/// `f(x, y) = sum_{i,j} X[i, j] * T_i(psi(y)) * T_j(phi(x))`,
/// where `phi`/`psi` map `xinterval`/`yinterval` onto `[-1, 1]`.
///
/// Row index selects the y-degree, column index the x-degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Cheb2 {
    x: Array2<Complex64>,
    xinterval: Interval,
    yinterval: Interval,
}

impl Cheb2 {
    /// Wraps a coefficient matrix; both dimensions must be at least 1.
    pub fn new(
        x: Array2<Complex64>,
        xinterval: Interval,
        yinterval: Interval,
    ) -> Result<Self, ChebError> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(ChebError::EmptyInput);
        }
        Ok(Self {
            x,
            xinterval,
            yinterval,
        })
    }

    /// The constant function `value` on the rectangle.
    pub fn constant(value: Complex64, xinterval: Interval, yinterval: Interval) -> Self {
        Self {
            x: Array2::from_elem((1, 1), value),
            xinterval,
            yinterval,
        }
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.x
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.x
    }

    pub fn xinterval(&self) -> Interval {
        self.xinterval
    }

    pub fn yinterval(&self) -> Interval {
        self.yinterval
    }

    /// Number of coefficient columns (x-direction).
    pub fn nx(&self) -> usize {
        self.x.ncols()
    }

    /// Number of coefficient rows (y-direction).
    pub fn ny(&self) -> usize {
        self.x.nrows()
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.x.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Evaluates at `(x, y)`; see [`eval2`].
    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64, ChebError> {
        eval2(self, x, y)
    }
}

/// Evaluates the double Chebyshev sum by Clenshaw in x along every row, then
/// Clenshaw in y on the resulting column of partial sums.
pub fn eval2(s: &Cheb2, x: f64, y: f64) -> Result<Complex64, ChebError> {
    let (xi, yi) = (s.xinterval(), s.yinterval());
    if !xi.contains(x) {
        return Err(ChebError::OutOfDomain {
            x,
            a: xi.a(),
            b: xi.b(),
        });
    }
    if !yi.contains(y) {
        return Err(ChebError::OutOfDomain {
            x: y,
            a: yi.a(),
            b: yi.b(),
        });
    }
    let tx = xi.to_unit(x).clamp(-1.0, 1.0);
    let ty = yi.to_unit(y).clamp(-1.0, 1.0);
    let partial: Array1<Complex64> = s
        .coeffs()
        .rows()
        .into_iter()
        .map(|row| clenshaw_unit(row, tx))
        .collect();
    Ok(clenshaw_unit(partial.view(), ty))
}

/// Tensor-product transform: values `V[i, j] = f(x_j, y_i)` on the grid of
/// descending second-kind points (y down rows, x across columns) -> the
/// coefficient matrix of the bidegree interpolant.
pub fn vals_to_coeffs_2d(mut v: Array2<Complex64>) -> Array2<Complex64> {
    for mut lane in v.lanes_mut(Axis(0)) {
        let coeffs = vals_to_coeffs_raw(&lane.to_vec());
        lane.assign(&ArrayView1::from(&coeffs));
    }
    for mut lane in v.lanes_mut(Axis(1)) {
        let coeffs = vals_to_coeffs_raw(&lane.to_vec());
        lane.assign(&ArrayView1::from(&coeffs));
    }
    v
}

/// Inverse of [`vals_to_coeffs_2d`] on a matrix of the same shape.
pub fn coeffs_to_vals_2d(mut c: Array2<Complex64>) -> Array2<Complex64> {
    for mut lane in c.lanes_mut(Axis(0)) {
        let vals = coeffs_to_vals_raw(&lane.to_vec());
        lane.assign(&ArrayView1::from(&vals));
    }
    for mut lane in c.lanes_mut(Axis(1)) {
        let vals = coeffs_to_vals_raw(&lane.to_vec());
        lane.assign(&ArrayView1::from(&vals));
    }
    c
}
