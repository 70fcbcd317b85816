//! Ordinary differential operators with variable coefficients, their banded
//! coefficient-space discretizations, and boundary-constraint rows.

use std::collections::BTreeMap;

use cheb_core::{trim_coeffs, Cheb1, Interval};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::almost::AlmostBanded;
use crate::banded::BandedOp;
use crate::error::UltraError;
use crate::gegenbauer::gegenbauer_value;
use crate::ops::{conversion_chain, diff_op, mult_op0, mult_opl};

/// Coefficients below this relative size are dropped when an operator's
/// order and bandwidth are determined.
const COEFF_TRIM_TOL: f64 = 1e-14;

/// A linear ordinary differential operator `sum_d a_d(x) (d/dx)^d` with
/// Chebyshev-expanded coefficients on a common interval.
#[derive(Debug, Clone)]
pub struct LinearODO {
    coeffs: BTreeMap<usize, Cheb1>,
    interval: Interval,
}

impl LinearODO {
    /// Builds the operator from `(derivative order, coefficient)` pairs.
    /// Coefficients for the same order are rejected, coefficients on a
    /// different interval are rejected, and identically zero coefficients
    /// are dropped; at least one order must survive.
    pub fn new(
        terms: impl IntoIterator<Item = (usize, Cheb1)>,
        interval: Interval,
    ) -> Result<Self, UltraError> {
        let mut coeffs = BTreeMap::new();
        for (order, a) in terms {
            if a.interval() != interval {
                return Err(UltraError::IntervalMismatch {
                    a0: interval.a(),
                    b0: interval.b(),
                    a1: a.interval().a(),
                    b1: a.interval().b(),
                });
            }
            let trimmed = trim_coeffs(a.coeffs().to_vec(), COEFF_TRIM_TOL);
            if trimmed.len() == 1 && trimmed[0] == Complex64::ZERO {
                continue;
            }
            let a = Cheb1::new(trimmed, interval).expect("trim keeps at least one coefficient");
            if coeffs.insert(order, a).is_some() {
                return Err(UltraError::InvalidStructure {
                    detail: format!("duplicate coefficient for derivative order {order}"),
                });
            }
        }
        if coeffs.is_empty() {
            return Err(UltraError::IllPosedOperator);
        }
        Ok(Self { coeffs, interval })
    }

    /// Convenience constructor for constant coefficients `c_d (d/dx)^d`.
    pub fn with_constant_coeffs(
        terms: impl IntoIterator<Item = (usize, Complex64)>,
        interval: Interval,
    ) -> Result<Self, UltraError> {
        Self::new(
            terms.into_iter().map(|(d, c)| (d, Cheb1::constant(c, interval))),
            interval,
        )
    }

    /// Highest derivative order with a nonzero coefficient.
    pub fn order(&self) -> usize {
        *self.coeffs.keys().next_back().expect("constructor requires a nonzero term")
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn coeff(&self, order: usize) -> Option<&Cheb1> {
        self.coeffs.get(&order)
    }

    /// Largest polynomial degree among the coefficients.
    pub fn max_coeff_degree(&self) -> usize {
        self.coeffs.values().map(|a| a.degree()).max().unwrap_or(0)
    }
}

/// n-by-n coefficient-space discretization of the operator: it maps the
/// first n Chebyshev-T coefficients of u to the first n ultraspherical
/// `C^(N)` coefficients of `L u`, where N is the operator's order. Each term
/// contributes `S_(N-1) ... S_d  M_d[a_d]  D_d`; the factors are built at the
/// padded size `n + 2 N + max_deg` and the product truncated, which makes the
/// leading n-by-n block independent of n. The result has at most
/// `max_deg` subdiagonals and `2 N + max_deg` superdiagonals.
pub fn discretize_odo(odo: &LinearODO, n: usize) -> Result<BandedOp, UltraError> {
    let order = odo.order();
    let max_deg = odo.max_coeff_degree();
    let p = n + 2 * order + max_deg;

    let mut total: Option<BandedOp> = None;
    for (&d, a) in &odo.coeffs {
        let deriv = diff_op(d, p, odo.interval());
        let with_mult = if a.degree() == 0 {
            deriv.scale(a.coeffs()[0])
        } else if d == 0 {
            mult_op0(a, p)
        } else {
            mult_opl(a, d, p).mul(&deriv)
        };
        let term = conversion_chain(d, order, p).mul(&with_mult);
        total = Some(match total {
            Some(acc) => acc.add(&term),
            None => term,
        });
    }
    Ok(total.expect("constructor guarantees at least one term").principal(n))
}

/// A block of dense functional-constraint rows acting on Chebyshev-T
/// coefficient vectors of length n.
#[derive(Debug, Clone)]
pub struct BoundaryRows {
    rows: Array2<Complex64>,
}

impl BoundaryRows {
    pub fn new(rows: Array2<Complex64>) -> Self {
        Self { rows }
    }

    pub fn empty(n: usize) -> Self {
        Self { rows: Array2::zeros((0, n)) }
    }

    /// Point-evaluation row: entry j is `T_j` at x. Uses the three-term
    /// recurrence, which is exact for any real argument.
    pub fn point_value(x: f64, n: usize, interval: Interval) -> Self {
        let t = interval.to_unit(x);
        let mut row = Array1::zeros(n);
        let mut prev = 1.0;
        let mut cur = t;
        for j in 0..n {
            row[j] = Complex64::new(if j == 0 { 1.0 } else { cur }, 0.0);
            if j >= 1 {
                (prev, cur) = (cur, 2.0 * t * cur - prev);
            }
        }
        Self { rows: row.insert_axis(ndarray::Axis(0)) }
    }

    /// Point-evaluation row for the d-th derivative: entry j is
    /// `(d/dx)^d T_j` at x, via `T_j^(d) = 2^(d-1) j (d-1)! C^(d)_(j-d)` and
    /// the interval's affine scale.
    pub fn point_derivative(x: f64, d: usize, n: usize, interval: Interval) -> Self {
        if d == 0 {
            return Self::point_value(x, n, interval);
        }
        let t = interval.to_unit(x);
        let mut factorial = 1.0;
        for k in 1..d {
            factorial *= k as f64;
        }
        let prefactor =
            2.0f64.powi(d as i32 - 1) * factorial * interval.derivative_scale().powi(d as i32);
        let mut row = Array1::zeros(n);
        for j in d..n {
            let value = prefactor * j as f64 * gegenbauer_value(d, j - d, t);
            row[j] = Complex64::new(value, 0.0);
        }
        Self { rows: row.insert_axis(ndarray::Axis(0)) }
    }

    /// Stacks another block underneath this one.
    pub fn stack(mut self, other: &BoundaryRows) -> Self {
        assert_eq!(self.rows.ncols(), other.rows.ncols(), "row blocks must share a width");
        self.rows.append(ndarray::Axis(0), other.rows.view()).expect("widths match");
        self
    }

    /// Number of constraint rows.
    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn n(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &Array2<Complex64> {
        &self.rows
    }
}

/// Assembles the square almost-banded system for `L u = f` with k functional
/// constraints `B u = c`: the k constraint rows sit on top and the first
/// n - k rows of the discretized operator follow, so the banded part gains k
/// subdiagonals and loses k superdiagonals. The right-hand side must already
/// be expressed in the operator's range basis `C^(N)` (see
/// [`conversion_chain`]); its first n - k coefficients are kept, preceded by
/// the constraint values.
pub fn assemble_system(
    lmat: &BandedOp,
    boundary: &BoundaryRows,
    constraint_values: &[Complex64],
    rhs_range_basis: &[Complex64],
) -> Result<(AlmostBanded, Vec<Complex64>), UltraError> {
    let n = lmat.n();
    let k = boundary.len();
    if boundary.n() != n {
        return Err(UltraError::SizeMismatch { expected: n, got: boundary.n() });
    }
    if k > n {
        return Err(UltraError::SizeMismatch { expected: n, got: k });
    }
    if constraint_values.len() != k {
        return Err(UltraError::SizeMismatch { expected: k, got: constraint_values.len() });
    }
    if rhs_range_basis.len() != n {
        return Err(UltraError::SizeMismatch { expected: n, got: rhs_range_basis.len() });
    }

    let lower = (lmat.lower() + k).min(n.saturating_sub(1));
    let upper = lmat.upper().saturating_sub(k);
    let mut band = BandedOp::zeros(n, lower, upper);
    for i in k..n {
        let src = i - k;
        for j in src.saturating_sub(lmat.lower())..(src + lmat.upper() + 1).min(n) {
            let v = lmat.get(src, j);
            if v != Complex64::ZERO {
                band.set(i, j, v);
            }
        }
    }
    let m = AlmostBanded::new(band, boundary.rows().clone())?;

    let mut rhs = Vec::with_capacity(n);
    rhs.extend_from_slice(constraint_values);
    rhs.extend_from_slice(&rhs_range_basis[..n - k]);
    Ok((m, rhs))
}

/// Converts a length-n Chebyshev-T coefficient vector into the `C^(order)`
/// range basis used by [`assemble_system`].
pub fn to_range_basis(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    conversion_chain(0, order, coeffs.len()).matvec(coeffs)
}
