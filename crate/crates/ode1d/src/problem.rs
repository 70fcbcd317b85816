//! Boundary-value problem description: one linear ordinary differential
//! operator, a list of linear functionals with prescribed values, and a
//! right-hand side.

use cheb_core::Cheb1;
use ndarray::Array2;
use num_complex::Complex64;
use ultra_ops::{BoundaryRows, LinearODO};

use crate::error::OdeError;

/// A linear functional applied to the solution's Chebyshev coefficients.
#[derive(Debug, Clone)]
pub enum Constraint {
    /// u(x).
    PointValue { x: f64 },
    /// The order-th derivative of u at x.
    PointDerivative { x: f64, order: usize },
    /// A combination `sum_k c_k u^(k)(x)` of derivatives at one point.
    PointFunctional { x: f64, terms: Vec<(usize, Complex64)> },
    /// A raw row applied to the leading coefficients; zero-extended (or
    /// truncated) to the current discretization size.
    CoefficientRow(Vec<Complex64>),
}

impl Constraint {
    /// The functional as a length-n row acting on Chebyshev coefficients.
    pub fn row(&self, n: usize, interval: cheb_core::Interval) -> Vec<Complex64> {
        match self {
            Constraint::PointValue { x } => {
                BoundaryRows::point_value(*x, n, interval).rows().row(0).to_vec()
            }
            Constraint::PointDerivative { x, order } => {
                BoundaryRows::point_derivative(*x, *order, n, interval).rows().row(0).to_vec()
            }
            Constraint::PointFunctional { x, terms } => {
                let mut row = vec![Complex64::ZERO; n];
                for (order, c) in terms {
                    let part = BoundaryRows::point_derivative(*x, *order, n, interval);
                    for (r, p) in row.iter_mut().zip(part.rows().row(0)) {
                        *r += c * p;
                    }
                }
                row
            }
            Constraint::CoefficientRow(row) => {
                let mut r = row.clone();
                r.resize(n, Complex64::ZERO);
                r
            }
        }
    }

    /// Applies the functional to a computed solution.
    pub fn apply(&self, u: &Cheb1) -> Complex64 {
        self.row(u.len(), u.interval())
            .iter()
            .zip(u.coeffs())
            .map(|(r, c)| r * c)
            .sum()
    }
}

/// A well-formed boundary-value problem. The number of constraints is not
/// forced to match the differential order; an inconsistent count surfaces as
/// a singular discretization when solving.
#[derive(Debug, Clone)]
pub struct OdeProblem {
    pub(crate) operator: LinearODO,
    pub(crate) constraints: Vec<Constraint>,
    pub(crate) values: Vec<Complex64>,
    pub(crate) rhs: Cheb1,
}

impl OdeProblem {
    pub fn new(
        operator: LinearODO,
        constraints: Vec<Constraint>,
        values: Vec<Complex64>,
        rhs: Cheb1,
    ) -> Result<Self, OdeError> {
        if constraints.len() != values.len() {
            return Err(OdeError::ConstraintCountMismatch {
                constraints: constraints.len(),
                values: values.len(),
            });
        }
        if rhs.interval() != operator.interval() {
            return Err(OdeError::IntervalMismatch {
                a0: operator.interval().a(),
                b0: operator.interval().b(),
                a1: rhs.interval().a(),
                b1: rhs.interval().b(),
            });
        }
        Ok(Self { operator, constraints, values, rhs })
    }

    pub fn operator(&self) -> &LinearODO {
        &self.operator
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn rhs(&self) -> &Cheb1 {
        &self.rhs
    }

    /// All constraint rows stacked, at discretization size n.
    pub(crate) fn boundary_rows(&self, n: usize) -> BoundaryRows {
        let k = self.constraints.len();
        let mut rows = Array2::zeros((k, n));
        for (i, c) in self.constraints.iter().enumerate() {
            for (j, v) in c.row(n, self.operator.interval()).into_iter().enumerate() {
                rows[[i, j]] = v;
            }
        }
        BoundaryRows::new(rows)
    }
}

/// Knobs for the adaptive solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative coefficient-tail tolerance.
    pub tol: f64,
    /// First discretization size; grows as n -> 2(n-1)+1.
    pub start_n: usize,
    /// Largest polynomial degree attempted.
    pub max_degree: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-14, start_n: 17, max_degree: 1 << 17 }
    }
}
