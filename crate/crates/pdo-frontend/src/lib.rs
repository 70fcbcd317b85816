//! Text frontend for linear partial differential operators on rectangles.
//!
//! Operator expressions are written in the variables `x`, `y`, and the
//! unknown `u`, with `diff`, `laplacian`, and `biharmonic` for derivatives.
//! Parsing enforces linearity in `u`; extraction then separates the operator
//! into derivative-indexed variable coefficients, each sampled adaptively
//! into a bivariate Chebyshev expansion. Boundary conditions for the four
//! edges of a rectangle and point constraints for one-dimensional problems
//! use the same grammar.

mod ast;
mod bc;
mod error;
mod extract;
mod parser;

pub use ast::{Axis, FuncName, PdoExpr};
pub use bc::{
    bc_functional_terms, parse_bc, parse_point_constraint, BcKind, BcSpec, Edge, PointConstraint,
};
pub use error::PdoError;
pub use extract::{extract_coeffs, CoeffArray, DROP_TOL};
pub use parser::parse_pdo;
