//! Adaptive spectral boundary-value solver on an interval.
//!
//! A problem is a linear ordinary differential operator with variable
//! coefficients, a list of linear functionals (boundary or interior point
//! values, derivatives, or raw coefficient rows) with prescribed values, and
//! a right-hand side. The solver discretizes in coefficient space with the
//! banded ultraspherical operators, bolts the functionals on top as dense
//! rows, solves the almost-banded system, and doubles the grid until the
//! solution's coefficient tail falls under the requested tolerance.
//!
//! Everything is pure; independent solves can run concurrently.

mod error;
mod problem;
mod solver;

pub use error::OdeError;
pub use problem::{Constraint, OdeProblem, SolveOptions};
pub use solver::{solve_ode, OdeDiagnostics, OdeSolution};
