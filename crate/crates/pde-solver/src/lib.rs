//! Adaptive spectral solver for linear partial differential equations with
//! variable coefficients on rectangles.

mod bcrows;
mod error;
mod parity;
mod problem;
mod resolve;
mod solve;
mod system;

pub use bcrows::{discretize_bcs, BoundaryData};
pub use error::PdeError;
pub use problem::{Diagnostics, ParityMode, PdeProblem, Rhs, Solution, StepReport};
pub use resolve::is_resolved;
pub use solve::{solve_pde, RESOLUTION_FLOOR};
pub use system::build_system;
