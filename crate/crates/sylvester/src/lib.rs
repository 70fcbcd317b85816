//! Direct solvers for generalized Sylvester matrix equations with boundary
//! constraints: `sum_j A_j X C_j^T = F` on the leading block, subject to
//! `B_y X = H` and `X B_x^T = G^T`.
//!
//! The pipeline canonicalizes the constraint rows to identity-leading form,
//! checks corner compatibility of the data, eliminates the constrained rows
//! and columns, and then dispatches on the number of terms: banded
//! triangular solves for one term, generalized Bartels-Stewart (QZ) for two,
//! and a Kronecker-stacked almost-banded solve for three or more.

mod dense;
mod error;
mod qz;
mod reduce;
mod solve;

pub use error::SylError;
pub use qz::{qz, Qz};
pub use reduce::{
    canonicalize, check_compatibility, eliminate, Canonical, CompatReport, ConstrainedSylvester,
    ReducedSylvester, COMPAT_TOL,
};
pub use solve::{
    recover, solve_constrained, solve_k1, solve_k2, solve_kge3, Orientation, SolveOptions,
    SolvePath, SolveReport, SylvesterSolution,
};
