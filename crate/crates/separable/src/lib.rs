//! Separable representations of linear partial differential operators.
//!
//! Variable-coefficient operators on a rectangle can be written as a sum of
//! tensor products of one-dimensional operators. The minimal number of terms
//! (the splitting rank) controls the cost of the downstream matrix-equation
//! solve, so it is computed numerically here from a singular value
//! decomposition of the operator's unfolding matrix.

mod error;
mod rank;
mod svd;

pub use error::SepError;
pub use rank::{
    reconstruct_symbol, splitting_rank, SepTerm, SeparableRep, DEFAULT_RANK_TOL,
};
pub use svd::{svd, Svd};
