//! Sparse coefficient-space operators for spectral methods on an interval.
//!
//! Working in ultraspherical bases `C^(lambda)` instead of values on a grid
//! makes the classical spectral operators sparse: differentiation is a
//! single superdiagonal, basis conversion is two diagonals, and
//! multiplication by a degree-m polynomial is a bandwidth-m matrix. This
//! crate provides
//!
//! - the banded building blocks `diff_op`, `conv_op`, `mult_op0`,
//!   `mult_opl` and a small [`BandedOp`] container for composing them;
//! - [`LinearODO`] and [`discretize_odo`], which assemble a whole variable
//!   coefficient ordinary differential operator into one banded matrix;
//! - [`BoundaryRows`] and [`assemble_system`], which bolt dense functional
//!   constraints on top of the truncated operator;
//! - [`AlmostBanded`] / [`AlmostBandedQr`] / [`almost_banded_solve`], a
//!   Givens QR solver for the resulting banded-plus-dense-rows systems that
//!   runs in O(n (bandwidth + k)^2) time and reports rank deficiency.
//!
//! All matrices act on coefficient vectors ordered by increasing degree.
//! Operators carry their interval, so derivative scalings for affine maps
//! are already folded in.

mod almost;
mod banded;
mod error;
mod gegenbauer;
mod odo;
mod ops;

pub use almost::{almost_banded_solve, AlmostBanded, AlmostBandedQr};
pub use banded::BandedOp;
pub use error::UltraError;
pub use gegenbauer::{gegenbauer_value, ultra_series_value};
pub use odo::{assemble_system, discretize_odo, to_range_basis, BoundaryRows, LinearODO};
pub use ops::{conv_op, conversion_chain, diff_op, mult_op0, mult_opl};
