//! Chebyshev coefficient containers, transforms between values and
//! coefficients, evaluation, and adaptive function approximation in 1D and 2D.
//!
//! Functions on an interval are stored as Chebyshev-T expansions ([`Cheb1`]);
//! functions on a rectangle as tensor-product coefficient matrices ([`Cheb2`])
//! with the row index tied to the y-degree and the column index to the
//! x-degree. Values live on descending second-kind point grids
//! (`x_k = cos(k*pi/(n-1))` mapped to the interval), and
//! [`vals_to_coeffs`]/[`coeffs_to_vals`] convert between the two
//! representations exactly up to roundoff.
//!
//! All types are immutable after construction and all operations are pure;
//! everything here is safe to call concurrently.

mod adaptive;
mod cheb1;
mod cheb2;
mod error;
mod interval;
mod transform;

pub use adaptive::{
    interp1_adaptive, interp2_adaptive, tail_len, tail_resolved, tail_resolved_2d, trim_coeffs,
    trim_coeffs_2d, AdaptiveOptions,
};
pub use cheb1::{clenshaw_eval, Cheb1};
pub use cheb2::{coeffs_to_vals_2d, eval2, vals_to_coeffs_2d, Cheb2};
pub use error::ChebError;
pub use interval::Interval;
pub use transform::{cheb_points, coeffs_to_vals, vals_to_coeffs, DIRECT_CUTOFF};

pub use num_complex::Complex64;
