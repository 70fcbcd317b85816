//! Tail test on solution coefficient matrices.

use cheb_core::tail_len;
use ndarray::{s, Array2};
use num_complex::Complex64;

/// Per-dimension resolution test: `x_ok` iff the trailing
/// `max(3, ceil(n_x/32))` columns all stay at or below `tol * max|X|`, and
/// `y_ok` the same on rows. The window is clipped so the leading
/// coefficient is never part of a tail; a single-entry matrix therefore
/// counts as resolved.
pub fn is_resolved(x: &Array2<Complex64>, tol: f64) -> (bool, bool) {
    let maxc = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if maxc == 0.0 {
        return (true, true);
    }
    let (ny, nx) = x.dim();
    let ty = tail_len(ny).min(ny - 1);
    let tx = tail_len(nx).min(nx - 1);
    let y_ok = x.slice(s![ny - ty.., ..]).iter().all(|z| z.norm() <= tol * maxc);
    let x_ok = x.slice(s![.., nx - tx..]).iter().all(|z| z.norm() <= tol * maxc);
    (x_ok, y_ok)
}
