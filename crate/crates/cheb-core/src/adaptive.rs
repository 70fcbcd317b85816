//! Adaptive interpolation: sample on doubling second-kind grids until the
//! coefficient tail decays, then trim the converged tail.

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::cheb1::Cheb1;
use crate::cheb2::{vals_to_coeffs_2d, Cheb2};
use crate::error::ChebError;
use crate::interval::Interval;
use crate::transform::{cheb_points, vals_to_coeffs_raw};

/// Tolerance and degree cap for adaptive interpolation.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Relative tail threshold: trailing coefficients must drop below
    /// `tol * max|coeff|`.
    pub tol: f64,
    /// Largest polynomial degree attempted per dimension.
    pub max_degree: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_degree: 1 << 17,
        }
    }
}

/// Length of the coefficient tail inspected by the resolution test:
/// `max(3, ceil(n/32))` of `n` coefficients.
pub fn tail_len(n: usize) -> usize {
    3.max(n.div_ceil(32)).min(n)
}

/// Resolution test for a coefficient vector: every coefficient in the
/// trailing [`tail_len`] block must be below `tol * max|coeff|`.
/// An all-zero vector counts as resolved.
pub fn tail_resolved(coeffs: &[Complex64], tol: f64) -> bool {
    let maxc = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if maxc == 0.0 {
        return true;
    }
    let t = tail_len(coeffs.len());
    coeffs[coeffs.len() - t..]
        .iter()
        .all(|z| z.norm() < tol * maxc)
}

/// Resolution test per dimension of a coefficient matrix. Returns
/// `(rows_resolved, cols_resolved)`: the trailing [`tail_len`] rows (y) and
/// columns (x) must each have all entries below `tol * max|entry|`.
pub fn tail_resolved_2d(coeffs: &Array2<Complex64>, tol: f64) -> (bool, bool) {
    let maxc = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if maxc == 0.0 {
        return (true, true);
    }
    let (ny, nx) = coeffs.dim();
    let ty = tail_len(ny);
    let tx = tail_len(nx);
    let rows = coeffs
        .slice(s![ny - ty.., ..])
        .iter()
        .all(|z| z.norm() < tol * maxc);
    let cols = coeffs
        .slice(s![.., nx - tx..])
        .iter()
        .all(|z| z.norm() < tol * maxc);
    (rows, cols)
}

/// Drops trailing coefficients below `tol * max|coeff|`, keeping at least one.
pub fn trim_coeffs(mut coeffs: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let maxc = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let keep = coeffs
        .iter()
        .rposition(|z| z.norm() >= tol * maxc && maxc > 0.0)
        .map_or(1, |j| j + 1);
    coeffs.truncate(keep);
    coeffs
}

/// 2D analogue of [`trim_coeffs`]: drops trailing rows and columns whose
/// entries are all below `tol * max|entry|`, keeping at least one of each.
pub fn trim_coeffs_2d(coeffs: &Array2<Complex64>, tol: f64) -> Array2<Complex64> {
    let maxc = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let thresh = tol * maxc;
    let keep_rows = if maxc == 0.0 {
        1
    } else {
        (0..coeffs.nrows())
            .rev()
            .find(|&i| coeffs.row(i).iter().any(|z| z.norm() >= thresh))
            .map_or(1, |i| i + 1)
    };
    let keep_cols = if maxc == 0.0 {
        1
    } else {
        (0..coeffs.ncols())
            .rev()
            .find(|&j| coeffs.column(j).iter().any(|z| z.norm() >= thresh))
            .map_or(1, |j| j + 1)
    };
    coeffs.slice(s![..keep_rows, ..keep_cols]).to_owned()
}

fn sample_1d(
    f: &impl Fn(f64) -> Complex64,
    pts: &[f64],
) -> Result<Vec<Complex64>, ChebError> {
    pts.iter()
        .map(|&x| {
            let v = f(x);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(ChebError::NonFiniteSample { x, y: None })
            }
        })
        .collect()
}

/// Approximates `f` on `interval` by a Chebyshev expansion, doubling the
/// degree through 8, 16, 32, ... until the coefficient tail decays below
/// `opts.tol`, then trimming the tail.
pub fn interp1_adaptive(
    f: impl Fn(f64) -> Complex64,
    interval: Interval,
    opts: &AdaptiveOptions,
) -> Result<Cheb1, ChebError> {
    let mut m = 8;
    loop {
        if m > opts.max_degree {
            return Err(ChebError::Unresolved {
                cap: opts.max_degree,
            });
        }
        let pts = cheb_points(m + 1, interval);
        let v = sample_1d(&f, &pts)?;
        let coeffs = vals_to_coeffs_raw(&v);
        if tail_resolved(&coeffs, opts.tol) {
            return Cheb1::new(trim_coeffs(coeffs, opts.tol), interval);
        }
        m *= 2;
    }
}

/// Approximates `f(x, y)` on a rectangle by a tensor-product Chebyshev
/// expansion, doubling each dimension independently until its coefficient
/// tail decays, then trimming both tails.
pub fn interp2_adaptive(
    f: impl Fn(f64, f64) -> Complex64,
    xinterval: Interval,
    yinterval: Interval,
    opts: &AdaptiveOptions,
) -> Result<Cheb2, ChebError> {
    let mut mx = 8;
    let mut my = 8;
    loop {
        if mx > opts.max_degree || my > opts.max_degree {
            return Err(ChebError::Unresolved {
                cap: opts.max_degree,
            });
        }
        let xs = cheb_points(mx + 1, xinterval);
        let ys = cheb_points(my + 1, yinterval);
        let mut v = Array2::zeros((my + 1, mx + 1));
        for (i, &y) in ys.iter().enumerate() {
            for (j, &x) in xs.iter().enumerate() {
                let z = f(x, y);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(ChebError::NonFiniteSample { x, y: Some(y) });
                }
                v[[i, j]] = z;
            }
        }
        let coeffs = vals_to_coeffs_2d(v);
        let (rows_ok, cols_ok) = tail_resolved_2d(&coeffs, opts.tol);
        if rows_ok && cols_ok {
            return Cheb2::new(trim_coeffs_2d(&coeffs, opts.tol), xinterval, yinterval);
        }
        if !rows_ok {
            my *= 2;
        }
        if !cols_ok {
            mx *= 2;
        }
    }
}
