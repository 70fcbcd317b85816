//! Small dense helpers: LU solves for constraint-block inversions and
//! triangular back-substitution used by the Schur-based path.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::SylError;

/// Solves `a * x = rhs` for possibly many right-hand-side columns by LU with
/// partial pivoting. Intended for small, well-conditioned blocks.
pub(crate) fn lu_solve(
    a: &Array2<Complex64>,
    rhs: &Array2<Complex64>,
) -> Result<Array2<Complex64>, SylError> {
    let n = a.nrows();
    if a.ncols() != n || rhs.nrows() != n {
        return Err(SylError::InvalidDimensions {
            detail: format!("lu_solve: {:?} vs rhs {:?}", a.dim(), rhs.dim()),
        });
    }
    let mut lu = a.clone();
    let mut x = rhs.clone();
    let scale = lu.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                lu[(r, col)].norm().partial_cmp(&lu[(s, col)].norm()).unwrap()
            })
            .unwrap();
        if lu[(pivot_row, col)].norm() <= 1e-14 * scale {
            return Err(SylError::DependentConstraints);
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap((col, j), (pivot_row, j));
            }
            for j in 0..x.ncols() {
                x.swap((col, j), (pivot_row, j));
            }
        }
        let pivot = lu[(col, col)];
        for r in (col + 1)..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in (col + 1)..n {
                let sub = factor * lu[(col, j)];
                lu[(r, j)] -= sub;
            }
            for j in 0..x.ncols() {
                let sub = factor * x[(col, j)];
                x[(r, j)] -= sub;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..x.ncols() {
            let mut v = x[(col, j)];
            for m in (col + 1)..n {
                v -= lu[(col, m)] * x[(m, j)];
            }
            x[(col, j)] = v / pivot;
        }
    }
    Ok(x)
}

/// Largest entry magnitude.
pub(crate) fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
