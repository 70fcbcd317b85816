//! One-sided Jacobi singular value decomposition for complex matrices.
//!
//! Columns are orthogonalized pairwise by plane rotations until every Gram
//! off-diagonal is negligible; singular values are the final column norms.
//! Jacobi converges unconditionally for the small, well-scaled unfolding
//! matrices this crate produces and computes even tiny singular values to
//! high relative accuracy, which matters because the splitting rank is read
//! off the singular-value profile.

use ndarray::Array2;
use num_complex::Complex64;

/// Relative Gram off-diagonal below which a column pair counts as orthogonal.
const ORTHO_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 60;

/// Thin decomposition `a = u * diag(sigma) * v^H` with `sigma` descending.
/// `u` is `m x min(m,n)`, `v` is `n x min(m,n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<Complex64>,
    pub sigma: Vec<f64>,
    pub v: Array2<Complex64>,
}

pub fn svd(a: &Array2<Complex64>) -> Svd {
    if a.nrows() >= a.ncols() {
        svd_tall(a.clone())
    } else {
        let b = a.t().mapv(|z| z.conj());
        let Svd { u, sigma, v } = svd_tall(b);
        Svd { u: v, sigma, v: u }
    }
}

fn svd_tall(mut w: Array2<Complex64>) -> Svd {
    let (m, n) = (w.nrows(), w.ncols());
    debug_assert!(m >= n);
    let mut v = Array2::<Complex64>::eye(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::ZERO;
                for r in 0..m {
                    let wp = w[(r, p)];
                    let wq = w[(r, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g <= ORTHO_TOL * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Absorb the phase into column q so the 2x2 Gram block is
                // real symmetric, then rotate it diagonal.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let wp = w[(r, p)];
                    let wq = w[(r, q)] * phase;
                    w[(r, p)] = wp * c - wq * s;
                    w[(r, q)] = wp * s + wq * c;
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)] * phase;
                    v[(r, p)] = vp * c - vq * s;
                    v[(r, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| w.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut u = Array2::<Complex64>::zeros((m, n));
    let mut vs = Array2::<Complex64>::zeros((n, n));
    let mut sigma = Vec::with_capacity(n);
    for (slot, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > 0.0 {
            for r in 0..m {
                u[(r, slot)] = w[(r, j)] / s;
            }
        }
        for r in 0..n {
            vs[(r, slot)] = v[(r, j)];
        }
    }
    Svd { u, sigma, v: vs }
}
