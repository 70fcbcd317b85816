//! The banded ultraspherical operators: differentiation `D_lambda`,
//! basis conversion `S_lambda`, and multiplication `M_0[a]`, `M_lambda[a]`.

use cheb_core::{Cheb1, Interval};
use num_complex::Complex64;

use crate::banded::BandedOp;

/// `D_lambda`: maps Chebyshev-T coefficients to `C^(lambda)` coefficients of
/// the lambda-th derivative. Single superdiagonal at offset `lambda` with
/// entries `2^(lambda-1) * (lambda-1)! * (lambda + i)`, scaled by
/// `(2/(b-a))^lambda` for the interval's affine map. `lambda = 0` is the
/// identity.
pub fn diff_op(lambda: usize, n: usize, interval: Interval) -> BandedOp {
    if lambda == 0 {
        return BandedOp::identity(n);
    }
    let mut factorial = 1.0;
    for k in 1..lambda {
        factorial *= k as f64;
    }
    let prefactor = 2.0f64.powi(lambda as i32 - 1)
        * factorial
        * interval.derivative_scale().powi(lambda as i32);
    let mut d = BandedOp::zeros(n, 0, lambda);
    for i in 0..n.saturating_sub(lambda) {
        d.set(i, i + lambda, Complex64::new(prefactor * (lambda + i) as f64, 0.0));
    }
    d
}

/// `S_lambda`: converts `C^(lambda)` coefficients to `C^(lambda+1)`
/// coefficients (`C^(0)` meaning Chebyshev-T). Two bands: the diagonal and
/// the second superdiagonal.
pub fn conv_op(lambda: usize, n: usize) -> BandedOp {
    let mut s = BandedOp::zeros(n, 0, 2);
    for i in 0..n {
        let diag = if lambda == 0 {
            if i == 0 {
                1.0
            } else {
                0.5
            }
        } else {
            lambda as f64 / (lambda + i) as f64
        };
        s.set(i, i, Complex64::new(diag, 0.0));
        if i + 2 < n {
            let sup = if lambda == 0 {
                -0.5
            } else {
                -(lambda as f64) / (lambda + i + 2) as f64
            };
            s.set(i, i + 2, Complex64::new(sup, 0.0));
        }
    }
    s
}

/// The chain `S_(to-1) * ... * S_(from)` converting `C^(from)` coefficients to
/// `C^(to)` coefficients; identity when `from == to`.
pub fn conversion_chain(from: usize, to: usize, n: usize) -> BandedOp {
    debug_assert!(from <= to);
    let mut chain = BandedOp::identity(n);
    for lambda in from..to {
        chain = conv_op(lambda, n).mul(&chain);
    }
    chain
}

/// `M_0[a]`: multiplication by `a` acting on Chebyshev-T coefficients,
/// `(Toeplitz[a] + Hankel[a]) / 2` with the Hankel part's first row zero.
/// Bandwidth equals the (trimmed) degree of `a`.
pub fn mult_op0(a: &Cheb1, n: usize) -> BandedOp {
    let coeffs = a.coeffs();
    let m = coeffs.len() - 1;
    let get = |k: usize| {
        if k <= m {
            coeffs[k]
        } else {
            Complex64::ZERO
        }
    };
    let mut op = BandedOp::zeros(n, m, m);
    for i in 0..n {
        let j_lo = i.saturating_sub(m);
        let j_hi = (i + m).min(n - 1);
        for j in j_lo..=j_hi {
            let toeplitz = if i == j { 2.0 * coeffs[0] } else { get(i.abs_diff(j)) };
            let hankel = if i == 0 { Complex64::ZERO } else { get(i + j) };
            let v = 0.5 * (toeplitz + hankel);
            if v != Complex64::ZERO {
                op.set(i, j, v);
            }
        }
    }
    op
}

/// Multiplication by `x` in the `C^(lambda)` basis (`lambda >= 1`):
/// tridiagonal from `t C_m = ((m+1) C_{m+1} + (m+2*lambda-1) C_{m-1}) / (2(m+lambda))`.
fn jacobi_x(lambda: usize, n: usize) -> BandedOp {
    let lam = lambda as f64;
    let mut j = BandedOp::zeros(n, 1, 1);
    for m in 0..n {
        let mf = m as f64;
        if m + 1 < n {
            // Entry (m+1, m): the C_{m+1} share of t*C_m.
            j.set(m + 1, m, Complex64::new((mf + 1.0) / (2.0 * (mf + lam)), 0.0));
        }
        if m >= 1 {
            // Entry (m-1, m): the C_{m-1} share of t*C_m.
            j.set(m - 1, m, Complex64::new((mf + 2.0 * lam - 1.0) / (2.0 * (mf + lam)), 0.0));
        }
    }
    j
}

/// `M_lambda[a]` (`lambda >= 1`): multiplication by `a` acting on
/// `C^(lambda)` coefficients. Built by the operator-valued three-term
/// recurrence `M_{k+1} = (2(k+lambda) J M_k - (k+2*lambda-1) M_{k-1})/(k+1)`
/// over the `C^(lambda)` expansion coefficients of `a`, which are obtained by
/// the conversion chain `S_(lambda-1) ... S_0` applied to `a`'s Chebyshev
/// coefficients. Bandwidth equals the degree of `a`.
///
/// Correctness caveat shared with every truncated composite: the leading
/// `(n - deg a)` block is exact; callers padding by the total bandwidth
/// before truncating (as `discretize_odo` does) see exact results.
pub fn mult_opl(a: &Cheb1, lambda: usize, n: usize) -> BandedOp {
    debug_assert!(lambda >= 1);
    let deg = a.coeffs().len() - 1;
    // a's C^(lambda) coefficients, computed at padded size so all deg+1
    // entries are exact under the upper-triangular conversion chain.
    let pad = deg + 1 + 2 * lambda;
    let mut a_vec = a.coeffs().to_vec();
    a_vec.resize(pad, Complex64::ZERO);
    let a_ultra = conversion_chain(0, lambda, pad).matvec(&a_vec);

    let lam = lambda as f64;
    let j = jacobi_x(lambda, n);
    let mut op = BandedOp::identity(n).scale(a_ultra[0]);
    if deg == 0 {
        return op;
    }
    let mut prev = BandedOp::identity(n);
    let mut cur = j.scale(Complex64::new(2.0 * lam, 0.0));
    op = op.add(&cur.scale(a_ultra[1]));
    for k in 1..deg {
        let kf = k as f64;
        let next = j
            .mul(&cur)
            .scale(Complex64::new(2.0 * (kf + lam) / (kf + 1.0), 0.0))
            .add(&prev.scale(Complex64::new(-(kf + 2.0 * lam - 1.0) / (kf + 1.0), 0.0)));
        prev = cur;
        cur = next;
        op = op.add(&cur.scale(a_ultra[k + 1]));
    }
    op
}
