//! Pointwise evaluation of ultraspherical (Gegenbauer) polynomials and series.
//!
//! `C^(lambda)_m` satisfies `C_0 = 1`, `C_1 = 2*lambda*t`, and
//! `(m+1) C_{m+1} = 2(m+lambda) t C_m - (m+2*lambda-1) C_{m-1}`.
//! These values feed boundary-row construction (derivatives of `T_j` at a
//! point) and serve as the evaluation route for `C^(lambda)` series.

use num_complex::Complex64;

/// Value of `C^(lambda)_m(t)` for `lambda >= 1`, `t` in `[-1, 1]`.
pub fn gegenbauer_value(lambda: usize, m: usize, t: f64) -> f64 {
    debug_assert!(lambda >= 1);
    let lam = lambda as f64;
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 * lam * t;
    for k in 1..m {
        let kf = k as f64;
        let next = (2.0 * (kf + lam) * t * cur - (kf + 2.0 * lam - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `sum_m coeffs[m] * C^(lambda)_m(t)`; `lambda = 0` means the
/// Chebyshev-T basis.
pub fn ultra_series_value(lambda: usize, coeffs: &[Complex64], t: f64) -> Complex64 {
    if lambda == 0 {
        // T_m(t) = cos(m * arccos(t)); forward summation keeps this an
        // independent route from the coefficient-space operators under test.
        let theta = t.clamp(-1.0, 1.0).acos();
        return coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| c * (m as f64 * theta).cos())
            .sum();
    }
    let lam = lambda as f64;
    let mut sum = Complex64::ZERO;
    let mut prev = 1.0;
    let mut cur = 2.0 * lam * t;
    for (m, &c) in coeffs.iter().enumerate() {
        let value = if m == 0 { prev } else { cur };
        sum += c * value;
        if m >= 1 {
            let mf = m as f64;
            let next = (2.0 * (mf + lam) * t * cur - (mf + 2.0 * lam - 1.0) * prev) / (mf + 1.0);
            prev = cur;
            cur = next;
        }
    }
    sum
}
