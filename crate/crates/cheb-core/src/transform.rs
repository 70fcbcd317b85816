//! Transforms between values at second-kind Chebyshev points and T-coefficients.
//!
//! Values live on the descending grid `x_k = cos(k*pi/(n-1))`, `k = 0..n-1`.
//! Below [`DIRECT_CUTOFF`] points the transform is an O(n^2) cosine sum; at or
//! above it a length-`2(n-1)` FFT of the even extension is used. Both routes
//! agree to within 1e-13 and are cross-checked in tests.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::cheb1::Cheb1;
use crate::error::ChebError;
use crate::interval::Interval;

/// Point counts below this use the direct O(n^2) summation.
pub const DIRECT_CUTOFF: usize = 64;

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("fft planner lock poisoned");
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// The `n` second-kind Chebyshev points of `interval`, in descending order
/// (`x_0 = b`, `x_{n-1} = a`). For `n = 1` the single point is the midpoint.
pub fn cheb_points(n: usize, interval: Interval) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![interval.from_unit(0.0)];
    }
    let m = n - 1;
    let mut t = vec![0.0; n];
    for k in 0..=m / 2 {
        let v = (k as f64 * PI / m as f64).cos();
        t[k] = v;
        t[m - k] = -v;
    }
    if m % 2 == 0 {
        t[m / 2] = 0.0;
    }
    t.into_iter().map(|t| interval.from_unit(t)).collect()
}

/// cos(pi*t/m) for t = 0..2m, indexed by `j*k mod 2m` in the direct transforms.
fn cos_table(m: usize) -> Vec<f64> {
    (0..2 * m).map(|t| (t as f64 * PI / m as f64).cos()).collect()
}

fn forward_direct(v: &[Complex64]) -> Vec<Complex64> {
    let m = v.len() - 1;
    let table = cos_table(m);
    let mut c = vec![Complex64::ZERO; v.len()];
    for (j, cj) in c.iter_mut().enumerate() {
        let mut s = 0.5 * (v[0] + v[m] * table[(j * m) % (2 * m)]);
        for (k, &vk) in v.iter().enumerate().take(m).skip(1) {
            s += vk * table[(j * k) % (2 * m)];
        }
        *cj = s * (2.0 / m as f64);
    }
    c[0] *= 0.5;
    c[m] *= 0.5;
    c
}

fn backward_direct(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let table = cos_table(m);
    let mut v = vec![Complex64::ZERO; c.len()];
    for (k, vk) in v.iter_mut().enumerate() {
        let mut s = Complex64::ZERO;
        for (j, &cj) in c.iter().enumerate() {
            s += cj * table[(j * k) % (2 * m)];
        }
        *vk = s;
    }
    v
}

fn forward_fft(v: &[Complex64]) -> Vec<Complex64> {
    let m = v.len() - 1;
    let mut w = Vec::with_capacity(2 * m);
    w.extend_from_slice(v);
    w.extend(v[1..m].iter().rev());
    plan(2 * m, false).process(&mut w);
    let scale = 1.0 / m as f64;
    let mut c: Vec<Complex64> = w[..=m].iter().map(|&z| z * scale).collect();
    c[0] *= 0.5;
    c[m] *= 0.5;
    c
}

fn backward_fft(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let mut w = vec![Complex64::ZERO; 2 * m];
    w[0] = 2.0 * m as f64 * c[0];
    w[m] = 2.0 * m as f64 * c[m];
    for j in 1..m {
        let s = m as f64 * c[j];
        w[j] = s;
        w[2 * m - j] = s;
    }
    plan(2 * m, true).process(&mut w);
    let scale = 1.0 / (2 * m) as f64;
    w.truncate(m + 1);
    for z in &mut w {
        *z *= scale;
    }
    w
}

/// Values at the `n` descending second-kind points -> the `n` T-coefficients
/// of the unique degree-(n-1) interpolant. Inverse of [`coeffs_to_vals_raw`].
pub(crate) fn vals_to_coeffs_raw(v: &[Complex64]) -> Vec<Complex64> {
    match v.len() {
        0 => Vec::new(),
        1 => v.to_vec(),
        n if n < DIRECT_CUTOFF => forward_direct(v),
        _ => forward_fft(v),
    }
}

/// T-coefficients -> values at the `c.len()` descending second-kind points.
pub(crate) fn coeffs_to_vals_raw(c: &[Complex64]) -> Vec<Complex64> {
    match c.len() {
        0 => Vec::new(),
        1 => c.to_vec(),
        n if n < DIRECT_CUTOFF => backward_direct(c),
        _ => backward_fft(c),
    }
}

/// Interpolates values sampled at the `n` descending second-kind points of
/// `interval` (see [`cheb_points`]) by the degree-(n-1) Chebyshev expansion.
pub fn vals_to_coeffs(values: &[Complex64], interval: Interval) -> Result<Cheb1, ChebError> {
    if values.is_empty() {
        return Err(ChebError::EmptyInput);
    }
    Cheb1::new(vals_to_coeffs_raw(values), interval)
}

/// Evaluates `f` at the `n` descending second-kind points of its interval.
///
/// `n` must be at least `f.coeffs().len()`; the expansion is zero-padded to
/// degree `n-1` first, making this the exact inverse of [`vals_to_coeffs`].
pub fn coeffs_to_vals(f: &Cheb1, n: usize) -> Result<Vec<Complex64>, ChebError> {
    if n == 0 {
        return Err(ChebError::EmptyInput);
    }
    if n < f.coeffs().len() {
        return Err(ChebError::SizeMismatch {
            expected: f.coeffs().len(),
            got: n,
        });
    }
    let mut c = f.coeffs().to_vec();
    c.resize(n, Complex64::ZERO);
    Ok(coeffs_to_vals_raw(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_function_maps_to_t1() {
        // Values of x at the 3 points (1, 0, -1).
        let coeffs = vals_to_coeffs_raw(&[c(1.0), c(0.0), c(-1.0)]);
        assert!((coeffs[0].norm()) < 1e-15);
        assert!((coeffs[1] - c(1.0)).norm() < 1e-15);
        assert!((coeffs[2].norm()) < 1e-15);
    }

    #[test]
    fn constant_values_map_to_t0() {
        let coeffs = vals_to_coeffs_raw(&[c(1.0); 7]);
        assert!((coeffs[0] - c(1.0)).norm() < 1e-15);
        assert!(coeffs[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn t1_at_three_points() {
        let f = Cheb1::new(vec![c(0.0), c(1.0)], Interval::unit()).unwrap();
        let v = coeffs_to_vals(&f, 3).unwrap();
        assert!((v[0] - c(1.0)).norm() < 1e-15);
        assert!(v[1].norm() < 1e-15);
        assert!((v[2] - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_at_two_points() {
        let f = Cheb1::new(vec![c(1.0), c(0.0), c(0.0)], Interval::unit()).unwrap();
        let v = coeffs_to_vals(&f, 3).unwrap();
        assert!(v.iter().all(|z| (z - c(1.0)).norm() < 1e-15));
        let g = Cheb1::new(vec![c(1.0)], Interval::unit()).unwrap();
        let v = coeffs_to_vals(&g, 2).unwrap();
        assert_eq!(v, vec![c(1.0), c(1.0)]);
    }

    #[test]
    fn single_point_transform_is_identity() {
        let v = [Complex64::new(2.5, -1.0)];
        assert_eq!(vals_to_coeffs_raw(&v), v.to_vec());
        assert_eq!(coeffs_to_vals_raw(&v), v.to_vec());
    }

    #[test]
    fn truncation_must_be_explicit() {
        let f = Cheb1::new(vec![c(1.0), c(2.0), c(3.0)], Interval::unit()).unwrap();
        assert!(matches!(
            coeffs_to_vals(&f, 2),
            Err(ChebError::SizeMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn direct_and_fft_routes_agree() {
        // Sizes straddling the cutoff, both parities.
        for n in [2usize, 3, 5, 17, 63, 64, 65, 128, 129] {
            let v: Vec<Complex64> = (0..n)
                .map(|k| {
                    let s = (k as f64 * 0.7).sin();
                    Complex64::new(s, (k as f64 * 1.3).cos())
                })
                .collect();
            let direct = forward_direct(&v);
            let fft = forward_fft(&v);
            let scale: f64 = direct.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in direct.iter().zip(&fft) {
                assert!((a - b).norm() <= 1e-13 * scale.max(1.0), "n = {n}");
            }
            let back_direct = backward_direct(&direct);
            let back_fft = backward_fft(&direct);
            for ((a, b), orig) in back_direct.iter().zip(&back_fft).zip(&v) {
                assert!((a - b).norm() <= 1e-13 * scale.max(1.0), "n = {n}");
                assert!((a - orig).norm() <= 1e-13 * scale.max(1.0), "n = {n}");
            }
        }
    }

    #[test]
    fn points_are_descending_and_symmetric() {
        let pts = cheb_points(9, Interval::unit());
        assert_eq!(pts[0], 1.0);
        assert_eq!(pts[8], -1.0);
        assert_eq!(pts[4], 0.0);
        for k in 0..9 {
            assert!((pts[k] + pts[8 - k]).abs() < 1e-15);
        }
        assert_eq!(cheb_points(1, Interval::new(2.0, 4.0).unwrap()), vec![3.0]);
    }
}
