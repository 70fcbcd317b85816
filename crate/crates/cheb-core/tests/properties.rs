//! Property tests for the transform/evaluation invariants.

use cheb_core::{
    cheb_points, clenshaw_eval, coeffs_to_vals, eval2, interp1_adaptive, vals_to_coeffs,
    AdaptiveOptions, Cheb1, Cheb2, Complex64, Interval,
};
use ndarray::Array2;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        1..=max_len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // coeffs_to_vals then vals_to_coeffs is the identity, relative to the max
    // coefficient, for all lengths up to 512.
    #[test]
    fn transform_round_trip_is_identity(coeffs in complex_vec(512)) {
        let f = Cheb1::new(coeffs.clone(), Interval::unit()).unwrap();
        let vals = coeffs_to_vals(&f, coeffs.len()).unwrap();
        let back = vals_to_coeffs(&vals, Interval::unit()).unwrap();
        let scale = f.max_coeff().max(1e-300);
        for (a, b) in back.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).norm() <= 1e-13 * scale);
        }
    }

    // eval2 is bilinear in the coefficient matrix.
    #[test]
    fn eval2_is_bilinear(
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        x in -1.0f64..1.0,
        y in -1.0f64..1.0,
    ) {
        let xs: Vec<Complex64> = entries[..12].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let ys: Vec<Complex64> = entries[12..].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let xm = Array2::from_shape_vec((3, 4), xs).unwrap();
        let ym = Array2::from_shape_vec((3, 4), ys).unwrap();
        let combo = xm.mapv(|z| alpha * z) + ym.mapv(|z| beta * z);
        let u = Interval::unit();
        let sx = Cheb2::new(xm, u, u).unwrap();
        let sy = Cheb2::new(ym, u, u).unwrap();
        let sc = Cheb2::new(combo, u, u).unwrap();
        let lhs = eval2(&sc, x, y).unwrap();
        let rhs = alpha * eval2(&sx, x, y).unwrap() + beta * eval2(&sy, x, y).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    // Coefficients of f on [a, b] equal those of the pulled-back function on
    // [-1, 1]: the representation is interval-invariant.
    #[test]
    fn adaptive_coefficients_are_interval_invariant(a in -5.0f64..2.0, len in 0.5f64..6.0) {
        let iv = Interval::new(a, a + len).unwrap();
        let f = |x: f64| c((x.sin() + 0.5 * x).cos());
        let opts = AdaptiveOptions::default();
        let on_ab = interp1_adaptive(f, iv, &opts).unwrap();
        let pulled = interp1_adaptive(|t| f(iv.from_unit(t)), Interval::unit(), &opts).unwrap();
        let n = on_ab.len().max(pulled.len());
        for j in 0..n {
            let u = on_ab.coeffs().get(j).copied().unwrap_or(Complex64::ZERO);
            let v = pulled.coeffs().get(j).copied().unwrap_or(Complex64::ZERO);
            prop_assert!((u - v).norm() <= 1e-13);
        }
    }
}

// Unit coefficient vectors evaluate to cos(k * arccos(t)) everywhere.
#[test]
fn basis_polynomials_evaluate_exactly() {
    let iv = Interval::new(-0.5, 2.0).unwrap();
    for k in 0..=100usize {
        let mut coeffs = vec![Complex64::ZERO; k + 1];
        coeffs[k] = c(1.0);
        let f = Cheb1::new(coeffs, iv).unwrap();
        for p in 0..50 {
            let x = iv.a() + iv.length() * p as f64 / 49.0;
            let t = iv.to_unit(x).clamp(-1.0, 1.0);
            let exact = (k as f64 * t.acos()).cos();
            let got = clenshaw_eval(&f, x).unwrap();
            assert!(
                (got - c(exact)).norm() <= 1e-13,
                "k = {k}, x = {x}: {got} vs {exact}"
            );
        }
    }
}

#[test]
fn exponential_interpolant_matches_direct_evaluation() {
    let f = interp1_adaptive(
        |x| c(x.exp()),
        Interval::unit(),
        &AdaptiveOptions::default(),
    )
    .unwrap();
    let got = f.eval(0.3).unwrap();
    assert!((got - c(0.3f64.exp())).norm() <= 1e-14);
}

#[test]
fn points_interlace_between_refinement_levels() {
    // The descending grids nest: level m points appear among level 2m points.
    let coarse = cheb_points(9, Interval::unit());
    let fine = cheb_points(17, Interval::unit());
    for (k, &x) in coarse.iter().enumerate() {
        assert!((x - fine[2 * k]).abs() <= 1e-15);
    }
}
