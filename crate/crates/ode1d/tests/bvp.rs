//! End-to-end boundary-value solves: a convection-dominated interior-layer
//! problem, plus residual, constraint-satisfaction, and refinement
//! self-consistency checks on clean closed-form problems.

use cheb_core::{interp1_adaptive, AdaptiveOptions, Cheb1, Interval};
use num_complex::Complex64;
use ode1d::{solve_ode, Constraint, OdeProblem, SolveOptions};
use ultra_ops::{assemble_system, discretize_odo, to_range_basis, LinearODO};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn unit() -> Interval {
    Interval::unit()
}

/// eps u'' + x u' + sin(x) u = 0 with u(+-1) = 1: a sharp interior layer at
/// the turning point x = 0 whose width shrinks like sqrt(eps).
fn layer_problem(eps: f64) -> OdeProblem {
    let sin_x = interp1_adaptive(
        |x| Complex64::new(x.sin(), 0.0),
        unit(),
        &AdaptiveOptions::default(),
    )
    .unwrap();
    let operator = LinearODO::new(
        vec![
            (2, Cheb1::constant(c(eps), unit())),
            (1, Cheb1::new(vec![c(0.0), c(1.0)], unit()).unwrap()),
            (0, sin_x),
        ],
        unit(),
    )
    .unwrap();
    OdeProblem::new(
        operator,
        vec![Constraint::PointValue { x: -1.0 }, Constraint::PointValue { x: 1.0 }],
        vec![c(1.0), c(1.0)],
        Cheb1::constant(Complex64::ZERO, unit()),
    )
    .unwrap()
}

fn harmonic_problem() -> OdeProblem {
    OdeProblem::new(
        LinearODO::with_constant_coeffs(vec![(2, c(1.0)), (0, c(1.0))], unit()).unwrap(),
        vec![Constraint::PointValue { x: -1.0 }, Constraint::PointValue { x: 1.0 }],
        vec![c((-1.0f64).sin()), c(1.0f64.sin())],
        Cheb1::constant(Complex64::ZERO, unit()),
    )
    .unwrap()
}

#[test]
fn interior_layer_solve_hits_the_boundary_data() {
    let p = layer_problem(1e-3);
    let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
    assert!(sol.u.len() > 64, "a 1e-3 layer needs a substantial expansion");
    for x in [-1.0, 1.0] {
        let err = (sol.u.eval(x).unwrap() - c(1.0)).norm();
        assert!(err <= 1e-10, "boundary error {err:.2e} at x = {x}");
    }
    assert!(sol.diagnostics.residual <= 1e-12);
}

#[test]
fn residual_survives_a_double_sized_discretization() {
    let tol = 1e-14;
    for p in [harmonic_problem(), layer_problem(1e-3)] {
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        let m2 = 2 * sol.diagnostics.final_n;
        let order = p.operator().order();

        let l = discretize_odo(p.operator(), m2).unwrap();
        let mut rows = ndarray::Array2::zeros((p.constraints().len(), m2));
        for (i, cons) in p.constraints().iter().enumerate() {
            for (j, v) in cons.row(m2, unit()).into_iter().enumerate() {
                rows[[i, j]] = v;
            }
        }
        let b = ultra_ops::BoundaryRows::new(rows);
        let mut f = p.rhs().coeffs().to_vec();
        f.resize(m2, Complex64::ZERO);
        let f = to_range_basis(&f, order);
        let (m, rhs) = assemble_system(&l, &b, p.values(), &f).unwrap();

        let mut u = sol.u.coeffs().to_vec();
        u.resize(m2, Complex64::ZERO);
        let lu = m.matvec(&u);
        let defect = lu.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let row_sum = (0..m2)
            .map(|i| (0..m2).map(|j| m.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let u_max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rhs_max = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rel = defect / (row_sum * u_max + rhs_max);
        assert!(rel <= 100.0 * tol, "doubled-grid relative residual {rel:.2e}");
    }
}

#[test]
fn functionals_match_their_prescribed_values() {
    let tol = 1e-14;
    for p in [harmonic_problem(), layer_problem(1e-3)] {
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        let sup: f64 = (0..=200)
            .map(|k| sol.u.eval(-1.0 + k as f64 / 100.0).unwrap().norm())
            .fold(0.0, f64::max);
        for (cons, want) in p.constraints().iter().zip(p.values()) {
            let got = cons.apply(&sol.u);
            assert!(
                (got - want).norm() <= 10.0 * tol * sup.max(1.0),
                "constraint defect {:.2e}",
                (got - want).norm()
            );
        }
    }
}

#[test]
fn refinement_leaves_leading_coefficients_fixed() {
    let p = harmonic_problem();
    let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
    let next_n = 2 * (sol.diagnostics.final_n - 1) + 1;
    let finer = solve_ode(&p, &SolveOptions { start_n: next_n, ..SolveOptions::default() }).unwrap();
    let maxc = sol.u.max_coeff();
    for j in 0..sol.u.len().min(finer.u.len()) {
        let diff = (sol.u.coeffs()[j] - finer.u.coeffs()[j]).norm();
        assert!(diff <= 1e-13 * maxc.max(1.0), "coefficient {j} moved by {diff:.2e}");
    }
}

#[test]
fn robin_style_derivative_constraints_are_honored() {
    // u'' = 0 with u'(-1) = 2 and u(1) = 3: the line u = 2x + 1.
    let p = OdeProblem::new(
        LinearODO::with_constant_coeffs(vec![(2, c(1.0))], unit()).unwrap(),
        vec![
            Constraint::PointDerivative { x: -1.0, order: 1 },
            Constraint::PointValue { x: 1.0 },
        ],
        vec![c(2.0), c(3.0)],
        Cheb1::constant(Complex64::ZERO, unit()),
    )
    .unwrap();
    let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
    assert!((sol.u.eval(0.0).unwrap() - c(1.0)).norm() < 1e-12);
    assert!((sol.u.eval(0.5).unwrap() - c(2.0)).norm() < 1e-12);
}

#[test]
fn variable_coefficient_problem_matches_manufactured_solution() {
    // (2 + x) u' - u = (2 + x) cos(x) - sin(x), u(-1) = sin(-1): u = sin(x).
    let rhs = interp1_adaptive(
        |x| Complex64::new((2.0 + x) * x.cos() - x.sin(), 0.0),
        unit(),
        &AdaptiveOptions::default(),
    )
    .unwrap();
    let p = OdeProblem::new(
        LinearODO::new(
            vec![
                (1, Cheb1::new(vec![c(2.0), c(1.0)], unit()).unwrap()),
                (0, Cheb1::constant(c(-1.0), unit())),
            ],
            unit(),
        )
        .unwrap(),
        vec![Constraint::PointValue { x: -1.0 }],
        vec![c((-1.0f64).sin())],
        rhs,
    )
    .unwrap();
    let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
    for k in 0..=20 {
        let x = -1.0 + k as f64 / 10.0;
        assert!((sol.u.eval(x).unwrap() - c(x.sin())).norm() < 1e-13);
    }
}
