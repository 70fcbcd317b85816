//! The adaptive solve loop: discretize, constrain, solve, and test the
//! coefficient tail, doubling the grid until the solution is resolved.

use cheb_core::{tail_resolved, Cheb1};
use num_complex::Complex64;
use ultra_ops::{
    almost_banded_solve, assemble_system, discretize_odo, to_range_basis, AlmostBanded,
    UltraError,
};

use crate::error::OdeError;
use crate::problem::{OdeProblem, SolveOptions};

/// What the adaptive loop settled on.
#[derive(Debug, Clone)]
pub struct OdeDiagnostics {
    /// Discretization size at which the tail test passed.
    pub final_n: usize,
    /// Normwise relative residual of the final linear solve.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub u: Cheb1,
    pub diagnostics: OdeDiagnostics,
}

/// The right-hand side's leading n coefficients in the operator's range
/// basis. The conversion is applied to the full (zero-padded) coefficient
/// vector, so every retained entry is exact.
fn range_rhs(rhs: &Cheb1, order: usize, n: usize) -> Vec<Complex64> {
    let p = n.max(rhs.len());
    let mut f = rhs.coeffs().to_vec();
    f.resize(p, Complex64::ZERO);
    let mut converted = to_range_basis(&f, order);
    converted.truncate(n);
    converted
}

/// Assembles the square constrained system at size n.
fn build_system(
    p: &OdeProblem,
    n: usize,
) -> Result<(AlmostBanded, Vec<Complex64>), UltraError> {
    let order = p.operator().order();
    let l = discretize_odo(p.operator(), n)?;
    let b = p.boundary_rows(n);
    let f = range_rhs(p.rhs(), order, n);
    assemble_system(&l, &b, p.values(), &f)
}

/// Normwise relative residual of M u = rhs: the infinity-norm defect over
/// `max-row-sum(M) * max|u| + max|rhs|`.
fn relative_residual(m: &AlmostBanded, u: &[Complex64], rhs: &[Complex64]) -> f64 {
    let n = m.n();
    let mu = m.matvec(u);
    let defect = mu.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let row_sum = (0..n)
        .map(|i| {
            (0..n).map(|j| m.get(i, j).norm()).sum::<f64>()
        })
        .fold(0.0, f64::max);
    let u_max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rhs_max = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let denom = row_sum * u_max + rhs_max;
    if denom == 0.0 {
        defect
    } else {
        defect / denom
    }
}

/// Drops the longest trailing run whose summed magnitude stays under half
/// the tail tolerance, so trimming perturbs any point value of the solution
/// by less than tol times its coefficient scale.
fn trim_tail_sum(mut coeffs: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let maxc = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let budget = 0.5 * tol * maxc;
    let mut keep = 0;
    let mut acc = 0.0;
    for j in (0..coeffs.len()).rev() {
        acc += coeffs[j].norm();
        if acc > budget {
            keep = j + 1;
            break;
        }
    }
    coeffs.truncate(keep.max(1));
    coeffs
}

pub fn solve_ode(p: &OdeProblem, opts: &SolveOptions) -> Result<OdeSolution, OdeError> {
    let k = p.constraints().len();
    let mut n = opts.start_n.max(3);
    loop {
        if n - 1 > opts.max_degree {
            return Err(OdeError::Unresolved { cap: opts.max_degree });
        }
        if k >= n {
            n = 2 * (n - 1) + 1;
            continue;
        }
        let (m, rhs) = build_system(p, n)?;
        let u = match almost_banded_solve(&m, &rhs) {
            Ok(u) => u,
            Err(UltraError::SingularSystem { column }) => {
                return Err(OdeError::IllPosed { n, column })
            }
            Err(e) => return Err(e.into()),
        };
        if tail_resolved(&u, opts.tol) {
            let residual = relative_residual(&m, &u, &rhs);
            let trimmed = trim_tail_sum(u, opts.tol);
            let u = Cheb1::new(trimmed, p.operator().interval())
                .expect("trim keeps at least one coefficient");
            return Ok(OdeSolution { u, diagnostics: OdeDiagnostics { final_n: n, residual } });
        }
        n = 2 * (n - 1) + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Constraint;
    use cheb_core::Interval;
    use ultra_ops::LinearODO;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn unit() -> Interval {
        Interval::unit()
    }

    fn constant_op(terms: Vec<(usize, f64)>) -> LinearODO {
        LinearODO::with_constant_coeffs(
            terms.into_iter().map(|(d, v)| (d, c(v))),
            unit(),
        )
        .unwrap()
    }

    #[test]
    fn constant_solution_from_first_order_problem() {
        // u' = 0, u(-1) = 1.
        let p = OdeProblem::new(
            constant_op(vec![(1, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }],
            vec![c(1.0)],
            Cheb1::constant(Complex64::ZERO, unit()),
        )
        .unwrap();
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        assert!((sol.u.coeffs()[0] - c(1.0)).norm() < 1e-13);
        assert_eq!(sol.u.len(), 1);
        assert_eq!(sol.diagnostics.final_n, 17);
    }

    #[test]
    fn linear_solution_from_second_order_problem() {
        // u'' = 0, u(-1) = -1, u(1) = 1 is u = x.
        let p = OdeProblem::new(
            constant_op(vec![(2, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }, Constraint::PointValue { x: 1.0 }],
            vec![c(-1.0), c(1.0)],
            Cheb1::constant(Complex64::ZERO, unit()),
        )
        .unwrap();
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        assert!((sol.u.coeffs()[1] - c(1.0)).norm() < 1e-13);
        for (j, z) in sol.u.coeffs().iter().enumerate() {
            if j != 1 {
                assert!(z.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn exponential_decay_resolves_to_closed_form() {
        // u' + u = 0, u(-1) = e is u = exp(-x); check u(0) = 1.
        let p = OdeProblem::new(
            constant_op(vec![(1, 1.0), (0, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }],
            vec![c(1.0f64.exp())],
            Cheb1::constant(Complex64::ZERO, unit()),
        )
        .unwrap();
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        assert!((sol.u.eval(0.0).unwrap() - c(1.0)).norm() < 1e-13);
        assert!((sol.u.eval(1.0).unwrap() - c((-1.0f64).exp())).norm() < 1e-13);
    }

    #[test]
    fn raw_coefficient_row_pins_a_mode() {
        // u' = 1 with the constant mode pinned to 2: u = x + 2.
        let p = OdeProblem::new(
            constant_op(vec![(1, 1.0)]),
            vec![Constraint::CoefficientRow(vec![c(1.0)])],
            vec![c(2.0)],
            Cheb1::constant(c(1.0), unit()),
        )
        .unwrap();
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        assert!((sol.u.eval(0.5).unwrap() - c(2.5)).norm() < 1e-13);
    }

    #[test]
    fn point_functional_imposes_a_robin_condition() {
        // u'' = 0, u(-1) = 0 and u(1)/5 + u'(1) = 1.4: the line u = x + 1.
        let p = OdeProblem::new(
            constant_op(vec![(2, 1.0)]),
            vec![
                Constraint::PointValue { x: -1.0 },
                Constraint::PointFunctional { x: 1.0, terms: vec![(0, c(0.2)), (1, c(1.0))] },
            ],
            vec![c(0.0), c(1.4)],
            Cheb1::constant(c(0.0), unit()),
        )
        .unwrap();
        let sol = solve_ode(&p, &SolveOptions::default()).unwrap();
        assert!((sol.u.eval(0.25).unwrap() - c(1.25)).norm() < 1e-13);
        assert!((sol.u.eval(-1.0).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn missing_constraint_is_reported_ill_posed() {
        // u'' = 0 with a single boundary value leaves a one-parameter family.
        let p = OdeProblem::new(
            constant_op(vec![(2, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }],
            vec![c(0.0)],
            Cheb1::constant(Complex64::ZERO, unit()),
        )
        .unwrap();
        assert!(matches!(
            solve_ode(&p, &SolveOptions::default()),
            Err(OdeError::IllPosed { .. })
        ));
    }

    #[test]
    fn over_constrained_problem_is_reported_ill_posed() {
        // u' = 0 with two boundary values: the square system has two
        // coefficient columns supported on the same two rows.
        let p = OdeProblem::new(
            constant_op(vec![(1, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }, Constraint::PointValue { x: 1.0 }],
            vec![c(1.0), c(1.0)],
            Cheb1::constant(Complex64::ZERO, unit()),
        )
        .unwrap();
        assert!(matches!(
            solve_ode(&p, &SolveOptions::default()),
            Err(OdeError::IllPosed { .. })
        ));
    }

    #[test]
    fn degree_cap_surfaces_as_unresolved() {
        // Oscillation far beyond an 8-degree cap.
        let rhs = cheb_core::interp1_adaptive(
            |x| Complex64::new((40.0 * x).sin(), 0.0),
            unit(),
            &cheb_core::AdaptiveOptions::default(),
        )
        .unwrap();
        let p = OdeProblem::new(
            constant_op(vec![(1, 1.0)]),
            vec![Constraint::PointValue { x: -1.0 }],
            vec![c(0.0)],
            rhs,
        )
        .unwrap();
        let opts = SolveOptions { max_degree: 8, ..SolveOptions::default() };
        assert!(matches!(solve_ode(&p, &opts), Err(OdeError::Unresolved { cap: 8 })));
    }
}
