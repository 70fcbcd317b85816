//! Boundary-condition discretization: each edge condition becomes one dense
//! functional row over the Chebyshev basis plus one coefficient row for its
//! data, grouped by the axis the edge constrains.

use cheb_core::{interp1_adaptive, AdaptiveOptions, Interval};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use pdo_frontend::{Axis, BcKind, BcSpec, Edge, PdoExpr};
use ultra_ops::BoundaryRows;

use crate::error::PdeError;

/// Relative threshold below which a constraint row counts as a combination
/// of the ones before it.
const DEPENDENCE_TOL: f64 = 1e-12;

/// Discretized boundary constraints for a coefficient matrix `X` (rows vary
/// the y-index): `B_y X = H` and `B_x X^T = G`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    /// `k_x x n_x` functionals in x; left-edge rows first, then right.
    pub bx: Array2<Complex64>,
    /// `k_x x n_y` data coefficients, one row per x-edge condition.
    pub g: Array2<Complex64>,
    /// `k_y x n_y` functionals in y; down-edge rows first, then up.
    pub by: Array2<Complex64>,
    /// `k_y x n_x` data coefficients, one row per y-edge condition.
    pub h: Array2<Complex64>,
}

impl BoundaryData {
    pub fn kx(&self) -> usize {
        self.bx.nrows()
    }

    pub fn ky(&self) -> usize {
        self.by.nrows()
    }
}

/// Builds the constraint rows and data rows for every edge condition.
///
/// Functional rows act on coefficient vectors of length `n_x` (x-edges) or
/// `n_y` (y-edges). A named `neumann` condition means the outward normal
/// derivative, so it carries a minus sign on the left and down edges; a
/// functional expression `diff(u)` means the plain derivative along the
/// normal axis. Data components are sampled along the edge and expanded to
/// machine precision, then truncated or zero-padded to the row length.
pub fn discretize_bcs(
    bcs: &[BcSpec],
    nx: usize,
    ny: usize,
    xinterval: Interval,
    yinterval: Interval,
) -> Result<BoundaryData, PdeError> {
    let mut x_rows: Vec<(Array1<Complex64>, Array1<Complex64>)> = Vec::new();
    let mut y_rows: Vec<(Array1<Complex64>, Array1<Complex64>)> = Vec::new();
    for min_side in [true, false] {
        for bc in bcs.iter().filter(|bc| bc.edge.is_min_side() == min_side) {
            let (n, len, interval, t_interval) = match bc.edge.normal_axis() {
                Axis::X => (nx, ny, xinterval, yinterval),
                Axis::Y => (ny, nx, yinterval, xinterval),
            };
            let endpoint = if min_side { interval.a() } else { interval.b() };
            let row = functional_row(bc, endpoint, n, interval, t_interval)?;
            let data = data_row(&bc.data, bc.edge, endpoint, t_interval, len)?;
            match bc.edge.normal_axis() {
                Axis::X => x_rows.push((row, data)),
                Axis::Y => y_rows.push((row, data)),
            }
        }
    }
    let (bx, g) = stack_rows(x_rows, nx, ny);
    let (by, h) = stack_rows(y_rows, ny, nx);
    check_independent(&bx)?;
    check_independent(&by)?;
    Ok(BoundaryData { bx, g, by, h })
}

fn functional_row(
    bc: &BcSpec,
    endpoint: f64,
    n: usize,
    interval: Interval,
    t_interval: Interval,
) -> Result<Array1<Complex64>, PdeError> {
    match &bc.kind {
        BcKind::Dirichlet => {
            Ok(BoundaryRows::point_value(endpoint, n, interval).rows().row(0).to_owned())
        }
        BcKind::Neumann => {
            let sign = if bc.edge.is_min_side() { -1.0 } else { 1.0 };
            let block = BoundaryRows::point_derivative(endpoint, 1, n, interval);
            Ok(block.rows().row(0).mapv(|z| z * sign))
        }
        BcKind::Functional(_) => {
            let mut row = Array1::zeros(n);
            for (d, coeff) in bc.functional_terms()? {
                let c = edge_coefficient(&coeff, bc.edge, endpoint, t_interval)?;
                let block = BoundaryRows::point_derivative(endpoint, d, n, interval);
                row.zip_mut_with(&block.rows().row(0), |r, b| *r += c * b);
            }
            Ok(row)
        }
    }
}

/// Evaluates a functional coefficient on the edge. The normal coordinate is
/// fixed there, so the value must not change along the edge; two distinct
/// tangential probes detect a forbidden dependence.
fn edge_coefficient(
    coeff: &PdoExpr,
    edge: Edge,
    endpoint: f64,
    t_interval: Interval,
) -> Result<Complex64, PdeError> {
    if let Some(c) = coeff.const_value() {
        return Ok(c);
    }
    let t1 = t_interval.a() + 0.311 * t_interval.length();
    let t2 = t_interval.a() + 0.737 * t_interval.length();
    let (v1, v2) = match edge.normal_axis() {
        Axis::X => (coeff.eval_scalar(endpoint, t1)?, coeff.eval_scalar(endpoint, t2)?),
        Axis::Y => (coeff.eval_scalar(t1, endpoint)?, coeff.eval_scalar(t2, endpoint)?),
    };
    if (v1 - v2).norm() > 1e-10 * (1.0 + v1.norm().max(v2.norm())) {
        return Err(PdeError::InvalidProblem {
            detail: format!("a functional coefficient varies along the {:?} edge", edge),
        });
    }
    Ok(v1)
}

/// Expands the edge data in the tangential variable and returns its first
/// `len` Chebyshev coefficients.
fn data_row(
    data: &PdoExpr,
    edge: Edge,
    endpoint: f64,
    t_interval: Interval,
    len: usize,
) -> Result<Array1<Complex64>, PdeError> {
    let mut row = Array1::zeros(len);
    if let Some(c) = data.const_value() {
        row[0] = c;
        return Ok(row);
    }
    let probe = t_interval.a() + 0.5 * t_interval.length();
    match edge.normal_axis() {
        Axis::X => data.eval_scalar(endpoint, probe)?,
        Axis::Y => data.eval_scalar(probe, endpoint)?,
    };
    let opts = AdaptiveOptions::default();
    let series = match edge.normal_axis() {
        Axis::X => interp1_adaptive(
            |y| data.eval_scalar(endpoint, y).expect("probed scalar data"),
            t_interval,
            &opts,
        )?,
        Axis::Y => interp1_adaptive(
            |x| data.eval_scalar(x, endpoint).expect("probed scalar data"),
            t_interval,
            &opts,
        )?,
    };
    for (slot, &c) in row.iter_mut().zip(series.coeffs()) {
        *slot = c;
    }
    Ok(row)
}

fn stack_rows(
    rows: Vec<(Array1<Complex64>, Array1<Complex64>)>,
    n: usize,
    len: usize,
) -> (Array2<Complex64>, Array2<Complex64>) {
    let k = rows.len();
    let mut b = Array2::zeros((k, n));
    let mut d = Array2::zeros((k, len));
    for (i, (row, data)) in rows.into_iter().enumerate() {
        b.row_mut(i).assign(&row);
        d.row_mut(i).assign(&data);
    }
    (b, d)
}

/// Rejects constraint blocks whose rows are numerically dependent, via
/// modified Gram-Schmidt with reorthogonalization.
fn check_independent(rows: &Array2<Complex64>) -> Result<(), PdeError> {
    let mut basis: Vec<Array1<Complex64>> = Vec::new();
    for i in 0..rows.nrows() {
        let mut v = rows.row(i).to_owned();
        let original = norm(&v);
        if original == 0.0 {
            return Err(PdeError::DependentConstraints);
        }
        for _ in 0..2 {
            for u in &basis {
                let proj: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.zip_mut_with(u, |vi, ui| *vi -= proj * ui);
            }
        }
        let remaining = norm(&v);
        if remaining <= DEPENDENCE_TOL * original {
            return Err(PdeError::DependentConstraints);
        }
        basis.push(v.mapv(|z| z / remaining));
    }
    Ok(())
}

fn norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdo_frontend::parse_pdo;

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn spec(edge: Edge, kind: BcKind, data: &str) -> BcSpec {
        BcSpec { edge, kind, data: parse_pdo(data).unwrap() }
    }

    fn re_row(row: ndarray::ArrayView1<'_, Complex64>) -> Vec<f64> {
        row.iter().map(|z| z.re).collect()
    }

    #[test]
    fn dirichlet_rows_show_the_alternating_sign_pattern() {
        let bcs = vec![
            spec(Edge::Left, BcKind::Dirichlet, "0"),
            spec(Edge::Right, BcKind::Dirichlet, "0"),
        ];
        let bd = discretize_bcs(&bcs, 5, 4, unit(), unit()).unwrap();
        assert_eq!(re_row(bd.bx.row(0)), vec![1.0, -1.0, 1.0, -1.0, 1.0]);
        assert_eq!(re_row(bd.bx.row(1)), vec![1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(bd.g.shape(), &[2, 4]);
        assert!(bd.g.iter().all(|z| z.norm() == 0.0));
        assert_eq!(bd.by.shape(), &[0, 4]);
    }

    #[test]
    fn neumann_rows_are_outward_derivatives() {
        let bcs = vec![
            spec(Edge::Left, BcKind::Neumann, "0"),
            spec(Edge::Right, BcKind::Neumann, "0"),
        ];
        let bd = discretize_bcs(&bcs, 4, 3, unit(), unit()).unwrap();
        assert_eq!(re_row(bd.bx.row(0)), vec![0.0, -1.0, 4.0, -9.0]);
        assert_eq!(re_row(bd.bx.row(1)), vec![0.0, 1.0, 4.0, 9.0]);
    }

    #[test]
    fn down_and_up_edges_fill_the_y_block_in_order() {
        let bcs = vec![
            spec(Edge::Up, BcKind::Dirichlet, "0"),
            spec(Edge::Down, BcKind::Dirichlet, "0"),
        ];
        let bd = discretize_bcs(&bcs, 3, 4, unit(), unit()).unwrap();
        assert_eq!(re_row(bd.by.row(0)), vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(re_row(bd.by.row(1)), vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(bd.h.shape(), &[2, 3]);
        assert_eq!(bd.bx.shape(), &[0, 3]);
    }

    #[test]
    fn robin_functional_combines_value_and_plain_derivative_rows() {
        let expr = parse_pdo("u/5 + diff(u)").unwrap();
        let bcs = vec![spec(Edge::Right, BcKind::Functional(expr), "0")];
        let bd = discretize_bcs(&bcs, 4, 3, unit(), unit()).unwrap();
        assert_eq!(re_row(bd.bx.row(0)), vec![0.2, 1.2, 4.2, 9.2]);
    }

    #[test]
    fn functional_diff_on_the_left_edge_keeps_the_plain_sign() {
        let expr = parse_pdo("diff(u)").unwrap();
        let bcs = vec![spec(Edge::Left, BcKind::Functional(expr), "0")];
        let bd = discretize_bcs(&bcs, 4, 3, unit(), unit()).unwrap();
        assert_eq!(re_row(bd.bx.row(0)), vec![0.0, 1.0, -4.0, 9.0]);
    }

    #[test]
    fn data_rows_hold_chebyshev_coefficients_of_the_edge_trace() {
        let bcs = vec![spec(Edge::Left, BcKind::Dirichlet, "y^2")];
        let bd = discretize_bcs(&bcs, 3, 6, unit(), unit()).unwrap();
        let g = re_row(bd.g.row(0));
        assert!((g[0] - 0.5).abs() < 1e-14);
        assert!(g[1].abs() < 1e-14);
        assert!((g[2] - 0.5).abs() < 1e-14);
        assert!(g[3].abs() < 1e-14 && g[4].abs() < 1e-14 && g[5].abs() < 1e-14);
    }

    #[test]
    fn derivative_rows_pick_up_the_interval_scale() {
        let interval = Interval::new(0.0, 4.0).unwrap();
        let bcs = vec![spec(Edge::Right, BcKind::Neumann, "0")];
        let bd = discretize_bcs(&bcs, 4, 3, interval, unit()).unwrap();
        assert_eq!(re_row(bd.bx.row(0)), vec![0.0, 0.5, 2.0, 4.5]);
    }

    #[test]
    fn duplicate_conditions_on_one_edge_are_rejected() {
        let bcs = vec![
            spec(Edge::Left, BcKind::Dirichlet, "0"),
            spec(Edge::Left, BcKind::Dirichlet, "1"),
        ];
        let err = discretize_bcs(&bcs, 5, 5, unit(), unit()).unwrap_err();
        assert!(matches!(err, PdeError::DependentConstraints));
    }

    #[test]
    fn tangentially_varying_functional_coefficients_are_rejected() {
        let expr = parse_pdo("y*diff(u)").unwrap();
        let bcs = vec![spec(Edge::Right, BcKind::Functional(expr), "0")];
        let err = discretize_bcs(&bcs, 5, 5, unit(), unit()).unwrap_err();
        assert!(matches!(err, PdeError::InvalidProblem { .. }));
    }

    #[test]
    fn normal_coordinate_coefficients_are_rejected_by_the_frontend_contract() {
        let expr = parse_pdo("x*diff(u)").unwrap();
        let bcs = vec![spec(Edge::Right, BcKind::Functional(expr), "0")];
        let err = discretize_bcs(&bcs, 4, 3, unit(), unit()).unwrap_err();
        assert!(matches!(err, PdeError::Frontend(_)));
    }
}
