//! Assembly of the discrete constrained matrix equation at a given grid
//! size: lifted operator pairs per separable term, the right-hand side in
//! the common range basis, and the boundary rows.

use cheb_core::Cheb2;
use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use pdo_frontend::BcSpec;
use separable::SeparableRep;
use sylvester::ConstrainedSylvester;
use ultra_ops::{conversion_chain, discretize_odo, BandedOp, LinearODO, UltraError};

use crate::bcrows::{discretize_bcs, BoundaryData};
use crate::error::PdeError;

/// Builds the constrained Sylvester system for a separable representation,
/// a right-hand side, and boundary conditions at size `n_y x n_x`.
///
/// Every term's factor operators are lifted into the common range bases
/// `C^(N_y)` and `C^(N_x)`, where `N_y`, `N_x` are the largest derivative
/// orders across terms; the right-hand side coefficients are converted into
/// the same bases. All truncations are computed on padded operators so the
/// assembled blocks agree exactly with the leading blocks of any larger
/// discretization.
pub fn build_system(
    rep: &SeparableRep,
    master: &Cheb2,
    bcs: &[BcSpec],
    nx: usize,
    ny: usize,
) -> Result<ConstrainedSylvester, PdeError> {
    let bd = discretize_bcs(bcs, nx, ny, rep.xinterval(), rep.yinterval())?;
    build_with_boundary(rep, master, bd, nx, ny)
}

pub(crate) fn build_with_boundary(
    rep: &SeparableRep,
    master: &Cheb2,
    bd: BoundaryData,
    nx: usize,
    ny: usize,
) -> Result<ConstrainedSylvester, PdeError> {
    let order_y = range_order_y(rep);
    let order_x = range_order_x(rep);
    let mut terms = Vec::with_capacity(rep.k());
    for term in rep.terms() {
        let a = lifted(&term.ode_y, order_y, ny).map_err(PdeError::Operator)?;
        let c = lifted(&term.ode_x, order_x, nx).map_err(PdeError::Operator)?;
        terms.push((a, c));
    }
    let f = range_rhs(master, order_y, order_x, ny, nx);
    ConstrainedSylvester::new(terms, f, bd.by, bd.bx, bd.h, bd.g)
        .map_err(|source| PdeError::SolverAt { nx, ny, source })
}

pub(crate) fn range_order_y(rep: &SeparableRep) -> usize {
    rep.terms().iter().map(|t| t.ode_y.order()).max().unwrap_or(0)
}

pub(crate) fn range_order_x(rep: &SeparableRep) -> usize {
    rep.terms().iter().map(|t| t.ode_x.order()).max().unwrap_or(0)
}

/// Discretizes one factor operator and lifts its range from `C^(order)` to
/// `C^(target)`. The padding keeps the truncation exact: the conversion
/// chain reaches `2(target - order)` columns to the right, so entries of
/// the product inside the leading `n x n` block only involve operator
/// entries below the padded size.
fn lifted(ode: &LinearODO, target: usize, n: usize) -> Result<BandedOp, UltraError> {
    let order = ode.order();
    if order == target {
        return discretize_odo(ode, n);
    }
    let p = n + 2 * (target - order);
    let op = discretize_odo(ode, p)?;
    Ok(conversion_chain(order, target, p).mul(&op).principal(n))
}

/// Converts right-hand-side Chebyshev coefficients into the
/// `C^(N_y) (x) C^(N_x)` range bases and truncates to `ny x nx`.
fn range_rhs(
    master: &Cheb2,
    order_y: usize,
    order_x: usize,
    ny: usize,
    nx: usize,
) -> Array2<Complex64> {
    let py = ny + 2 * order_y;
    let px = nx + 2 * order_x;
    let m = master.coeffs();
    let mut padded = Array2::zeros((py, px));
    let ry = m.nrows().min(py);
    let rx = m.ncols().min(px);
    padded.slice_mut(s![..ry, ..rx]).assign(&m.slice(s![..ry, ..rx]));
    if order_y > 0 {
        let sy = conversion_chain(0, order_y, py);
        for j in 0..px {
            let col = padded.column(j).to_vec();
            padded.column_mut(j).assign(&Array1::from(sy.matvec(&col)));
        }
    }
    if order_x > 0 {
        let sx = conversion_chain(0, order_x, px);
        for i in 0..py {
            let row = padded.row(i).to_vec();
            padded.row_mut(i).assign(&Array1::from(sx.matvec(&row)));
        }
    }
    padded.slice(s![..ny, ..nx]).to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cheb_core::{interp2_adaptive, AdaptiveOptions, Interval};
    use pdo_frontend::{extract_coeffs, parse_pdo};
    use separable::splitting_rank;

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn laplace_rep() -> SeparableRep {
        let expr = parse_pdo("laplacian(u)").unwrap();
        let c = extract_coeffs(&expr, unit(), unit(), 1e-14).unwrap();
        splitting_rank(&c, 1e-12).unwrap()
    }

    fn zero_rhs() -> Cheb2 {
        Cheb2::constant(Complex64::ZERO, unit(), unit())
    }

    fn dense(op: &BandedOp) -> Array2<Complex64> {
        let n = op.n();
        Array2::from_shape_fn((n, n), |(i, j)| op.get(i, j))
    }

    fn apply(sys: &ConstrainedSylvester, x: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros((x.nrows(), x.ncols()));
        for (a, c) in sys.terms() {
            out = out + dense(a).dot(x).dot(&dense(c).t());
        }
        out
    }

    #[test]
    fn laplacian_annihilates_the_bilinear_mode() {
        let rep = laplace_rep();
        let sys = build_system(&rep, &zero_rhs(), &[], 8, 8).unwrap();
        let mut x = Array2::zeros((8, 8));
        x[[1, 1]] = Complex64::new(1.0, 0.0);
        let residual = apply(&sys, &x);
        let max = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max < 1e-14, "Laplacian of xy should vanish, got {max}");
    }

    #[test]
    fn laplacian_of_the_second_chebyshev_mode_is_the_constant_four() {
        let rep = laplace_rep();
        let sys = build_system(&rep, &zero_rhs(), &[], 8, 8).unwrap();
        let mut x = Array2::zeros((8, 8));
        x[[0, 2]] = Complex64::new(1.0, 0.0);
        let image = apply(&sys, &x);
        assert!((image[[0, 0]] - Complex64::new(4.0, 0.0)).norm() < 1e-13);
        let off = image
            .indexed_iter()
            .filter(|((i, j), _)| !(*i == 0 && *j == 0))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-13, "image should be a single entry, off-max {off}");
    }

    #[test]
    fn zero_right_hand_side_gives_a_zero_load_matrix() {
        let rep = laplace_rep();
        let sys = build_system(&rep, &zero_rhs(), &[], 9, 7).unwrap();
        assert_eq!(sys.f().shape(), &[7, 9]);
        assert!(sys.f().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn load_matrix_matches_a_dense_conversion_of_the_coefficients() {
        let opts = AdaptiveOptions::default();
        let master =
            interp2_adaptive(|x, y| Complex64::new((x + 2.0 * y).sin(), 0.0), unit(), unit(), &opts)
                .unwrap();
        let rep = laplace_rep();
        let (ny, nx) = (10, 12);
        let sys = build_system(&rep, &master, &[], nx, ny).unwrap();

        let (py, px) = (ny + 4, nx + 4);
        let mut padded = Array2::<Complex64>::zeros((py, px));
        let m = master.coeffs();
        padded
            .slice_mut(s![..m.nrows().min(py), ..m.ncols().min(px)])
            .assign(&m.slice(s![..m.nrows().min(py), ..m.ncols().min(px)]));
        let sy = dense(&conversion_chain(0, 2, py));
        let sx = dense(&conversion_chain(0, 2, px));
        let expected = sy.dot(&padded).dot(&sx.t());
        let diff = (&expected.slice(s![..ny, ..nx]) - sys.f())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14, "load conversion mismatch {diff}");
    }

    #[test]
    fn larger_assemblies_extend_smaller_ones_exactly() {
        let expr = parse_pdo("diff(u,y,2) + (2+x)*diff(u,x,1) + u").unwrap();
        let c = extract_coeffs(&expr, unit(), unit(), 1e-14).unwrap();
        let rep = splitting_rank(&c, 1e-12).unwrap();
        let opts = AdaptiveOptions::default();
        let master = interp2_adaptive(
            |x, y| Complex64::new((3.0 * x * y).cos(), 0.0),
            unit(),
            unit(),
            &opts,
        )
        .unwrap();
        let small = build_system(&rep, &master, &[], 9, 9).unwrap();
        let large = build_system(&rep, &master, &[], 17, 17).unwrap();
        for ((sa, sc), (la, lc)) in small.terms().iter().zip(large.terms()) {
            let da = dense(&la.principal(9)) - dense(sa);
            let dc = dense(&lc.principal(9)) - dense(sc);
            assert!(da.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
            assert!(dc.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
        }
        let df = (&large.f().slice(s![..9, ..9]) - small.f())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(df < 1e-14, "load truncation mismatch {df}");
    }

    #[test]
    fn boundary_rows_flow_into_the_system_blocks() {
        let rep = laplace_rep();
        let bcs: Vec<BcSpec> = ["left", "right", "down", "up"]
            .iter()
            .zip([
                pdo_frontend::Edge::Left,
                pdo_frontend::Edge::Right,
                pdo_frontend::Edge::Down,
                pdo_frontend::Edge::Up,
            ])
            .map(|(_, edge)| BcSpec {
                edge,
                kind: pdo_frontend::BcKind::Dirichlet,
                data: parse_pdo("0").unwrap(),
            })
            .collect();
        let sys = build_system(&rep, &zero_rhs(), &bcs, 8, 8).unwrap();
        assert_eq!(sys.bx().shape(), &[2, 8]);
        assert_eq!(sys.by().shape(), &[2, 8]);
        assert_eq!(sys.g().shape(), &[2, 8]);
        assert_eq!(sys.h().shape(), &[2, 8]);
    }
}
