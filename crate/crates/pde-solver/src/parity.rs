//! Even/odd mode decoupling. For constant-coefficient operators whose
//! derivative orders in a variable are all even, and whose two opposite
//! edges in that variable carry one Dirichlet or one Neumann condition
//! each, the modes of that parity close under the equation: the operator
//! factors only connect coefficients two apart, and the half-sum and
//! half-difference of the edge rows constrain one lattice each. Splitting
//! turns one solve into 2 or 4 on half-size lattices.

use ndarray::Array2;
use num_complex::Complex64;
use pdo_frontend::{Axis, BcKind, BcSpec, CoeffArray, Edge};
use sylvester::ConstrainedSylvester;
use ultra_ops::BandedOp;

use crate::error::PdeError;
use crate::problem::ParityMode;

/// Which variables are split. A split variable contributes the factor two;
/// both split means four subproblems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ParityPlan {
    pub split_x: bool,
    pub split_y: bool,
}

/// One subproblem's lattice offsets: `Some(0)` even modes, `Some(1)` odd
/// modes, `None` for an unsplit variable. Order is (y, x).
pub(crate) type Combo = (Option<usize>, Option<usize>);

impl ParityPlan {
    pub fn none() -> Self {
        Self { split_x: false, split_y: false }
    }

    pub fn combos(&self) -> Vec<Combo> {
        let ys: &[Option<usize>] = if self.split_y { &[Some(0), Some(1)] } else { &[None] };
        let xs: &[Option<usize>] = if self.split_x { &[Some(0), Some(1)] } else { &[None] };
        ys.iter().flat_map(|&sy| xs.iter().map(move |&sx| (sy, sx))).collect()
    }

    pub fn count(&self) -> usize {
        (1 + self.split_x as usize) * (1 + self.split_y as usize)
    }
}

/// Decides which variables decouple: constant coefficients, even derivative
/// orders in the variable, and exactly one Dirichlet or one Neumann
/// condition on each of its two edges, both of the same kind.
pub(crate) fn parity_plan(operator: &CoeffArray, bcs: &[BcSpec], mode: ParityMode) -> ParityPlan {
    if mode == ParityMode::Off || !constant_coefficients(operator) {
        return ParityPlan::none();
    }
    ParityPlan {
        split_x: orders_all_even(operator, Axis::X)
            && pure_edge_pair(bcs, Edge::Left, Edge::Right),
        split_y: orders_all_even(operator, Axis::Y)
            && pure_edge_pair(bcs, Edge::Down, Edge::Up),
    }
}

fn constant_coefficients(operator: &CoeffArray) -> bool {
    operator.iter().all(|(_, c)| c.ny() == 1 && c.nx() == 1)
}

fn orders_all_even(operator: &CoeffArray, axis: Axis) -> bool {
    operator.iter().all(|((i, j), _)| {
        let order = match axis {
            Axis::X => j,
            Axis::Y => i,
        };
        order % 2 == 0
    })
}

fn pure_edge_pair(bcs: &[BcSpec], min_edge: Edge, max_edge: Edge) -> bool {
    let mins: Vec<_> = bcs.iter().filter(|b| b.edge == min_edge).collect();
    let maxs: Vec<_> = bcs.iter().filter(|b| b.edge == max_edge).collect();
    if mins.len() != 1 || maxs.len() != 1 {
        return false;
    }
    let pure = |k: &BcKind| matches!(k, BcKind::Dirichlet | BcKind::Neumann);
    pure(&mins[0].kind) && mins[0].kind == maxs[0].kind
}

/// Indices of one parity lattice (all indices when the variable is unsplit).
fn lattice(n: usize, s: Option<usize>) -> Vec<usize> {
    match s {
        None => (0..n).collect(),
        Some(s) => (s..n).step_by(2).collect(),
    }
}

/// Restricts the full system to one parity subproblem.
pub(crate) fn slice_system(
    full: &ConstrainedSylvester,
    sy: Option<usize>,
    sx: Option<usize>,
) -> Result<ConstrainedSylvester, PdeError> {
    let terms = full
        .terms()
        .iter()
        .map(|(a, c)| (maybe_slice_banded(a, sy), maybe_slice_banded(c, sx)))
        .collect();
    let f = slice_matrix(full.f(), sy, sx);
    let (by, h) = slice_constraints(full.by(), full.h(), sy, sx);
    let (bx, g) = slice_constraints(full.bx(), full.g(), sx, sy);
    let (my, mx) = (lattice(full.ny(), sy).len(), lattice(full.nx(), sx).len());
    ConstrainedSylvester::new(terms, f, by, bx, h, g)
        .map_err(|source| PdeError::SolverAt { nx: mx, ny: my, source })
}

/// Writes one subproblem's solution back onto its lattice of the full grid.
pub(crate) fn place_sub(
    x_full: &mut Array2<Complex64>,
    x_sub: &Array2<Complex64>,
    sy: Option<usize>,
    sx: Option<usize>,
) {
    let rows = lattice(x_full.nrows(), sy);
    let cols = lattice(x_full.ncols(), sx);
    for (p, &i) in rows.iter().enumerate() {
        for (q, &j) in cols.iter().enumerate() {
            x_full[[i, j]] = x_sub[[p, q]];
        }
    }
}

fn maybe_slice_banded(op: &BandedOp, s: Option<usize>) -> BandedOp {
    match s {
        None => op.clone(),
        Some(s) => slice_banded(op, s),
    }
}

/// Restriction of a parity-preserving operator to one mode lattice. The
/// eligibility test guarantees entries at odd offsets vanish, so the band
/// halves exactly.
fn slice_banded(op: &BandedOp, s: usize) -> BandedOp {
    let n = op.n();
    debug_assert!(odd_offsets_vanish(op), "operator couples lattices of opposite parity");
    let m = lattice(n, Some(s)).len();
    let (lower, upper) = (op.lower() / 2, op.upper() / 2);
    let mut out = BandedOp::zeros(m, lower, upper);
    for p in 0..m {
        let i = 2 * p + s;
        for q in p.saturating_sub(lower)..=(p + upper).min(m.saturating_sub(1)) {
            out.set(p, q, op.get(i, 2 * q + s));
        }
    }
    out
}

fn odd_offsets_vanish(op: &BandedOp) -> bool {
    let n = op.n();
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(op.lower())..=(i + op.upper()).min(n - 1) {
            let v = op.get(i, j).norm();
            scale = scale.max(v);
            if (i + j) % 2 == 1 {
                worst = worst.max(v);
            }
        }
    }
    worst <= 1e-12 * scale.max(1.0)
}

fn slice_matrix(
    f: &Array2<Complex64>,
    sy: Option<usize>,
    sx: Option<usize>,
) -> Array2<Complex64> {
    if sy.is_none() && sx.is_none() {
        return f.clone();
    }
    let rows = lattice(f.nrows(), sy);
    let cols = lattice(f.ncols(), sx);
    Array2::from_shape_fn((rows.len(), cols.len()), |(p, q)| f[[rows[p], cols[q]]])
}

/// Combines a split variable's two edge rows into the one row that
/// constrains each lattice, and restricts the data to the other variable's
/// lattice. For both Dirichlet and outward Neumann pairs the min-side row
/// equals the max-side row with alternating signs, so the half-sum lives on
/// the even modes and the half-difference on the odd modes; the data
/// combine with the same weights.
fn slice_constraints(
    b: &Array2<Complex64>,
    data: &Array2<Complex64>,
    s_own: Option<usize>,
    s_other: Option<usize>,
) -> (Array2<Complex64>, Array2<Complex64>) {
    let (b_rows, data_rows) = match s_own {
        None => (b.clone(), data.clone()),
        Some(s) => {
            assert_eq!(b.nrows(), 2, "a split variable has exactly two edge conditions");
            let half = Complex64::new(0.5, 0.0);
            let (combine_b, combine_d): (Vec<Complex64>, Vec<Complex64>) = if s == 0 {
                (
                    (0..b.ncols()).map(|j| (b[[0, j]] + b[[1, j]]) * half).collect(),
                    (0..data.ncols()).map(|j| (data[[0, j]] + data[[1, j]]) * half).collect(),
                )
            } else {
                (
                    (0..b.ncols()).map(|j| (b[[1, j]] - b[[0, j]]) * half).collect(),
                    (0..data.ncols()).map(|j| (data[[1, j]] - data[[0, j]]) * half).collect(),
                )
            };
            let cols = lattice(b.ncols(), Some(s));
            let mut br = Array2::zeros((1, cols.len()));
            for (q, &j) in cols.iter().enumerate() {
                br[[0, q]] = combine_b[j];
            }
            let mut dr = Array2::zeros((1, data.ncols()));
            for j in 0..data.ncols() {
                dr[[0, j]] = combine_d[j];
            }
            (br, dr)
        }
    };
    let cols = lattice(data_rows.ncols(), s_other);
    let data_out =
        Array2::from_shape_fn((data_rows.nrows(), cols.len()), |(r, q)| data_rows[[r, cols[q]]]);
    (b_rows, data_out)
}
