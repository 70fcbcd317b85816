//! Solution paths for the reduced generalized Sylvester equation and
//! recovery of the eliminated rows and columns.
//!
//! One term: two banded triangular solves. Two terms: generalized
//! Bartels-Stewart via a pair of QZ decompositions. Three or more terms:
//! a Kronecker-product almost-banded system in whichever variable ordering
//! is cheaper.

use ndarray::Array2;
use num_complex::Complex64;
use ultra_ops::{almost_banded_solve, AlmostBanded, AlmostBandedQr, BandedOp};

use crate::dense::max_abs;
use crate::error::SylError;
use crate::qz::qz;
use crate::reduce::{canonicalize, check_compatibility, eliminate, ReducedSylvester};
use crate::reduce::{ConstrainedSylvester, COMPAT_TOL};

/// Diagonal entries of the triangular column systems smaller than this
/// (relative to the column scale) signal a spectral collision.
const COLLISION_TOL: f64 = 1e-14;

/// The two recovery formulas for the corner block must agree to this level
/// relative to the solution magnitude.
const RECOVERY_TOL: f64 = 1e-10;

/// Stacking order for the Kronecker path: which variable owns the outer
/// (block) index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    XMajor,
    YMajor,
}

/// Which algorithm produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    K1,
    K2,
    Kron { orientation: Orientation },
}

/// Knobs for `solve_constrained`.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Tolerance for the corner-compatibility defect (relative).
    pub compat_tol: f64,
    /// Upper bound on the estimated working set of the Kronecker path.
    pub max_bytes: usize,
    /// Whether to compute residual diagnostics after solving.
    pub compute_residual: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { compat_tol: COMPAT_TOL, max_bytes: 3 << 30, compute_residual: true }
    }
}

/// Diagnostics attached to a solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    pub path: SolvePath,
    /// `max |sum_j A_j X C_j^T - F|` over the reduced rows and columns, when
    /// residuals were requested.
    pub equation_residual: Option<f64>,
    /// `max |B_y X - H|`.
    pub constraint_residual_y: Option<f64>,
    /// `max |X B_x^T - G^T|`.
    pub constraint_residual_x: Option<f64>,
    /// Corner-compatibility defect of the input data.
    pub compat_defect: f64,
}

/// A solved system: the full coefficient matrix plus diagnostics.
#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub x: Array2<Complex64>,
    pub report: SolveReport,
}

/// Single-term path: `A X C^T = F` via two sequences of almost-banded
/// solves (one per column of `F`, one per row of the intermediate).
pub fn solve_k1(reduced: &ReducedSylvester) -> Result<Array2<Complex64>, SylError> {
    assert_eq!(reduced.k(), 1, "solve_k1 requires exactly one term");
    let (a, c) = &reduced.terms()[0];
    let (ny, nx) = (reduced.ny_reduced(), reduced.nx_reduced());
    let qa = AlmostBandedQr::factor(a)?;
    let mut y = Array2::<Complex64>::zeros((ny, nx));
    for col in 0..nx {
        let rhs: Vec<Complex64> = (0..ny).map(|r| reduced.f()[(r, col)]).collect();
        let sol = qa.solve(&rhs)?;
        for (r, v) in sol.into_iter().enumerate() {
            y[(r, col)] = v;
        }
    }
    let qc = AlmostBandedQr::factor(c)?;
    let mut x = Array2::<Complex64>::zeros((ny, nx));
    for row in 0..ny {
        let rhs: Vec<Complex64> = (0..nx).map(|qix| y[(row, qix)]).collect();
        let sol = qc.solve(&rhs)?;
        for (qix, v) in sol.into_iter().enumerate() {
            x[(row, qix)] = v;
        }
    }
    Ok(x)
}

/// Two-term path: `A_1 X C_1^T + A_2 X C_2^T = F` by simultaneous
/// triangularization of the pencils `(A_1, A_2)` and `(C_2, C_1)`, then
/// column-by-column back-substitution.
pub fn solve_k2(reduced: &ReducedSylvester) -> Result<Array2<Complex64>, SylError> {
    assert_eq!(reduced.k(), 2, "solve_k2 requires exactly two terms");
    let a1 = reduced.terms()[0].0.to_dense();
    let a2 = reduced.terms()[1].0.to_dense();
    let c1 = reduced.terms()[0].1.to_dense();
    let c2 = reduced.terms()[1].1.to_dense();
    let (ny, nx) = (reduced.ny_reduced(), reduced.nx_reduced());

    let qza = qz(&a1, &a2)?;
    let (s1, s2) = (&qza.s, &qza.t);
    let qzc = qz(&c2, &c1)?;
    let (t2, t1) = (&qzc.s, &qzc.t);

    // Transformed right side: E = Q1^H F conj(Q2).
    let q1h = qza.q.t().mapv(|z| z.conj());
    let q2c = qzc.q.mapv(|z| z.conj());
    let e = q1h.dot(reduced.f()).dot(&q2c);

    let s1max = max_abs(s1);
    let s2max = max_abs(s2);
    let mut y = Array2::<Complex64>::zeros((ny, nx));
    for l in (0..nx).rev() {
        // rhs_l = E[:, l] - S1 sum_{m>l} T1[l,m] Y[:,m] - S2 (same with T2).
        let mut u = vec![Complex64::ZERO; ny];
        let mut v = vec![Complex64::ZERO; ny];
        for m in (l + 1)..nx {
            let (t1lm, t2lm) = (t1[(l, m)], t2[(l, m)]);
            if t1lm != Complex64::ZERO || t2lm != Complex64::ZERO {
                for i in 0..ny {
                    let yim = y[(i, m)];
                    u[i] += t1lm * yim;
                    v[i] += t2lm * yim;
                }
            }
        }
        let mut rhs = vec![Complex64::ZERO; ny];
        for i in 0..ny {
            let mut su = Complex64::ZERO;
            let mut sv = Complex64::ZERO;
            for j in i..ny {
                su += s1[(i, j)] * u[j];
                sv += s2[(i, j)] * v[j];
            }
            rhs[i] = e[(i, l)] - su - sv;
        }
        // M_l = T1[l,l] S1 + T2[l,l] S2 is upper triangular.
        let (d1, d2) = (t1[(l, l)], t2[(l, l)]);
        let scale = d1.norm() * s1max + d2.norm() * s2max;
        for i in (0..ny).rev() {
            let mut acc = rhs[i];
            for j in (i + 1)..ny {
                let mij = d1 * s1[(i, j)] + d2 * s2[(i, j)];
                acc -= mij * y[(j, l)];
            }
            let pivot = d1 * s1[(i, i)] + d2 * s2[(i, i)];
            if pivot.norm() < COLLISION_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(SylError::NonUniqueSolution);
            }
            y[(i, l)] = acc / pivot;
        }
    }
    // X = Z1 Y Z2^T (plain transpose).
    Ok(qza.z.dot(&y).dot(&qzc.z.t()))
}

struct KronLayout {
    lower: usize,
    upper: usize,
    border: usize,
    n: usize,
}

fn first_of(t: &(AlmostBanded, AlmostBanded)) -> &AlmostBanded {
    &t.0
}

fn second_of(t: &(AlmostBanded, AlmostBanded)) -> &AlmostBanded {
    &t.1
}

fn kron_layout(reduced: &ReducedSylvester, orientation: Orientation) -> KronLayout {
    type Pick = fn(&(AlmostBanded, AlmostBanded)) -> &AlmostBanded;
    let (outer_of, inner_of): (Pick, Pick) = match orientation {
        Orientation::XMajor => (first_of, second_of),
        Orientation::YMajor => (second_of, first_of),
    };
    let n_inner = inner_of(&reduced.terms()[0]).n();
    let n = outer_of(&reduced.terms()[0]).n() * n_inner;
    let mut lo = 0usize;
    let mut up = 0usize;
    let mut border_blocks = 0usize;
    for term in reduced.terms() {
        let o = outer_of(term);
        lo = lo.max(o.band().lower() + 1);
        up = up.max(o.band().upper() + 1);
        border_blocks = border_blocks.max(o.border_rows());
    }
    KronLayout {
        lower: (lo * n_inner).min(n.saturating_sub(1)),
        upper: (up * n_inner).min(n.saturating_sub(1)),
        border: border_blocks * n_inner,
        n,
    }
}

fn kron_bytes(layout: &KronLayout) -> u128 {
    let n = layout.n as u128;
    let width = (layout.lower + layout.upper + 1) as u128;
    let border = layout.border as u128;
    // Assembled matrix, its QR copy, and the rotation log.
    32 * n * width + 32 * border * n + 32 * n * (layout.lower as u128 + border)
}

/// Three-or-more-term path: stack the unknown into a vector and solve one
/// almost-banded system whose matrix is the sum of Kronecker products. The
/// cheaper of the two stacking orders is chosen, subject to a memory cap.
pub fn solve_kge3(
    reduced: &ReducedSylvester,
    max_bytes: usize,
) -> Result<(Array2<Complex64>, Orientation), SylError> {
    assert!(reduced.k() >= 1, "solve_kge3 requires at least one term");
    let (ny, nx) = (reduced.ny_reduced(), reduced.nx_reduced());
    if ny == 0 || nx == 0 {
        return Ok((Array2::zeros((ny, nx)), Orientation::XMajor));
    }
    // Banded-solve cost scales like n * bandwidth^2; bandwidth is the inner
    // dimension, so prefer the orientation with the smaller inner block.
    let cost = |inner: usize, outer: usize| (inner as u128).pow(3) * outer as u128;
    let orientation =
        if cost(nx, ny) <= cost(ny, nx) { Orientation::XMajor } else { Orientation::YMajor };
    let layout = kron_layout(reduced, orientation);
    let needed = kron_bytes(&layout);
    if needed > max_bytes as u128 {
        return Err(SylError::ResourceLimit {
            needed: needed.min(usize::MAX as u128) as usize,
            cap: max_bytes,
        });
    }

    let mut band = BandedOp::zeros(layout.n, layout.lower, layout.upper);
    let mut border = Array2::<Complex64>::zeros((layout.border, layout.n));
    let n_inner = match orientation {
        Orientation::XMajor => nx,
        Orientation::YMajor => ny,
    };
    let n_outer = layout.n / n_inner;
    for term in reduced.terms() {
        let (outer, inner) = match orientation {
            Orientation::XMajor => (&term.0, &term.1),
            Orientation::YMajor => (&term.1, &term.0),
        };
        for i in 0..n_outer {
            let p_range = if i < outer.border_rows() {
                0..n_outer
            } else {
                i.saturating_sub(outer.band().lower())..(i + outer.band().upper() + 1).min(n_outer)
            };
            for p in p_range {
                let oval = outer.get(i, p);
                if oval == Complex64::ZERO {
                    continue;
                }
                for j in 0..n_inner {
                    let q_range = if j < inner.border_rows() {
                        0..n_inner
                    } else {
                        j.saturating_sub(inner.band().lower())
                            ..(j + inner.band().upper() + 1).min(n_inner)
                    };
                    let row = i * n_inner + j;
                    for q in q_range {
                        let ival = inner.get(j, q);
                        if ival == Complex64::ZERO {
                            continue;
                        }
                        let col = p * n_inner + q;
                        let v = oval * ival;
                        if row < layout.border {
                            border[(row, col)] += v;
                        } else {
                            let cur = band.get(row, col);
                            band.set(row, col, cur + v);
                        }
                    }
                }
            }
        }
    }
    let m = AlmostBanded::new(band, border)?;
    let mut rhs = vec![Complex64::ZERO; layout.n];
    for i in 0..ny {
        for j in 0..nx {
            let row = match orientation {
                Orientation::XMajor => i * nx + j,
                Orientation::YMajor => j * ny + i,
            };
            rhs[row] = reduced.f()[(i, j)];
        }
    }
    let sol = almost_banded_solve(&m, &rhs)?;
    let mut x = Array2::<Complex64>::zeros((ny, nx));
    for i in 0..ny {
        for j in 0..nx {
            let row = match orientation {
                Orientation::XMajor => i * nx + j,
                Orientation::YMajor => j * ny + i,
            };
            x[(i, j)] = sol[row];
        }
    }
    Ok((x, orientation))
}

/// Reinstates the eliminated rows and columns around the reduced solution
/// and undoes the canonical permutations.
pub fn recover(
    reduced: &ReducedSylvester,
    x22: &Array2<Complex64>,
) -> Result<Array2<Complex64>, SylError> {
    let (by2, bx2, h1, h2, g1, g2) = reduced.recovery_blocks();
    let (ky, kx) = reduced.corner_sizes();
    let (nyp, nxp) = (reduced.ny_reduced(), reduced.nx_reduced());
    let (ny, nx) = (nyp + ky, nxp + kx);

    let x12 = h2 - &by2.dot(x22);
    let x21 = g2.t().to_owned() - x22.dot(&bx2.t());
    let x11_a = h1 - &by2.dot(&x21);
    let x11_b = g1.t().to_owned() - x12.dot(&bx2.t());
    let scale = max_abs(x22).max(max_abs(&x12)).max(max_abs(&x21)).max(max_abs(&x11_a)).max(1.0);
    let defect = max_abs(&(&x11_a - &x11_b));
    if defect > RECOVERY_TOL * scale {
        return Err(SylError::InternalInconsistency {
            detail: format!("corner recovery formulas disagree by {defect:e}"),
        });
    }

    let mut canonical = Array2::<Complex64>::zeros((ny, nx));
    for r in 0..ky {
        for c in 0..kx {
            canonical[(r, c)] = (x11_a[(r, c)] + x11_b[(r, c)]) * 0.5;
        }
        for c in 0..nxp {
            canonical[(r, kx + c)] = x12[(r, c)];
        }
    }
    for r in 0..nyp {
        for c in 0..kx {
            canonical[(ky + r, c)] = x21[(r, c)];
        }
        for c in 0..nxp {
            canonical[(ky + r, kx + c)] = x22[(r, c)];
        }
    }

    let (perm_y, perm_x) = reduced.perms();
    let mut x = Array2::<Complex64>::zeros((ny, nx));
    for i in 0..ny {
        for j in 0..nx {
            x[(perm_y[i], perm_x[j])] = canonical[(i, j)];
        }
    }
    Ok(x)
}

/// Residual of the operator equation over the rows and columns it actually
/// constrains: the leading `(n_y - K_y) x (n_x - K_x)` block.
fn banded_residual(sys: &ConstrainedSylvester, x: &Array2<Complex64>) -> f64 {
    let (ny, nx) = (sys.ny(), sys.nx());
    let (rows, cols) = (ny - sys.ky(), nx - sys.kx());
    let mut residual = sys.f().slice(ndarray::s![..rows, ..cols]).to_owned();
    for (a, c) in sys.terms() {
        // A X, column by column through the banded action.
        let mut ax = Array2::<Complex64>::zeros((ny, nx));
        for col in 0..nx {
            let v: Vec<Complex64> = (0..ny).map(|r| x[(r, col)]).collect();
            let av = a.matvec(&v);
            for (r, val) in av.into_iter().enumerate() {
                ax[(r, col)] = val;
            }
        }
        for r in 0..rows {
            for qp in 0..cols {
                let lo = qp.saturating_sub(c.lower());
                let hi = (qp + c.upper()).min(nx - 1);
                let mut dot = Complex64::ZERO;
                for q in lo..=hi {
                    dot += ax[(r, q)] * c.get(qp, q);
                }
                residual[(r, qp)] -= dot;
            }
        }
    }
    max_abs(&residual)
}

/// End-to-end solve: canonicalize, check compatibility, eliminate, pick the
/// path by the number of terms, recover, and attach diagnostics.
pub fn solve_constrained(
    sys: &ConstrainedSylvester,
    opts: &SolveOptions,
) -> Result<SylvesterSolution, SylError> {
    let compat = check_compatibility(sys, opts.compat_tol);
    if !compat.pass {
        return Err(SylError::IncompatibleData { defect: compat.defect });
    }
    let canonical = canonicalize(sys)?;
    let reduced = eliminate(&canonical)?;
    let (x22, path) = match reduced.k() {
        1 => (solve_k1(&reduced)?, SolvePath::K1),
        2 => (solve_k2(&reduced)?, SolvePath::K2),
        _ => {
            let (x, orientation) = solve_kge3(&reduced, opts.max_bytes)?;
            (x, SolvePath::Kron { orientation })
        }
    };
    let x = recover(&reduced, &x22)?;

    let report = if opts.compute_residual {
        let ry = max_abs(&(&sys.by().dot(&x) - sys.h()));
        let rx = max_abs(&(&x.dot(&sys.bx().t()) - &sys.g().t()));
        let eq = banded_residual(sys, &x);
        SolveReport {
            path,
            equation_residual: Some(eq),
            constraint_residual_y: Some(ry),
            constraint_residual_x: Some(rx),
            compat_defect: compat.defect,
        }
    } else {
        SolveReport {
            path,
            equation_residual: None,
            constraint_residual_y: None,
            constraint_residual_x: None,
            compat_defect: compat.defect,
        }
    };
    Ok(SylvesterSolution { x, report })
}
