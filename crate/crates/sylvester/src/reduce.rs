//! Constrained generalized Sylvester systems: canonicalization of the
//! constraint rows, compatibility checking, and elimination of the
//! constrained degrees of freedom.
//!
//! The system is `sum_j A_j X C_j^T = F` subject to `B_y X = H` and
//! `X B_x^T = G^T`. Canonicalization permutes columns of `B_y`/`B_x` (and
//! the matching matrix indices) and rescales rows so each `B` starts with an
//! exact identity block; elimination then substitutes the constraints,
//! producing an equivalent unconstrained equation in the trailing
//! `(n_y - K_y) x (n_x - K_x)` block of the unknown.

use ndarray::{s, Array2};
use num_complex::Complex64;
use ultra_ops::{AlmostBanded, BandedOp};

use crate::dense::{lu_solve, max_abs};
use crate::error::SylError;

/// Relative threshold below which a residual constraint column counts as
/// dependent on the already-pivoted ones.
const RANK_TOL: f64 = 1e-12;

/// Structural zeros produced by elimination must hold to this relative level.
const STRUCTURAL_TOL: f64 = 1e-13;

/// A generalized Sylvester equation with boundary-row constraints.
#[derive(Debug, Clone)]
pub struct ConstrainedSylvester {
    terms: Vec<(BandedOp, BandedOp)>,
    f: Array2<Complex64>,
    by: Array2<Complex64>,
    bx: Array2<Complex64>,
    h: Array2<Complex64>,
    g: Array2<Complex64>,
}

impl ConstrainedSylvester {
    /// Validates dimensions: each term is `(A_j: n_y x n_y, C_j: n_x x n_x)`,
    /// `F` is `n_y x n_x`, `B_y: K_y x n_y`, `B_x: K_x x n_x`,
    /// `H: K_y x n_x`, `G: K_x x n_y`, with `K_y < n_y` and `K_x < n_x`.
    pub fn new(
        terms: Vec<(BandedOp, BandedOp)>,
        f: Array2<Complex64>,
        by: Array2<Complex64>,
        bx: Array2<Complex64>,
        h: Array2<Complex64>,
        g: Array2<Complex64>,
    ) -> Result<Self, SylError> {
        if terms.is_empty() {
            return Err(SylError::InvalidDimensions { detail: "no operator terms".into() });
        }
        let ny = f.nrows();
        let nx = f.ncols();
        for (j, (a, c)) in terms.iter().enumerate() {
            if a.n() != ny || c.n() != nx {
                return Err(SylError::InvalidDimensions {
                    detail: format!(
                        "term {j}: A is {}x{}, C is {}x{}, F is {ny}x{nx}",
                        a.n(),
                        a.n(),
                        c.n(),
                        c.n()
                    ),
                });
            }
        }
        let ky = by.nrows();
        let kx = bx.nrows();
        if by.ncols() != ny || bx.ncols() != nx {
            return Err(SylError::InvalidDimensions {
                detail: "constraint rows have the wrong length".into(),
            });
        }
        if h.dim() != (ky, nx) || g.dim() != (kx, ny) {
            return Err(SylError::InvalidDimensions {
                detail: "constraint data has the wrong shape".into(),
            });
        }
        if ky >= ny || kx >= nx {
            return Err(SylError::InvalidDimensions {
                detail: format!("constraints ({ky}, {kx}) leave no unknowns in ({ny}, {nx})"),
            });
        }
        Ok(Self { terms, f, by, bx, h, g })
    }

    pub fn ny(&self) -> usize {
        self.f.nrows()
    }

    pub fn nx(&self) -> usize {
        self.f.ncols()
    }

    pub fn ky(&self) -> usize {
        self.by.nrows()
    }

    pub fn kx(&self) -> usize {
        self.bx.nrows()
    }

    pub fn terms(&self) -> &[(BandedOp, BandedOp)] {
        &self.terms
    }

    pub fn f(&self) -> &Array2<Complex64> {
        &self.f
    }

    pub fn by(&self) -> &Array2<Complex64> {
        &self.by
    }

    pub fn bx(&self) -> &Array2<Complex64> {
        &self.bx
    }

    pub fn h(&self) -> &Array2<Complex64> {
        &self.h
    }

    pub fn g(&self) -> &Array2<Complex64> {
        &self.g
    }
}

/// A canonicalized system plus the column permutations that produced it
/// (`perm[i]` is the original index shown at position `i`).
#[derive(Debug, Clone)]
pub struct Canonical {
    pub system: ConstrainedSylvester,
    pub perm_y: Vec<usize>,
    pub perm_x: Vec<usize>,
}

/// Greedy column-pivoted selection of a well-conditioned principal block:
/// each step takes the earliest remaining column whose residual norm is
/// within a factor of the largest, so well-posed leading blocks produce the
/// identity permutation (preserving band structure downstream).
fn pivot_perm(b: &Array2<Complex64>) -> Result<Vec<usize>, SylError> {
    let k = b.nrows();
    let n = b.ncols();
    if k == 0 {
        return Ok((0..n).collect());
    }
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|c| b.column(c).to_vec()).collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = cols.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(SylError::DependentConstraints);
    }
    let mut picked = vec![false; n];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = 0.0f64;
        for (c, col) in cols.iter().enumerate() {
            if !picked[c] {
                best = best.max(norm(col));
            }
        }
        if best <= RANK_TOL * scale {
            return Err(SylError::DependentConstraints);
        }
        let c_star = (0..n)
            .find(|&c| !picked[c] && norm(&cols[c]) >= 0.5 * best)
            .expect("a column attains the maximum");
        picked[c_star] = true;
        let q: Vec<Complex64> = {
            let nq = norm(&cols[c_star]);
            cols[c_star].iter().map(|&z| z / nq).collect()
        };
        chosen.push(c_star);
        for c in 0..n {
            if picked[c] {
                continue;
            }
            let inner: Complex64 =
                q.iter().zip(&cols[c]).map(|(&qi, &vi)| qi.conj() * vi).sum();
            for (vi, &qi) in cols[c].iter_mut().zip(&q) {
                *vi -= inner * qi;
            }
        }
    }
    chosen.sort_unstable();
    let mut perm = chosen.clone();
    perm.extend((0..n).filter(|c| !picked[*c]));
    Ok(perm)
}

fn permute_cols_dense(m: &Array2<Complex64>, perm: &[usize]) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), perm.len()), |(r, c)| m[(r, perm[c])])
}

/// Applies a column permutation to a banded operator, recomputing the band
/// profile. The identity permutation is a cheap clone.
fn permute_banded_cols(op: &BandedOp, perm: &[usize]) -> BandedOp {
    let n = op.n();
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return op.clone();
    }
    let (l, u) = (op.lower(), op.upper());
    let mut lo = 0usize;
    let mut up = 0usize;
    for (c, &o) in perm.iter().enumerate() {
        let rmin = o.saturating_sub(u);
        let rmax = (o + l).min(n - 1);
        lo = lo.max(rmax.saturating_sub(c));
        up = up.max(c.saturating_sub(rmin));
    }
    let mut out = BandedOp::zeros(n, lo, up);
    for (c, &o) in perm.iter().enumerate() {
        let rmin = o.saturating_sub(u);
        let rmax = (o + l).min(n - 1);
        for r in rmin..=rmax {
            let v = op.get(r, o);
            if v != Complex64::ZERO {
                out.set(r, c, v);
            }
        }
    }
    out
}

/// Brings both constraint blocks to exact-identity principal form, applying
/// the same column permutations to the operator terms and the data.
pub fn canonicalize(sys: &ConstrainedSylvester) -> Result<Canonical, SylError> {
    let perm_y = pivot_perm(sys.by())?;
    let perm_x = pivot_perm(sys.bx())?;
    let (ky, kx) = (sys.ky(), sys.kx());

    let transform = |b: &Array2<Complex64>,
                     data: &Array2<Complex64>,
                     perm: &[usize],
                     data_perm: &[usize],
                     k: usize|
     -> Result<(Array2<Complex64>, Array2<Complex64>), SylError> {
        if k == 0 {
            return Ok((b.clone(), data.clone()));
        }
        let bp = permute_cols_dense(b, perm);
        let bhat = bp.slice(s![.., ..k]).to_owned();
        let mut b_can = lu_solve(&bhat, &bp)?;
        for r in 0..k {
            for c in 0..k {
                b_can[(r, c)] = if r == c { Complex64::new(1.0, 0.0) } else { Complex64::ZERO };
            }
        }
        let dp = permute_cols_dense(data, data_perm);
        let d_can = lu_solve(&bhat, &dp)?;
        Ok((b_can, d_can))
    };

    let (by_c, h_c) = transform(sys.by(), sys.h(), &perm_y, &perm_x, ky)?;
    let (bx_c, g_c) = transform(sys.bx(), sys.g(), &perm_x, &perm_y, kx)?;

    let terms = sys
        .terms()
        .iter()
        .map(|(a, c)| (permute_banded_cols(a, &perm_y), permute_banded_cols(c, &perm_x)))
        .collect();

    let system = ConstrainedSylvester::new(terms, sys.f().clone(), by_c, bx_c, h_c, g_c)?;
    Ok(Canonical { system, perm_y, perm_x })
}

/// Outcome of the corner-compatibility check `H B_x^T = B_y G^T`.
#[derive(Debug, Clone, Copy)]
pub struct CompatReport {
    pub defect: f64,
    pub pass: bool,
}

/// Default tolerance for the compatibility defect.
pub const COMPAT_TOL: f64 = 1e-10;

/// Measures how far the boundary data is from matching where the constraint
/// sets meet (the four corners, for edge constraints).
pub fn check_compatibility(sys: &ConstrainedSylvester, tol: f64) -> CompatReport {
    let left = sys.h().dot(&sys.bx().t());
    let right = sys.by().dot(&sys.g().t());
    let defect = max_abs(&(&left - &right));
    let scale = max_abs(sys.h()).max(max_abs(sys.g())).max(1.0);
    CompatReport { defect, pass: defect <= tol * scale }
}

/// The eliminated equation plus everything needed to undo the elimination.
#[derive(Debug, Clone)]
pub struct ReducedSylvester {
    terms: Vec<(AlmostBanded, AlmostBanded)>,
    f: Array2<Complex64>,
    by2: Array2<Complex64>,
    bx2: Array2<Complex64>,
    h1: Array2<Complex64>,
    h2: Array2<Complex64>,
    g1: Array2<Complex64>,
    g2: Array2<Complex64>,
    perm_y: Vec<usize>,
    perm_x: Vec<usize>,
    ky: usize,
    kx: usize,
}

impl ReducedSylvester {
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(AlmostBanded, AlmostBanded)] {
        &self.terms
    }

    pub fn f(&self) -> &Array2<Complex64> {
        &self.f
    }

    pub fn ny_reduced(&self) -> usize {
        self.f.nrows()
    }

    pub fn nx_reduced(&self) -> usize {
        self.f.ncols()
    }

    pub(crate) fn recovery_blocks(
        &self,
    ) -> (
        &Array2<Complex64>,
        &Array2<Complex64>,
        &Array2<Complex64>,
        &Array2<Complex64>,
        &Array2<Complex64>,
        &Array2<Complex64>,
    ) {
        (&self.by2, &self.bx2, &self.h1, &self.h2, &self.g1, &self.g2)
    }

    pub(crate) fn perms(&self) -> (&[usize], &[usize]) {
        (&self.perm_y, &self.perm_x)
    }

    pub(crate) fn corner_sizes(&self) -> (usize, usize) {
        (self.ky, self.kx)
    }
}

/// Substitutes the canonical constraints into one operator factor:
/// `op - op[:, :k] B` restricted to the surviving rows and columns, stored
/// as a banded matrix with a dense top border.
fn reduce_operator(
    op: &BandedOp,
    b: &Array2<Complex64>,
    k: usize,
) -> Result<AlmostBanded, SylError> {
    let n = op.n();
    let np = n - k;
    // The canonical identity block must cancel the leading columns exactly.
    let mut scale = 0.0f64;
    let mut defect = 0.0f64;
    for r in 0..n {
        for c in 0..k.min(n) {
            let mut v = op.get(r, c);
            scale = scale.max(v.norm());
            for m in 0..k {
                v -= op.get(r, m) * b[(m, c)];
            }
            defect = defect.max(v.norm());
        }
    }
    if defect > STRUCTURAL_TOL * scale.max(1.0) {
        return Err(SylError::InternalInconsistency {
            detail: format!("eliminated columns are not structurally zero (defect {defect:e})"),
        });
    }

    let border_rows = (k + op.lower()).min(np);
    let mut band = BandedOp::zeros(np, (op.lower() + k).min(np.saturating_sub(1)), op.upper());
    for r in border_rows..np {
        let c_lo = (r.saturating_sub(op.lower())).max(k);
        let c_hi = (r + op.upper()).min(n - 1);
        for c in c_lo..=c_hi {
            if c < k {
                continue;
            }
            let v = op.get(r, c);
            if v != Complex64::ZERO {
                band.set(r, c - k, v);
            }
        }
    }
    let mut border = Array2::<Complex64>::zeros((border_rows, np));
    for r in 0..border_rows {
        for cp in 0..np {
            let c = cp + k;
            let mut v = op.get(r, c);
            for m in 0..k {
                let factor = op.get(r, m);
                if factor != Complex64::ZERO {
                    v -= factor * b[(m, c)];
                }
            }
            border[(r, cp)] = v;
        }
    }
    Ok(AlmostBanded::new(band, border)?)
}

/// Eliminates the constrained rows and columns of the unknown from a
/// canonical system.
pub fn eliminate(canonical: &Canonical) -> Result<ReducedSylvester, SylError> {
    let sys = &canonical.system;
    let (ny, nx, ky, kx) = (sys.ny(), sys.nx(), sys.ky(), sys.kx());
    let (nyp, nxp) = (ny - ky, nx - kx);

    let mut terms = Vec::with_capacity(sys.terms().len());
    for (a, c) in sys.terms() {
        terms.push((reduce_operator(a, sys.by(), ky)?, reduce_operator(c, sys.bx(), kx)?));
    }

    // F_tilde = F - sum_j A_j[:, :ky] H C_j^T - sum_j A~_j G^T C_j[:, :kx]^T.
    let mut ft = sys.f().clone();
    for (a, c) in sys.terms() {
        if ky > 0 {
            let touched = (ky + a.lower()).min(ny);
            for r in 0..touched {
                let mut w = vec![Complex64::ZERO; nx];
                let mut any = false;
                for m in 0..ky {
                    let arm = a.get(r, m);
                    if arm == Complex64::ZERO {
                        continue;
                    }
                    any = true;
                    for (q, wq) in w.iter_mut().enumerate() {
                        *wq += arm * sys.h()[(m, q)];
                    }
                }
                if !any {
                    continue;
                }
                for qp in 0..nx {
                    let lo = qp.saturating_sub(c.lower());
                    let hi = (qp + c.upper()).min(nx - 1);
                    let mut dot = Complex64::ZERO;
                    for (q, wq) in w.iter().enumerate().take(hi + 1).skip(lo) {
                        dot += *wq * c.get(qp, q);
                    }
                    ft[(r, qp)] -= dot;
                }
            }
        }
        if kx > 0 {
            // v = A~_j G^T, column by column through the banded action.
            let mut v = Array2::<Complex64>::zeros((ny, kx));
            for m in 0..kx {
                let gcol: Vec<Complex64> = (0..ny).map(|q| sys.g()[(m, q)]).collect();
                let y1 = a.matvec(&gcol);
                let mut y2 = vec![Complex64::ZERO; ky];
                for (p, y2p) in y2.iter_mut().enumerate() {
                    for (q, &gq) in gcol.iter().enumerate() {
                        *y2p += sys.by()[(p, q)] * gq;
                    }
                }
                for r in 0..ny {
                    let mut corr = Complex64::ZERO;
                    for (p, &y2p) in y2.iter().enumerate() {
                        let arp = a.get(r, p);
                        if arp != Complex64::ZERO {
                            corr += arp * y2p;
                        }
                    }
                    v[(r, m)] = y1[r] - corr;
                }
            }
            let touched_cols = (kx + c.lower()).min(nx);
            for qp in 0..touched_cols {
                for r in 0..ny {
                    let mut dot = Complex64::ZERO;
                    for m in 0..kx {
                        let cqm = c.get(qp, m);
                        if cqm != Complex64::ZERO {
                            dot += v[(r, m)] * cqm;
                        }
                    }
                    ft[(r, qp)] -= dot;
                }
            }
        }
    }

    Ok(ReducedSylvester {
        terms,
        f: ft.slice(s![..nyp, ..nxp]).to_owned(),
        by2: sys.by().slice(s![.., ky..]).to_owned(),
        bx2: sys.bx().slice(s![.., kx..]).to_owned(),
        h1: sys.h().slice(s![.., ..kx]).to_owned(),
        h2: sys.h().slice(s![.., kx..]).to_owned(),
        g1: sys.g().slice(s![.., ..ky]).to_owned(),
        g2: sys.g().slice(s![.., ky..]).to_owned(),
        perm_y: canonical.perm_y.clone(),
        perm_x: canonical.perm_x.clone(),
        ky,
        kx,
    })
}
