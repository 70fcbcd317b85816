//! Almost-banded matrices (banded plus a block of dense top rows) and a
//! Givens-rotation QR solver that runs in O(n (bandwidth + k)^2) time.

use ndarray::Array2;
use num_complex::Complex64;

use crate::banded::BandedOp;
use crate::error::UltraError;

/// Relative threshold below which a diagonal entry of R is declared zero.
const SINGULAR_TOL: f64 = 1e-13;

/// A square matrix whose first `k` rows are dense and whose remaining rows
/// are banded. The banded part must be zero in the rows the border occupies,
/// so the full matrix is the plain sum of the two parts.
#[derive(Debug, Clone)]
pub struct AlmostBanded {
    band: BandedOp,
    border: Array2<Complex64>,
}

impl AlmostBanded {
    pub fn new(band: BandedOp, border: Array2<Complex64>) -> Result<Self, UltraError> {
        let n = band.n();
        let k = border.nrows();
        if border.ncols() != n || k > n {
            return Err(UltraError::SizeMismatch { expected: n, got: border.ncols().max(k) });
        }
        for i in 0..k {
            for j in i.saturating_sub(band.lower())..(i + band.upper() + 1).min(n) {
                if band.get(i, j) != Complex64::ZERO {
                    return Err(UltraError::InvalidStructure {
                        detail: format!("banded part has a nonzero entry at ({i}, {j}) inside the dense border"),
                    });
                }
            }
        }
        Ok(Self { band, border })
    }

    pub fn n(&self) -> usize {
        self.band.n()
    }

    /// Number of dense border rows.
    pub fn border_rows(&self) -> usize {
        self.border.nrows()
    }

    pub fn band(&self) -> &BandedOp {
        &self.band
    }

    pub fn border(&self) -> &Array2<Complex64> {
        &self.border
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i < self.border.nrows() {
            self.border[[i, j]]
        } else {
            self.band.get(i, j)
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = self.band.matvec(x);
        for (i, row) in self.border.rows().into_iter().enumerate() {
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let n = self.n();
        let mut a = self.band.to_dense();
        for i in 0..self.border.nrows() {
            for j in 0..n {
                a[[i, j]] = self.border[[i, j]];
            }
        }
        a
    }
}

#[derive(Debug)]
struct Rotation {
    /// Acts on the row pair (row - 1, row).
    row: usize,
    c: f64,
    s: Complex64,
}

/// QR factorization of an almost-banded matrix, retained so one assembly can
/// serve many right-hand sides.
///
/// The matrix is kept as `W + U V` where `W` is banded working storage and
/// `U V` carries the dense border (`U` starts as the top identity block,
/// `V` as the border rows). Rotations act on `W` and `U` together, so the
/// border never has to be expanded into the band. Column `j` is cleared
/// bottom-up with rotations of adjacent rows down to
/// `max(j + lower, k - 1)`, which covers both the band profile and the rows
/// the border can have spread into; the working band therefore needs widths
/// `lw = max(lower, k - 1)` below and `lw + upper` above.
#[derive(Debug)]
pub struct AlmostBandedQr {
    n: usize,
    k: usize,
    lw: usize,
    uw: usize,
    w: Vec<Complex64>,
    u: Array2<Complex64>,
    v: Array2<Complex64>,
    rotations: Vec<Rotation>,
    diag: Vec<Complex64>,
}

impl AlmostBandedQr {
    pub fn factor(m: &AlmostBanded) -> Result<Self, UltraError> {
        let n = m.n();
        let k = m.border_rows();
        let l = m.band().lower();
        let u_width = m.band().upper();
        let lw = l.max(k.saturating_sub(1)).min(n.saturating_sub(1));
        let uw = (u_width + lw).min(n.saturating_sub(1));
        let width = lw + uw + 1;

        let mut w = vec![Complex64::ZERO; n * width];
        for i in 0..n {
            for j in i.saturating_sub(l)..(i + u_width + 1).min(n) {
                w[i * width + (j + lw - i)] = m.band().get(i, j);
            }
        }
        let mut u = Array2::zeros((n, k));
        for i in 0..k {
            u[[i, i]] = Complex64::new(1.0, 0.0);
        }
        let v = m.border().clone();

        let mut qr = Self { n, k, lw, uw, w, u, v, rotations: Vec::new(), diag: Vec::new() };
        for j in 0..n {
            let hi = (j + l).max(k.saturating_sub(1)).min(n - 1);
            for i in ((j + 1)..=hi).rev() {
                qr.eliminate(i, j);
            }
        }

        qr.diag = (0..n).map(|i| qr.full_entry(i, i)).collect();
        let max_diag = qr.diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(column) =
            qr.diag.iter().position(|z| z.norm() <= SINGULAR_TOL * max_diag)
        {
            return Err(UltraError::SingularSystem { column });
        }
        Ok(qr)
    }

    fn width(&self) -> usize {
        self.lw + self.uw + 1
    }

    fn w_entry(&self, i: usize, j: usize) -> Complex64 {
        if j + self.lw >= i && j <= i + self.uw {
            self.w[i * self.width() + (j + self.lw - i)]
        } else {
            Complex64::ZERO
        }
    }

    fn full_entry(&self, i: usize, j: usize) -> Complex64 {
        let border: Complex64 = (0..self.k).map(|r| self.u[[i, r]] * self.v[[r, j]]).sum();
        self.w_entry(i, j) + border
    }

    /// Rotate rows (i - 1, i) to zero the full-matrix entry (i, j).
    fn eliminate(&mut self, i: usize, j: usize) {
        let a = self.full_entry(i - 1, j);
        let b = self.full_entry(i, j);
        let nb = b.norm();
        if nb == 0.0 {
            return;
        }
        let na = a.norm();
        let r = na.hypot(nb);
        let (c, s) = if na == 0.0 {
            (0.0, b.conj() / nb)
        } else {
            (na / r, (a / na) * b.conj() / r)
        };

        // Both rows are zero left of column j (those entries were already
        // eliminated) and right of column (i - 1) + uw (the fill bound), so
        // this window covers every nonzero they hold.
        let width = self.width();
        let col_hi = (i - 1 + self.uw).min(self.n - 1);
        for col in j..=col_hi {
            let top = self.w[(i - 1) * width + (col + self.lw - (i - 1))];
            let bot = self.w[i * width + (col + self.lw - i)];
            self.w[(i - 1) * width + (col + self.lw - (i - 1))] = c * top + s * bot;
            self.w[i * width + (col + self.lw - i)] = -s.conj() * top + c * bot;
        }
        for r_col in 0..self.k {
            let top = self.u[[i - 1, r_col]];
            let bot = self.u[[i, r_col]];
            self.u[[i - 1, r_col]] = c * top + s * bot;
            self.u[[i, r_col]] = -s.conj() * top + c * bot;
        }
        self.rotations.push(Rotation { row: i, c, s });
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>, UltraError> {
        if rhs.len() != self.n {
            return Err(UltraError::SizeMismatch { expected: self.n, got: rhs.len() });
        }
        let mut b = rhs.to_vec();
        for rot in &self.rotations {
            let top = b[rot.row - 1];
            let bot = b[rot.row];
            b[rot.row - 1] = rot.c * top + rot.s * bot;
            b[rot.row] = -rot.s.conj() * top + rot.c * bot;
        }

        let mut x = vec![Complex64::ZERO; self.n];
        // suffix[r] accumulates sum_{c > i} V[r, c] x[c] as i descends.
        let mut suffix = vec![Complex64::ZERO; self.k];
        for i in (0..self.n).rev() {
            let mut acc = b[i];
            for col in (i + 1)..=(i + self.uw).min(self.n - 1) {
                acc -= self.w_entry(i, col) * x[col];
            }
            for r in 0..self.k {
                acc -= self.u[[i, r]] * suffix[r];
            }
            x[i] = acc / self.diag[i];
            for r in 0..self.k {
                suffix[r] += self.v[[r, i]] * x[i];
            }
        }
        Ok(x)
    }
}

/// Factor and solve in one call.
pub fn almost_banded_solve(m: &AlmostBanded, rhs: &[Complex64]) -> Result<Vec<Complex64>, UltraError> {
    AlmostBandedQr::factor(m)?.solve(rhs)
}
