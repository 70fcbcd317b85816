//! Banded matrix storage and arithmetic for the spectral operators.

use ndarray::Array2;
use num_complex::Complex64;

/// A square banded matrix stored diagonal-major: diagonal `d = j - i`
/// (`-lower <= d <= upper`) is a length-`n` slab indexed by column.
/// Entries outside the band are structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOp {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<Complex64>,
}

impl BandedOp {
    /// All-zero matrix with the given band profile (clamped to `n - 1`).
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let lower = lower.min(n.saturating_sub(1));
        let upper = upper.min(n.saturating_sub(1));
        Self {
            n,
            lower,
            upper,
            data: vec![Complex64::ZERO; (lower + upper + 1) * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for j in 0..n {
            m.data[j] = Complex64::ONE;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let d = j as isize - i as isize;
        if d < -(self.lower as isize) || d > self.upper as isize {
            return None;
        }
        Some((d + self.lower as isize) as usize * self.n + j)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.n && j < self.n);
        self.slot(i, j).map_or(Complex64::ZERO, |s| self.data[s])
    }

    /// Writes inside the band; panics on a structurally zero position.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = value;
    }

    /// `y = A x` in O(n * bandwidth).
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y = vec![Complex64::ZERO; self.n];
        for (yi, y_val) in y.iter_mut().enumerate() {
            let j_lo = yi.saturating_sub(self.lower);
            let j_hi = (yi + self.upper).min(self.n - 1);
            let mut acc = Complex64::ZERO;
            for j in j_lo..=j_hi {
                let d = (j + self.lower - yi) * self.n;
                acc += self.data[d + j] * x[j];
            }
            *y_val = acc;
        }
        y
    }

    /// Banded product; bandwidths add (clamped to `n - 1`).
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "banded product requires equal sizes");
        let mut out = Self::zeros(
            self.n,
            self.lower + rhs.lower,
            self.upper + rhs.upper,
        );
        for i in 0..self.n {
            let k_lo = i.saturating_sub(self.lower);
            let k_hi = (i + self.upper).min(self.n - 1);
            for k in k_lo..=k_hi {
                let a = self.data[(k + self.lower - i) * self.n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let j_lo = k.saturating_sub(rhs.lower);
                let j_hi = (k + rhs.upper).min(self.n - 1);
                for j in j_lo..=j_hi {
                    let b = rhs.data[(j + rhs.lower - k) * self.n + j];
                    if b == Complex64::ZERO {
                        continue;
                    }
                    let s = out.slot(i, j).expect("product outside band");
                    out.data[s] += a * b;
                }
            }
        }
        out
    }

    /// Sum; band profile is the union of the operands'.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "banded sum requires equal sizes");
        let mut out = Self::zeros(
            self.n,
            self.lower.max(rhs.lower),
            self.upper.max(rhs.upper),
        );
        for m in [self, rhs] {
            for i in 0..m.n {
                let j_lo = i.saturating_sub(m.lower);
                let j_hi = (i + m.upper).min(m.n - 1);
                for j in j_lo..=j_hi {
                    let v = m.data[(j + m.lower - i) * m.n + j];
                    if v != Complex64::ZERO {
                        let s = out.slot(i, j).expect("sum outside band");
                        out.data[s] += v;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    /// Leading `m x m` principal block, band profile clamped.
    pub fn principal(&self, m: usize) -> Self {
        assert!(m <= self.n, "principal block larger than matrix");
        let mut out = Self::zeros(m, self.lower, self.upper);
        for i in 0..m {
            let j_lo = i.saturating_sub(self.lower);
            let j_hi = (i + self.upper).min(m - 1);
            for j in j_lo..=j_hi {
                let v = self.data[(j + self.lower - i) * self.n + j];
                if v != Complex64::ZERO {
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Dense copy, for oracles and small-scale assembly.
    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut a = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let j_lo = i.saturating_sub(self.lower);
            let j_hi = (i + self.upper).min(self.n - 1);
            for j in j_lo..=j_hi {
                a[[i, j]] = self.data[(j + self.lower - i) * self.n + j];
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn get_set_respects_band() {
        let mut m = BandedOp::zeros(5, 1, 2);
        m.set(2, 1, c(7.0));
        m.set(2, 4, c(3.0));
        assert_eq!(m.get(2, 1), c(7.0));
        assert_eq!(m.get(2, 4), c(3.0));
        assert_eq!(m.get(4, 0), Complex64::ZERO);
        assert!(m.slot(0, 3).is_none());
    }

    #[test]
    fn matvec_matches_dense() {
        let mut m = BandedOp::zeros(6, 2, 1);
        let mut v = 1.0;
        for i in 0..6usize {
            for j in i.saturating_sub(2)..=(i + 1).min(5) {
                m.set(i, j, c(v));
                v += 1.0;
            }
        }
        let x: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64, -1.0)).collect();
        let dense = m.to_dense();
        let y = m.matvec(&x);
        for i in 0..6 {
            let want: Complex64 = (0..6).map(|j| dense[[i, j]] * x[j]).sum();
            assert!((y[i] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn product_matches_dense() {
        let mut a = BandedOp::zeros(7, 1, 2);
        let mut b = BandedOp::zeros(7, 0, 2);
        for i in 0..7usize {
            for j in i.saturating_sub(1)..=(i + 2).min(6) {
                a.set(i, j, Complex64::new((i + 1) as f64, (j as f64) * 0.5));
            }
            for j in i..=(i + 2).min(6) {
                b.set(i, j, Complex64::new(1.0 - j as f64, i as f64));
            }
        }
        let prod = a.mul(&b).to_dense();
        let want = a.to_dense().dot(&b.to_dense());
        for (p, w) in prod.iter().zip(want.iter()) {
            assert!((p - w).norm() < 1e-12);
        }
    }

    #[test]
    fn principal_block_is_leading_submatrix() {
        let mut a = BandedOp::zeros(8, 1, 3);
        for i in 0..8usize {
            for j in i.saturating_sub(1)..=(i + 3).min(7) {
                a.set(i, j, c((i * 10 + j) as f64));
            }
        }
        let p = a.principal(5).to_dense();
        let full = a.to_dense();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(p[[i, j]], full[[i, j]]);
            }
        }
    }
}
