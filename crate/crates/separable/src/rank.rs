//! Splitting rank and separable representation of a partial differential
//! operator.
//!
//! An operator `sum_{i,j} a_ij(x,y) d^i_y d^j_x` is flattened into its
//! unfolding matrix: rows indexed by `(i, alpha)` (y-derivative order,
//! y-Chebyshev mode of the coefficient), columns by `(j, beta)` (the x
//! analogues), with entry the `(alpha, beta)` Chebyshev coefficient of
//! `a_ij`. A singular value decomposition of this matrix separates the
//! operator into a minimal sum of k tensor products of one-dimensional
//! operators, one acting in y and one in x per term.

use std::collections::BTreeMap;

use cheb_core::{trim_coeffs, Cheb1, Cheb2, Interval};
use ndarray::Array2;
use num_complex::Complex64;
use pdo_frontend::CoeffArray;
use ultra_ops::LinearODO;

use crate::error::SepError;
use crate::svd::svd;

/// Trimming tolerance for reconstituted one-dimensional coefficients.
const FACTOR_TRIM_TOL: f64 = 1e-14;

/// Default relative singular-value cutoff for the numerical splitting rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// One tensor-product term: an operator in y composed with one in x.
#[derive(Debug, Clone)]
pub struct SepTerm {
    pub ode_y: LinearODO,
    pub ode_x: LinearODO,
}

/// A rank-k separable representation of a linear operator on a rectangle.
#[derive(Debug, Clone)]
pub struct SeparableRep {
    terms: Vec<SepTerm>,
    singular_values: Vec<f64>,
    xinterval: Interval,
    yinterval: Interval,
}

impl SeparableRep {
    /// The splitting rank at the tolerance used to build this representation.
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[SepTerm] {
        &self.terms
    }

    /// The full singular-value profile of the unfolding matrix, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Euclidean mass of the singular values discarded by the rank cutoff.
    pub fn discarded_mass(&self) -> f64 {
        self.singular_values[self.k()..]
            .iter()
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt()
    }

    pub fn xinterval(&self) -> Interval {
        self.xinterval
    }

    pub fn yinterval(&self) -> Interval {
        self.yinterval
    }

    /// A copy with term `index` removed; used to validate minimality (the
    /// reconstruction error must then exceed the rank cutoff).
    pub fn without_term(&self, index: usize) -> SeparableRep {
        let mut terms = self.terms.clone();
        terms.remove(index);
        SeparableRep { terms, ..self.clone() }
    }
}

/// Builds the unfolding matrix of the operator's symbol.
fn unfolding(c: &CoeffArray) -> (Array2<Complex64>, usize, usize) {
    let blocks_y = c.y_order() + 1;
    let blocks_x = c.x_order() + 1;
    let p_y = c.iter().map(|(_, a)| a.coeffs().nrows()).max().unwrap_or(1);
    let p_x = c.iter().map(|(_, a)| a.coeffs().ncols()).max().unwrap_or(1);
    let mut m = Array2::<Complex64>::zeros((blocks_y * p_y, blocks_x * p_x));
    for ((i, j), coeff) in c.iter() {
        let block = coeff.coeffs();
        for alpha in 0..block.nrows() {
            for beta in 0..block.ncols() {
                m[(i * p_y + alpha, j * p_x + beta)] = block[(alpha, beta)];
            }
        }
    }
    (m, p_y, p_x)
}

/// Slices one singular vector into per-derivative-order coefficient lists
/// and assembles the one-dimensional operator.
fn reconstitute_odo(
    column: &[Complex64],
    scale: f64,
    blocks: usize,
    p: usize,
    interval: Interval,
) -> Result<LinearODO, SepError> {
    let col_max = column.iter().map(|z| z.norm()).fold(0.0, f64::max) * scale;
    let mut terms = Vec::new();
    for d in 0..blocks {
        let slice: Vec<Complex64> =
            column[d * p..(d + 1) * p].iter().map(|&z| z * scale).collect();
        let slice_max = slice.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if slice_max <= FACTOR_TRIM_TOL * col_max {
            continue;
        }
        let trimmed = trim_coeffs(slice, FACTOR_TRIM_TOL);
        terms.push((d, Cheb1::new(trimmed, interval)?));
    }
    Ok(LinearODO::new(terms, interval)?)
}

/// Computes the numerical splitting rank of the operator at relative
/// tolerance `tau` and a separable representation with that many terms.
pub fn splitting_rank(c: &CoeffArray, tau: f64) -> Result<SeparableRep, SepError> {
    if c.is_empty() {
        return Err(SepError::ZeroOperator);
    }
    let (m, p_y, p_x) = unfolding(c);
    let blocks_y = c.y_order() + 1;
    let blocks_x = c.x_order() + 1;
    let dec = svd(&m);
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Err(SepError::ZeroOperator);
    }
    let k = dec.sigma.iter().filter(|&&s| s > tau * sigma_max).count();
    let mut terms = Vec::with_capacity(k);
    for r in 0..k {
        let scale = dec.sigma[r].sqrt();
        let u_col: Vec<Complex64> = dec.u.column(r).to_vec();
        let v_col: Vec<Complex64> = dec.v.column(r).iter().map(|z| z.conj()).collect();
        let ode_y = reconstitute_odo(&u_col, scale, blocks_y, p_y, c.yinterval())?;
        let ode_x = reconstitute_odo(&v_col, scale, blocks_x, p_x, c.xinterval())?;
        terms.push(SepTerm { ode_y, ode_x });
    }
    Ok(SeparableRep {
        terms,
        singular_values: dec.sigma,
        xinterval: c.xinterval(),
        yinterval: c.yinterval(),
    })
}

/// Re-expands the separable terms back into derivative-indexed bivariate
/// coefficients; used to validate a representation against its source.
pub fn reconstruct_symbol(rep: &SeparableRep) -> Result<CoeffArray, SepError> {
    let mut sizes: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for term in rep.terms() {
        for dy in 0..=term.ode_y.order() {
            let Some(ay) = term.ode_y.coeff(dy) else { continue };
            for dx in 0..=term.ode_x.order() {
                let Some(ax) = term.ode_x.coeff(dx) else { continue };
                let entry = sizes.entry((dy, dx)).or_insert((1, 1));
                entry.0 = entry.0.max(ay.len());
                entry.1 = entry.1.max(ax.len());
            }
        }
    }
    let mut accum: BTreeMap<(usize, usize), Array2<Complex64>> = sizes
        .iter()
        .map(|(&key, &(rows, cols))| (key, Array2::zeros((rows, cols))))
        .collect();
    for term in rep.terms() {
        for dy in 0..=term.ode_y.order() {
            let Some(ay) = term.ode_y.coeff(dy) else { continue };
            for dx in 0..=term.ode_x.order() {
                let Some(ax) = term.ode_x.coeff(dx) else { continue };
                let target = accum.get_mut(&(dy, dx)).expect("sized above");
                for (alpha, &cy) in ay.coeffs().iter().enumerate() {
                    for (beta, &cx) in ax.coeffs().iter().enumerate() {
                        target[(alpha, beta)] += cy * cx;
                    }
                }
            }
        }
    }
    let mut entries = BTreeMap::new();
    for (key, matrix) in accum {
        entries.insert(key, Cheb2::new(matrix, rep.xinterval(), rep.yinterval())?);
    }
    Ok(CoeffArray::new(entries, rep.xinterval(), rep.yinterval())?)
}
