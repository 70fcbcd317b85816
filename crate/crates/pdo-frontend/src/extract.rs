//! Separates a linear operator expression into derivative-indexed variable
//! coefficients.
//!
//! An operator `sum_{i,j} a_ij(x,y) d^{i+j}u / dy^i dx^j` is recovered from
//! the parse tree by a forward pass that carries, for every subtree, either a
//! u-free scalar expression or a map from derivative orders `(i, j)` (y-order
//! first, matching the coefficient-matrix layout) to the symbolic coefficient
//! multiplying that derivative. Coefficients are then sampled adaptively into
//! bivariate Chebyshev expansions.

use std::collections::BTreeMap;

use cheb_core::{interp2_adaptive, AdaptiveOptions, Cheb2, Interval};
use num_complex::Complex64;

use crate::ast::{Axis, PdoExpr};
use crate::error::PdoError;

/// Relative magnitude below which a sampled coefficient is treated as absent.
pub const DROP_TOL: f64 = 1e-14;

/// Forward value: a subtree is either free of the unknown or linear in it.
enum Fwd {
    Free,
    Lin(BTreeMap<(usize, usize), PdoExpr>),
}

fn insert_term(map: &mut BTreeMap<(usize, usize), PdoExpr>, key: (usize, usize), coeff: PdoExpr) {
    match map.remove(&key) {
        Some(existing) => {
            map.insert(key, PdoExpr::Add(Box::new(existing), Box::new(coeff)));
        }
        None => {
            map.insert(key, coeff);
        }
    }
}

fn affine_error() -> PdoError {
    PdoError::Nonlinear {
        offset: 0,
        message: "sum mixes a u-term with a u-free term".into(),
    }
}

fn forward(e: &PdoExpr) -> Result<Fwd, PdoError> {
    if !e.contains_u() {
        return Ok(Fwd::Free);
    }
    match e {
        PdoExpr::U => {
            let mut map = BTreeMap::new();
            map.insert((0, 0), PdoExpr::Const(Complex64::new(1.0, 0.0)));
            Ok(Fwd::Lin(map))
        }
        PdoExpr::Add(a, b) | PdoExpr::Sub(a, b) => {
            let negate = matches!(e, PdoExpr::Sub(..));
            let (Fwd::Lin(mut left), Fwd::Lin(right)) = (forward(a)?, forward(b)?) else {
                return Err(affine_error());
            };
            for (key, coeff) in right {
                let coeff = if negate { PdoExpr::Neg(Box::new(coeff)) } else { coeff };
                insert_term(&mut left, key, coeff);
            }
            Ok(Fwd::Lin(left))
        }
        PdoExpr::Mul(a, b) => {
            let (scalar, linear) = if a.contains_u() { (b, a) } else { (a, b) };
            if scalar.contains_u() {
                return Err(PdoError::Nonlinear {
                    offset: 0,
                    message: "product of two u-terms".into(),
                });
            }
            let Fwd::Lin(map) = forward(linear)? else { unreachable!() };
            let map = map
                .into_iter()
                .map(|(key, coeff)| {
                    (key, PdoExpr::Mul(Box::new((**scalar).clone()), Box::new(coeff)))
                })
                .collect();
            Ok(Fwd::Lin(map))
        }
        PdoExpr::Div(a, b) => {
            if b.contains_u() {
                return Err(PdoError::Nonlinear {
                    offset: 0,
                    message: "division by a u-term".into(),
                });
            }
            let Fwd::Lin(map) = forward(a)? else { unreachable!() };
            let map = map
                .into_iter()
                .map(|(key, coeff)| {
                    (key, PdoExpr::Div(Box::new(coeff), Box::new((**b).clone())))
                })
                .collect();
            Ok(Fwd::Lin(map))
        }
        PdoExpr::Neg(a) => {
            let Fwd::Lin(map) = forward(a)? else { unreachable!() };
            let map = map
                .into_iter()
                .map(|(key, coeff)| (key, PdoExpr::Neg(Box::new(coeff))))
                .collect();
            Ok(Fwd::Lin(map))
        }
        PdoExpr::Diff { child, var, order } => {
            let Some(axis) = var else {
                return Err(PdoError::UnsupportedDerivative {
                    detail: "the derivative variable must be named (diff(u, x, k) or \
                             diff(u, y, k)) in an operator expression"
                        .into(),
                });
            };
            let Fwd::Lin(map) = forward(child)? else { unreachable!() };
            let mut out = BTreeMap::new();
            for ((i, j), coeff) in map {
                if coeff.depends_on(*axis) {
                    return Err(PdoError::UnsupportedDerivative {
                        detail: "a derivative cannot pass through a coefficient that varies \
                                 with the derivative variable; write coefficients to the left \
                                 of diff(...)"
                            .into(),
                    });
                }
                let key = match axis {
                    Axis::X => (i, j + order),
                    Axis::Y => (i + order, j),
                };
                insert_term(&mut out, key, coeff);
            }
            Ok(Fwd::Lin(out))
        }
        PdoExpr::Laplacian(child) | PdoExpr::Biharmonic(child) => {
            let Fwd::Lin(map) = forward(child)? else { unreachable!() };
            let mut out = BTreeMap::new();
            for ((i, j), coeff) in map {
                if coeff.depends_on(Axis::X) || coeff.depends_on(Axis::Y) {
                    return Err(PdoError::UnsupportedDerivative {
                        detail: "laplacian/biharmonic cannot pass through a variable \
                                 coefficient; write coefficients to the left"
                            .into(),
                    });
                }
                match e {
                    PdoExpr::Laplacian(_) => {
                        insert_term(&mut out, (i, j + 2), coeff.clone());
                        insert_term(&mut out, (i + 2, j), coeff);
                    }
                    _ => {
                        insert_term(&mut out, (i, j + 4), coeff.clone());
                        insert_term(&mut out, (i + 4, j), coeff.clone());
                        insert_term(
                            &mut out,
                            (i + 2, j + 2),
                            PdoExpr::Mul(
                                Box::new(PdoExpr::Const(Complex64::new(2.0, 0.0))),
                                Box::new(coeff),
                            ),
                        );
                    }
                }
            }
            Ok(Fwd::Lin(out))
        }
        PdoExpr::Func { .. } | PdoExpr::Pow { .. } => Err(PdoError::Nonlinear {
            offset: 0,
            message: "function or power of a u-term".into(),
        }),
        PdoExpr::VarX | PdoExpr::VarY | PdoExpr::Const(_) => unreachable!(),
    }
}

/// Variable coefficients of a linear operator, keyed by derivative orders
/// `(i, j)`: `i` the y-order, `j` the x-order.
#[derive(Debug, Clone)]
pub struct CoeffArray {
    entries: BTreeMap<(usize, usize), Cheb2>,
    xinterval: Interval,
    yinterval: Interval,
}

impl CoeffArray {
    /// Wraps explicit coefficient functions; every entry must live on the
    /// stated rectangle.
    pub fn new(
        entries: BTreeMap<(usize, usize), Cheb2>,
        xinterval: Interval,
        yinterval: Interval,
    ) -> Result<Self, PdoError> {
        for coeff in entries.values() {
            if coeff.xinterval() != xinterval || coeff.yinterval() != yinterval {
                return Err(PdoError::DomainMismatch);
            }
        }
        Ok(Self { entries, xinterval, yinterval })
    }

    pub fn xinterval(&self) -> Interval {
        self.xinterval
    }

    pub fn yinterval(&self) -> Interval {
        self.yinterval
    }

    /// Highest x-derivative order present (0 when empty).
    pub fn x_order(&self) -> usize {
        self.entries.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Highest y-derivative order present (0 when empty).
    pub fn y_order(&self) -> usize {
        self.entries.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Cheb2> {
        self.entries.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Cheb2)> {
        self.entries.iter().map(|(&key, coeff)| (key, coeff))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Samples every derivative coefficient of a linear operator expression into
/// a bivariate Chebyshev expansion on the rectangle. Coefficients whose
/// magnitude is negligible relative to the largest one are dropped.
pub fn extract_coeffs(
    e: &PdoExpr,
    xinterval: Interval,
    yinterval: Interval,
    tol: f64,
) -> Result<CoeffArray, PdoError> {
    let Fwd::Lin(map) = forward(e)? else {
        return Err(PdoError::MissingUnknown);
    };
    let opts = AdaptiveOptions { tol, ..AdaptiveOptions::default() };
    let mut sampled = Vec::with_capacity(map.len());
    for (key, coeff) in map {
        let series = interp2_adaptive(
            |x, y| {
                coeff
                    .eval_scalar(x, y)
                    .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN))
            },
            xinterval,
            yinterval,
            &opts,
        )?;
        sampled.push((key, series));
    }
    let global = sampled
        .iter()
        .map(|(_, series)| series.max_coeff())
        .fold(0.0, f64::max);
    let mut entries = BTreeMap::new();
    for (key, series) in sampled {
        if series.max_coeff() <= DROP_TOL * global {
            continue;
        }
        let trimmed = cheb_core::trim_coeffs_2d(series.coeffs(), DROP_TOL);
        entries.insert(key, Cheb2::new(trimmed, xinterval, yinterval)?);
    }
    Ok(CoeffArray { entries, xinterval, yinterval })
}
