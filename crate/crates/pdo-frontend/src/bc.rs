//! Boundary conditions on the four edges of a rectangle and point
//! constraints for one-dimensional problems.
//!
//! Accepted edge forms:
//! - `dirichlet` / `dirichlet: <data>`
//! - `neumann` / `neumann: <data>`
//! - a functional in u, optionally with data: `u/5 + diff(u)` or
//!   `diff(u) = sin(y)`; `diff` with no variable means the normal derivative.
//!
//! Data expressions are u-free and may depend only on the edge's tangential
//! variable. Functional coefficients obey the same restriction: they are
//! evaluated on the edge, where the normal coordinate is fixed.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::ast::{Axis, PdoExpr};
use crate::error::PdoError;
use crate::parser::{lex, parse_pdo, Parser, Tok};

/// One side of the rectangle. `Left`/`Right` are the x-extremes,
/// `Down`/`Up` the y-extremes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
    Down,
    Up,
}

impl Edge {
    /// The variable that is constant on this edge.
    pub fn normal_axis(&self) -> Axis {
        match self {
            Edge::Left | Edge::Right => Axis::X,
            Edge::Down | Edge::Up => Axis::Y,
        }
    }

    /// The variable that runs along this edge.
    pub fn tangential_axis(&self) -> Axis {
        match self.normal_axis() {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    /// True on the edges at the lower end of their interval, where the
    /// outward normal points in the negative direction.
    pub fn is_min_side(&self) -> bool {
        matches!(self, Edge::Left | Edge::Down)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Functional(PdoExpr),
}

/// A parsed boundary condition: what is constrained and to which data.
#[derive(Debug, Clone)]
pub struct BcSpec {
    pub edge: Edge,
    pub kind: BcKind,
    pub data: PdoExpr,
}

impl BcSpec {
    /// The constrained combination as a map from normal-derivative order to
    /// its (tangential) coefficient expression.
    pub fn functional_terms(&self) -> Result<BTreeMap<usize, PdoExpr>, PdoError> {
        match &self.kind {
            BcKind::Dirichlet => {
                Ok(BTreeMap::from([(0, PdoExpr::Const(Complex64::new(1.0, 0.0)))]))
            }
            BcKind::Neumann => {
                Ok(BTreeMap::from([(1, PdoExpr::Const(Complex64::new(1.0, 0.0)))]))
            }
            BcKind::Functional(e) => bc_functional_terms(e, self.edge),
        }
    }
}

fn named_form<'a>(t: &'a str, word: &str) -> Option<Option<&'a str>> {
    let rest = t.strip_prefix(word)?;
    let rest = rest.trim_start();
    if rest.is_empty() {
        return Some(None);
    }
    rest.strip_prefix(':').map(Some)
}

fn validate_data(data: &PdoExpr, edge: Edge) -> Result<(), PdoError> {
    if data.contains_u() {
        return Err(PdoError::InvalidBoundary {
            detail: "boundary data cannot involve u".into(),
        });
    }
    if data.depends_on(edge.normal_axis()) {
        return Err(PdoError::InvalidBoundary {
            detail: "boundary data may depend only on the variable running along the edge"
                .into(),
        });
    }
    Ok(())
}

/// Splits `text` at a top-level `=` (outside all parentheses). At most one
/// such `=` is allowed.
fn split_top_level_eq(text: &str) -> Result<(&str, Option<&str>), PdoError> {
    let toks = lex(text)?;
    let mut depth = 0i32;
    let mut split = None;
    for (tok, offset) in &toks {
        match tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::Eq if depth == 0 => {
                if split.is_some() {
                    return Err(PdoError::Syntax {
                        offset: *offset,
                        message: "more than one `=`".into(),
                    });
                }
                split = Some(*offset);
            }
            _ => {}
        }
    }
    Ok(match split {
        Some(offset) => (&text[..offset], Some(&text[offset + 1..])),
        None => (text, None),
    })
}

/// Parses one edge's boundary condition.
pub fn parse_bc(text: &str, edge: Edge) -> Result<BcSpec, PdoError> {
    let t = text.trim();
    for (word, kind) in [("dirichlet", BcKind::Dirichlet), ("neumann", BcKind::Neumann)] {
        if let Some(data_src) = named_form(t, word) {
            let data = match data_src {
                None => PdoExpr::Const(Complex64::new(0.0, 0.0)),
                Some(src) => parse_pdo(src)?,
            };
            validate_data(&data, edge)?;
            return Ok(BcSpec { edge, kind, data });
        }
    }
    let (lhs, rhs) = split_top_level_eq(t)?;
    let functional = parse_pdo(lhs)?;
    if !functional.contains_u() {
        return Err(PdoError::InvalidBoundary {
            detail: "a boundary condition must constrain u".into(),
        });
    }
    bc_functional_terms(&functional, edge)?;
    let data = match rhs {
        None => PdoExpr::Const(Complex64::new(0.0, 0.0)),
        Some(src) => parse_pdo(src)?,
    };
    validate_data(&data, edge)?;
    Ok(BcSpec { edge, kind: BcKind::Functional(functional), data })
}

/// Decomposes a boundary functional into normal-derivative orders and their
/// coefficients. `normal` names the variable whose derivatives are normal
/// derivatives; `diff` without a variable always counts as one.
fn functional_terms_generic(
    e: &PdoExpr,
    normal: Axis,
) -> Result<BTreeMap<usize, PdoExpr>, PdoError> {
    fn insert(map: &mut BTreeMap<usize, PdoExpr>, order: usize, coeff: PdoExpr) {
        match map.remove(&order) {
            Some(existing) => {
                map.insert(order, PdoExpr::Add(Box::new(existing), Box::new(coeff)));
            }
            None => {
                map.insert(order, coeff);
            }
        }
    }
    match e {
        PdoExpr::U => Ok(BTreeMap::from([(0, PdoExpr::Const(Complex64::new(1.0, 0.0)))])),
        PdoExpr::Add(a, b) | PdoExpr::Sub(a, b) => {
            let negate = matches!(e, PdoExpr::Sub(..));
            let mut left = functional_terms_generic(a, normal)?;
            for (order, coeff) in functional_terms_generic(b, normal)? {
                let coeff = if negate { PdoExpr::Neg(Box::new(coeff)) } else { coeff };
                insert(&mut left, order, coeff);
            }
            Ok(left)
        }
        PdoExpr::Mul(a, b) => {
            let (scalar, linear) = if a.contains_u() { (b, a) } else { (a, b) };
            let map = functional_terms_generic(linear, normal)?;
            Ok(map
                .into_iter()
                .map(|(order, coeff)| {
                    (order, PdoExpr::Mul(Box::new((**scalar).clone()), Box::new(coeff)))
                })
                .collect())
        }
        PdoExpr::Div(a, b) => {
            let map = functional_terms_generic(a, normal)?;
            Ok(map
                .into_iter()
                .map(|(order, coeff)| {
                    (order, PdoExpr::Div(Box::new(coeff), Box::new((**b).clone())))
                })
                .collect())
        }
        PdoExpr::Neg(a) => {
            let map = functional_terms_generic(a, normal)?;
            Ok(map
                .into_iter()
                .map(|(order, coeff)| (order, PdoExpr::Neg(Box::new(coeff))))
                .collect())
        }
        PdoExpr::Diff { child, var, order } => {
            if let Some(axis) = var {
                if *axis != normal {
                    return Err(PdoError::InvalidBoundary {
                        detail: "boundary conditions may differentiate only across the edge; \
                                 use diff(u) or the variable normal to the edge"
                            .into(),
                    });
                }
            }
            let map = functional_terms_generic(child, normal)?;
            let mut out = BTreeMap::new();
            for (base, coeff) in map {
                if coeff.depends_on(normal) {
                    return Err(PdoError::InvalidBoundary {
                        detail: "a boundary derivative cannot pass through a coefficient \
                                 that varies across the edge"
                            .into(),
                    });
                }
                insert(&mut out, base + order, coeff);
            }
            Ok(out)
        }
        PdoExpr::Laplacian(_) | PdoExpr::Biharmonic(_) => Err(PdoError::InvalidBoundary {
            detail: "laplacian/biharmonic are not boundary functionals".into(),
        }),
        _ => Err(PdoError::InvalidBoundary {
            detail: "boundary functional must be linear in u".into(),
        }),
    }
}

/// Normal-derivative orders and tangential coefficients of an edge
/// functional.
pub fn bc_functional_terms(
    e: &PdoExpr,
    edge: Edge,
) -> Result<BTreeMap<usize, PdoExpr>, PdoError> {
    let terms = functional_terms_generic(e, edge.normal_axis())?;
    for coeff in terms.values() {
        if coeff.depends_on(edge.normal_axis()) {
            return Err(PdoError::InvalidBoundary {
                detail: "boundary coefficients may depend only on the variable running \
                         along the edge"
                    .into(),
            });
        }
    }
    Ok(terms)
}

/// A one-dimensional point constraint `sum_k c_k u^(k)(point) = value` with
/// constant coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConstraint {
    pub terms: Vec<(usize, Complex64)>,
    pub point: f64,
    pub value: Complex64,
}

/// Parses forms like `u(-1) = 1`, `diff(u,x,2)(0) = exp(1)`, or
/// `(u/5 + diff(u))(1) = 0`. The variable of one-dimensional problems is x.
pub fn parse_point_constraint(text: &str) -> Result<PointConstraint, PdoError> {
    let (lhs, rhs) = split_top_level_eq(text)?;
    let Some(rhs) = rhs else {
        return Err(PdoError::Syntax {
            offset: text.len(),
            message: "expected `= <value>` in a point constraint".into(),
        });
    };
    let value_expr = parse_pdo(rhs)?;
    let value = value_expr.const_value().ok_or_else(|| PdoError::NotScalar {
        detail: "the right-hand side of a point constraint must be a constant".into(),
    })?;

    let toks = lex(lhs)?;
    let mut p = Parser::new(&toks, lhs.len());
    let functional = p.parse_expr()?;
    if !functional.contains_u() {
        return Err(PdoError::InvalidBoundary {
            detail: "a point constraint must involve u".into(),
        });
    }
    p.expect(Tok::LParen, "`(<point>)` after the constrained expression")?;
    let point_expr = p.parse_expr()?;
    p.expect(Tok::RParen, "`)`")?;
    if !p.at_end() {
        return Err(PdoError::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    let point_c = point_expr.const_value().ok_or_else(|| PdoError::NotScalar {
        detail: "the evaluation point must be a constant".into(),
    })?;
    if point_c.im != 0.0 {
        return Err(PdoError::NotScalar {
            detail: "the evaluation point must be real".into(),
        });
    }

    let raw_terms = functional_terms_generic(&functional, Axis::X)?;
    let mut terms = Vec::with_capacity(raw_terms.len());
    for (order, coeff) in raw_terms {
        let c = coeff.const_value().ok_or_else(|| PdoError::InvalidBoundary {
            detail: "point-constraint coefficients must be constants".into(),
        })?;
        terms.push((order, c));
    }
    Ok(PointConstraint { terms, point: point_c.re, value })
}
