//! The problem-file format: one JSON document describing a linear PDE on a
//! rectangle. Unknown keys are rejected so a typo fails loudly instead of
//! silently falling back to a default.

use std::sync::Arc;

use cheb_core::Interval;
use num_complex::Complex64;
use pde_solver::{PdeProblem, Rhs};
use pdo_frontend::{extract_coeffs, parse_bc, parse_pdo, BcSpec, Edge, DROP_TOL};
use serde::Deserialize;

use crate::error::CliError;

fn default_tol() -> f64 {
    1e-14
}

fn default_max_n() -> usize {
    2049
}

fn default_rank_tol() -> f64 {
    1e-12
}

fn default_rhs() -> String {
    "0".to_owned()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Operator text, e.g. `"laplacian(u) + 1000*u"`.
    pub operator: String,
    /// Rectangle `[a, b, c, d]` meaning `[a, b] x [c, d]` with `a < b`, `c < d`.
    pub domain: [f64; 4],
    /// Right-hand side as a function of `x` and `y`; `"0"` means zero.
    #[serde(default = "default_rhs")]
    pub rhs: String,
    pub bc: BcBlock,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcBlock {
    #[serde(default)]
    pub left: EdgeConditions,
    #[serde(default)]
    pub right: EdgeConditions,
    #[serde(default)]
    pub down: EdgeConditions,
    #[serde(default)]
    pub up: EdgeConditions,
}

/// One condition or a list of them; edges of time-like variables may carry
/// two conditions (value and derivative) or none at all.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EdgeConditions {
    One(BcEntry),
    Many(Vec<BcEntry>),
}

impl Default for EdgeConditions {
    fn default() -> Self {
        Self::Many(Vec::new())
    }
}

impl EdgeConditions {
    fn entries(&self) -> &[BcEntry] {
        match self {
            Self::One(e) => std::slice::from_ref(e),
            Self::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcEntry {
    /// `"dirichlet"`, `"neumann"` (outward normal derivative), or `"expr"`.
    #[serde(rename = "type")]
    pub kind: String,
    /// Boundary data in the edge's tangential variable; defaults to zero.
    #[serde(default)]
    pub data: Option<String>,
    /// For `"expr"`: the functional, e.g. `"u/5 + diff(u)"`.
    #[serde(default)]
    pub expr: Option<String>,
}

fn edge_name(edge: Edge) -> &'static str {
    match edge {
        Edge::Left => "left",
        Edge::Right => "right",
        Edge::Down => "down",
        Edge::Up => "up",
    }
}

impl BcEntry {
    fn to_spec(&self, edge: Edge) -> Result<BcSpec, CliError> {
        let name = edge_name(edge);
        let text = match self.kind.as_str() {
            "dirichlet" | "neumann" => {
                if self.expr.is_some() {
                    return Err(CliError::schema(format!(
                        "bc.{name}: \"expr\" is only valid with type \"expr\""
                    )));
                }
                match &self.data {
                    Some(d) => format!("{}: {}", self.kind, d),
                    None => self.kind.clone(),
                }
            }
            "expr" => {
                let functional = self.expr.as_ref().ok_or_else(|| {
                    CliError::schema(format!(
                        "bc.{name}: type \"expr\" requires an \"expr\" string"
                    ))
                })?;
                let data = self.data.as_deref().unwrap_or("0");
                format!("{functional} = {data}")
            }
            other => {
                return Err(CliError::schema(format!(
                    "bc.{name}: unknown type {other:?} (expected \"dirichlet\", \"neumann\", or \"expr\")"
                )))
            }
        };
        Ok(parse_bc(&text, edge)?)
    }
}

/// Flag-level overrides of the problem file's numeric settings.
#[derive(Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_n: Option<usize>,
    pub rank_tol: Option<f64>,
    pub threads: usize,
}

impl ProblemFile {
    pub fn into_problem(self, ov: &Overrides) -> Result<PdeProblem, CliError> {
        let [a, b, c, d] = self.domain;
        if !(a < b) || !(c < d) {
            return Err(CliError::schema(format!(
                "domain must satisfy a < b and c < d, got [{a}, {b}, {c}, {d}]"
            )));
        }
        let xint = Interval::new(a, b).map_err(|e| CliError::schema(e.to_string()))?;
        let yint = Interval::new(c, d).map_err(|e| CliError::schema(e.to_string()))?;
        let op_expr = parse_pdo(&self.operator)?;
        let operator = extract_coeffs(&op_expr, xint, yint, DROP_TOL)?;
        let mut bcs = Vec::new();
        for (edge, conds) in [
            (Edge::Left, &self.bc.left),
            (Edge::Right, &self.bc.right),
            (Edge::Down, &self.bc.down),
            (Edge::Up, &self.bc.up),
        ] {
            for entry in conds.entries() {
                bcs.push(entry.to_spec(edge)?);
            }
        }
        let rhs = parse_rhs(&self.rhs)?;
        let problem = PdeProblem::new(operator, bcs, rhs)?
            .with_tolerance(ov.tol.unwrap_or(self.tol))
            .with_rank_tolerance(ov.rank_tol.unwrap_or(self.rank_tol))
            .with_degree_cap(ov.max_n.unwrap_or(self.max_n))
            .with_threads(ov.threads.max(1));
        Ok(problem)
    }
}

pub fn parse_rhs(text: &str) -> Result<Rhs, CliError> {
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(Rhs::Zero);
    }
    let expr = parse_pdo(trimmed)?;
    if expr.contains_u() {
        return Err(CliError::schema("rhs must be a function of x and y only, not of u"));
    }
    if expr.const_value() == Some(Complex64::ZERO) {
        return Ok(Rhs::Zero);
    }
    let f = move |x: f64, y: f64| {
        expr.eval_scalar(x, y).unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    Ok(Rhs::Function(Arc::new(f)))
}
