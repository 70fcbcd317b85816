//! Expression tree for partial differential operators and boundary
//! functionals, with scalar evaluation of u-free subtrees.

use num_complex::Complex64;

use crate::error::PdoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncName {
    Sin,
    Cos,
    Exp,
    Sinh,
    Cosh,
    Sqrt,
    Log,
}

impl FuncName {
    pub fn from_ident(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => FuncName::Sin,
            "cos" => FuncName::Cos,
            "exp" => FuncName::Exp,
            "sinh" => FuncName::Sinh,
            "cosh" => FuncName::Cosh,
            "sqrt" => FuncName::Sqrt,
            "log" => FuncName::Log,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            FuncName::Sin => z.sin(),
            FuncName::Cos => z.cos(),
            FuncName::Exp => z.exp(),
            FuncName::Sinh => z.sinh(),
            FuncName::Cosh => z.cosh(),
            FuncName::Sqrt => z.sqrt(),
            FuncName::Log => z.ln(),
        }
    }
}

/// A parsed operator / functional / scalar expression. Linearity in the
/// unknown is enforced at construction: no products, quotients, powers, or
/// elementary functions of u-containing subtrees exist in a valid tree.
#[derive(Debug, Clone, PartialEq)]
pub enum PdoExpr {
    /// The unknown function.
    U,
    VarX,
    VarY,
    Const(Complex64),
    /// Derivative of a u-containing subtree. `var: None` is the edge-normal
    /// derivative, legal only inside boundary functionals.
    Diff { child: Box<PdoExpr>, var: Option<Axis>, order: usize },
    Add(Box<PdoExpr>, Box<PdoExpr>),
    Sub(Box<PdoExpr>, Box<PdoExpr>),
    Mul(Box<PdoExpr>, Box<PdoExpr>),
    Div(Box<PdoExpr>, Box<PdoExpr>),
    Neg(Box<PdoExpr>),
    /// Elementary function of a u-free subtree.
    Func { name: FuncName, child: Box<PdoExpr> },
    /// u-free subtree raised to a constant exponent.
    Pow { child: Box<PdoExpr>, exponent: Complex64 },
    Laplacian(Box<PdoExpr>),
    Biharmonic(Box<PdoExpr>),
}

impl PdoExpr {
    pub fn contains_u(&self) -> bool {
        match self {
            PdoExpr::U => true,
            PdoExpr::VarX | PdoExpr::VarY | PdoExpr::Const(_) => false,
            PdoExpr::Diff { child, .. }
            | PdoExpr::Neg(child)
            | PdoExpr::Func { child, .. }
            | PdoExpr::Pow { child, .. }
            | PdoExpr::Laplacian(child)
            | PdoExpr::Biharmonic(child) => child.contains_u(),
            PdoExpr::Add(a, b) | PdoExpr::Sub(a, b) | PdoExpr::Mul(a, b) | PdoExpr::Div(a, b) => {
                a.contains_u() || b.contains_u()
            }
        }
    }

    /// Whether the expression references the given coordinate.
    pub fn depends_on(&self, axis: Axis) -> bool {
        match self {
            PdoExpr::VarX => axis == Axis::X,
            PdoExpr::VarY => axis == Axis::Y,
            PdoExpr::U | PdoExpr::Const(_) => false,
            PdoExpr::Diff { child, .. }
            | PdoExpr::Neg(child)
            | PdoExpr::Func { child, .. }
            | PdoExpr::Pow { child, .. }
            | PdoExpr::Laplacian(child)
            | PdoExpr::Biharmonic(child) => child.depends_on(axis),
            PdoExpr::Add(a, b) | PdoExpr::Sub(a, b) | PdoExpr::Mul(a, b) | PdoExpr::Div(a, b) => {
                a.depends_on(axis) || b.depends_on(axis)
            }
        }
    }

    /// Evaluates a u-free expression at a point. Derivative nodes cannot
    /// appear in u-free trees (they require a u-containing child).
    pub fn eval_scalar(&self, x: f64, y: f64) -> Result<Complex64, PdoError> {
        Ok(match self {
            PdoExpr::U | PdoExpr::Diff { .. } | PdoExpr::Laplacian(_) | PdoExpr::Biharmonic(_) => {
                return Err(PdoError::NotScalar { detail: format!("{self:?} is not u-free") })
            }
            PdoExpr::VarX => Complex64::new(x, 0.0),
            PdoExpr::VarY => Complex64::new(y, 0.0),
            PdoExpr::Const(c) => *c,
            PdoExpr::Add(a, b) => a.eval_scalar(x, y)? + b.eval_scalar(x, y)?,
            PdoExpr::Sub(a, b) => a.eval_scalar(x, y)? - b.eval_scalar(x, y)?,
            PdoExpr::Mul(a, b) => a.eval_scalar(x, y)? * b.eval_scalar(x, y)?,
            PdoExpr::Div(a, b) => a.eval_scalar(x, y)? / b.eval_scalar(x, y)?,
            PdoExpr::Neg(a) => -a.eval_scalar(x, y)?,
            PdoExpr::Func { name, child } => name.apply(child.eval_scalar(x, y)?),
            PdoExpr::Pow { child, exponent } => pow_const(child.eval_scalar(x, y)?, *exponent),
        })
    }

    /// Constant-folds an expression with no variables and no unknown.
    pub fn const_value(&self) -> Option<Complex64> {
        match self {
            PdoExpr::Const(c) => Some(*c),
            PdoExpr::Neg(a) => Some(-a.const_value()?),
            PdoExpr::Add(a, b) => Some(a.const_value()? + b.const_value()?),
            PdoExpr::Sub(a, b) => Some(a.const_value()? - b.const_value()?),
            PdoExpr::Mul(a, b) => Some(a.const_value()? * b.const_value()?),
            PdoExpr::Div(a, b) => Some(a.const_value()? / b.const_value()?),
            PdoExpr::Func { name, child } => Some(name.apply(child.const_value()?)),
            PdoExpr::Pow { child, exponent } => Some(pow_const(child.const_value()?, *exponent)),
            _ => None,
        }
    }
}

/// z^p, preferring the exact integer path for integral real exponents.
fn pow_const(z: Complex64, p: Complex64) -> Complex64 {
    if p.im == 0.0 && p.re.fract() == 0.0 && p.re.abs() <= 64.0 {
        z.powi(p.re as i32)
    } else {
        z.powc(p)
    }
}
