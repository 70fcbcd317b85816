//! Recursive-descent parser for the operator grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := factor ('^' factor)?
//! factor := number | 'x' | 'y' | 'u' | 'i' | 'pi'
//!         | func '(' expr ')'                 func in {sin cos exp sinh cosh sqrt log}
//!         | 'diff' '(' expr [',' var [',' order]] ')'
//!         | 'laplacian' '(' expr ')' | 'biharmonic' '(' expr ')'
//!         | '(' expr ')' | '-' factor
//! ```
//!
//! Whitespace is insignificant. Linearity in u is enforced during
//! construction: products of two u-terms, functions or powers of u-terms,
//! division by u-terms, and sums mixing u-terms with u-free terms are all
//! rejected with the byte offset of the offending operator.

use num_complex::Complex64;

use crate::ast::{Axis, FuncName, PdoExpr};
use crate::error::PdoError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eq,
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PdoError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => { toks.push((Tok::Plus, i)); i += 1; }
            b'-' => { toks.push((Tok::Minus, i)); i += 1; }
            b'*' => { toks.push((Tok::Star, i)); i += 1; }
            b'/' => { toks.push((Tok::Slash, i)); i += 1; }
            b'^' => { toks.push((Tok::Caret, i)); i += 1; }
            b'(' => { toks.push((Tok::LParen, i)); i += 1; }
            b')' => { toks.push((Tok::RParen, i)); i += 1; }
            b',' => { toks.push((Tok::Comma, i)); i += 1; }
            b'=' => { toks.push((Tok::Eq, i)); i += 1; }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let v: f64 = text[start..i].parse().map_err(|_| PdoError::Syntax {
                    offset: start,
                    message: format!("malformed number `{}`", &text[start..i]),
                })?;
                toks.push((Tok::Num(v), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(PdoError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", &text[i..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(toks)
}

pub(crate) struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [(Tok, usize)], text_len: usize) -> Self {
        Self { toks, pos: 0, end: text_len }
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<(), PdoError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(PdoError::Syntax { offset: self.offset(), message: format!("expected {what}") })
        }
    }

    pub(crate) fn parse_expr(&mut self) -> Result<PdoExpr, PdoError> {
        let mut acc = self.parse_term()?;
        loop {
            let op_offset = self.offset();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = mk_sum(acc, rhs, false, op_offset)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = mk_sum(acc, rhs, true, op_offset)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<PdoExpr, PdoError> {
        let mut acc = self.parse_power()?;
        loop {
            let op_offset = self.offset();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.parse_power()?;
                    if acc.contains_u() && rhs.contains_u() {
                        return Err(PdoError::Nonlinear {
                            offset: op_offset,
                            message: "product of two u-terms".into(),
                        });
                    }
                    acc = PdoExpr::Mul(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.parse_power()?;
                    if rhs.contains_u() {
                        return Err(PdoError::Nonlinear {
                            offset: op_offset,
                            message: "division by a u-term".into(),
                        });
                    }
                    acc = PdoExpr::Div(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_power(&mut self) -> Result<PdoExpr, PdoError> {
        let base = self.parse_factor()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let op_offset = self.offset();
        self.pos += 1;
        if base.contains_u() {
            return Err(PdoError::Nonlinear {
                offset: op_offset,
                message: "power of a u-term".into(),
            });
        }
        let exp_offset = self.offset();
        let exponent = self.parse_factor()?;
        let exponent = exponent.const_value().ok_or_else(|| PdoError::Syntax {
            offset: exp_offset,
            message: "exponent must be a constant".into(),
        })?;
        Ok(PdoExpr::Pow { child: Box::new(base), exponent })
    }

    fn parse_factor(&mut self) -> Result<PdoExpr, PdoError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Minus) => Ok(PdoExpr::Neg(Box::new(self.parse_factor()?))),
            Some(Tok::Num(v)) => Ok(PdoExpr::Const(Complex64::new(v, 0.0))),
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.parse_ident(&name, offset),
            Some(other) => Err(PdoError::Syntax {
                offset,
                message: format!("unexpected token {other:?}"),
            }),
            None => Err(PdoError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn parse_ident(&mut self, name: &str, offset: usize) -> Result<PdoExpr, PdoError> {
        match name {
            "x" => return Ok(PdoExpr::VarX),
            "y" => return Ok(PdoExpr::VarY),
            "u" => return Ok(PdoExpr::U),
            "i" => return Ok(PdoExpr::Const(Complex64::new(0.0, 1.0))),
            "pi" => return Ok(PdoExpr::Const(Complex64::new(std::f64::consts::PI, 0.0))),
            _ => {}
        }
        if let Some(func) = FuncName::from_ident(name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg_offset = self.offset();
            let child = self.parse_expr()?;
            self.expect(Tok::RParen, "`)`")?;
            if child.contains_u() {
                return Err(PdoError::Nonlinear {
                    offset: arg_offset,
                    message: format!("{name} applied to a u-term"),
                });
            }
            return Ok(PdoExpr::Func { name: func, child: Box::new(child) });
        }
        match name {
            "diff" => {
                self.expect(Tok::LParen, "`(` after diff")?;
                let arg_offset = self.offset();
                let child = self.parse_expr()?;
                if !child.contains_u() {
                    return Err(PdoError::InvalidDerivative {
                        offset: arg_offset,
                        message: "diff applies only to expressions containing u".into(),
                    });
                }
                let mut var = None;
                let mut order = 1;
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    let var_offset = self.offset();
                    var = Some(match self.bump() {
                        Some(Tok::Ident(v)) if v == "x" => Axis::X,
                        Some(Tok::Ident(v)) if v == "y" => Axis::Y,
                        _ => {
                            return Err(PdoError::Syntax {
                                offset: var_offset,
                                message: "derivative variable must be x or y".into(),
                            })
                        }
                    });
                    if self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        let ord_offset = self.offset();
                        order = match self.bump() {
                            Some(Tok::Num(v)) if v.fract() == 0.0 && (0.0..=16.0).contains(&v) => {
                                v as usize
                            }
                            _ => {
                                return Err(PdoError::Syntax {
                                    offset: ord_offset,
                                    message: "derivative order must be an integer in 0..=16".into(),
                                })
                            }
                        };
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                if order == 0 {
                    return Ok(child);
                }
                Ok(PdoExpr::Diff { child: Box::new(child), var, order })
            }
            "laplacian" | "biharmonic" => {
                self.expect(Tok::LParen, "`(`")?;
                let arg_offset = self.offset();
                let child = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                if !child.contains_u() {
                    return Err(PdoError::InvalidDerivative {
                        offset: arg_offset,
                        message: format!("{name} applies only to expressions containing u"),
                    });
                }
                Ok(if name == "laplacian" {
                    PdoExpr::Laplacian(Box::new(child))
                } else {
                    PdoExpr::Biharmonic(Box::new(child))
                })
            }
            _ => Err(PdoError::UnknownIdentifier { offset, name: name.to_string() }),
        }
    }
}

/// Sum or difference with the homogeneity check: a u-term plus a u-free term
/// would make the operator affine.
fn mk_sum(a: PdoExpr, b: PdoExpr, subtract: bool, offset: usize) -> Result<PdoExpr, PdoError> {
    if a.contains_u() != b.contains_u() {
        return Err(PdoError::Nonlinear {
            offset,
            message: "sum mixes a u-term with a u-free term; the operator must be homogeneous in u"
                .into(),
        });
    }
    Ok(if subtract {
        PdoExpr::Sub(Box::new(a), Box::new(b))
    } else {
        PdoExpr::Add(Box::new(a), Box::new(b))
    })
}

/// Parses a complete operator, functional, or scalar expression.
pub fn parse_pdo(text: &str) -> Result<PdoExpr, PdoError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(PdoError::Syntax { offset: 0, message: "empty expression".into() });
    }
    let mut p = Parser::new(&toks, text.len());
    let e = p.parse_expr()?;
    if !p.at_end() {
        return Err(PdoError::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}
