//! Problem and solution containers for the adaptive PDE solver.

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use cheb_core::{interp2_adaptive, AdaptiveOptions, Cheb2, Interval};
use num_complex::Complex64;
use pdo_frontend::{BcSpec, CoeffArray};
use sylvester::SolvePath;

use crate::error::PdeError;

/// Right-hand side of the PDE: identically zero, an explicit coefficient
/// matrix, or a function sampled adaptively once per solve.
#[derive(Clone)]
pub enum Rhs {
    Zero,
    Coeffs(Cheb2),
    Function(Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Zero => f.write_str("Rhs::Zero"),
            Rhs::Coeffs(c) => write!(f, "Rhs::Coeffs({} x {})", c.ny(), c.nx()),
            Rhs::Function(_) => f.write_str("Rhs::Function(..)"),
        }
    }
}

impl Rhs {
    /// The oversampled master coefficient matrix, computed once per solve.
    pub(crate) fn master(
        &self,
        xinterval: Interval,
        yinterval: Interval,
        tol: f64,
    ) -> Result<Cheb2, PdeError> {
        match self {
            Rhs::Zero => Ok(Cheb2::constant(Complex64::ZERO, xinterval, yinterval)),
            Rhs::Coeffs(c) => {
                if c.xinterval() != xinterval || c.yinterval() != yinterval {
                    return Err(PdeError::InvalidProblem {
                        detail: "right-hand side is defined on a different rectangle".into(),
                    });
                }
                Ok(c.clone())
            }
            Rhs::Function(f) => {
                let opts = AdaptiveOptions { tol, ..AdaptiveOptions::default() };
                Ok(interp2_adaptive(|x, y| f(x, y), xinterval, yinterval, &opts)?)
            }
        }
    }
}

/// Whether the even/odd mode decoupling is attempted when the operator and
/// boundary conditions allow it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityMode {
    Auto,
    Off,
}

/// A linear PDE on a rectangle with boundary constraints.
#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub(crate) operator: CoeffArray,
    pub(crate) bcs: Vec<BcSpec>,
    pub(crate) rhs: Rhs,
    pub(crate) tol: f64,
    pub(crate) rank_tol: f64,
    pub(crate) compat_tol: f64,
    pub(crate) start_n: usize,
    pub(crate) max_n: usize,
    pub(crate) max_bytes: usize,
    pub(crate) parity: ParityMode,
    pub(crate) threads: usize,
}

impl PdeProblem {
    /// A problem with default tolerances: resolution tail 1e-13, splitting
    /// rank 1e-12, grid sequence 9, 17, 33, ... capped at 2049 per dimension.
    pub fn new(operator: CoeffArray, bcs: Vec<BcSpec>, rhs: Rhs) -> Result<Self, PdeError> {
        if operator.is_empty() {
            return Err(PdeError::InvalidProblem { detail: "operator has no terms".into() });
        }
        Ok(Self {
            operator,
            bcs,
            rhs,
            tol: 1e-13,
            rank_tol: separable::DEFAULT_RANK_TOL,
            compat_tol: sylvester::COMPAT_TOL,
            start_n: 9,
            max_n: 2049,
            max_bytes: 3 << 30,
            parity: ParityMode::Auto,
            threads: 1,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_rank_tolerance(mut self, tau: f64) -> Self {
        self.rank_tol = tau;
        self
    }

    pub fn with_compatibility_tolerance(mut self, tol: f64) -> Self {
        self.compat_tol = tol;
        self
    }

    pub fn with_degree_cap(mut self, max_n: usize) -> Self {
        self.max_n = max_n;
        self
    }

    pub fn with_start(mut self, start_n: usize) -> Self {
        self.start_n = start_n.max(3);
        self
    }

    pub fn with_memory_cap(mut self, max_bytes: usize) -> Self {
        self.max_bytes = max_bytes;
        self
    }

    /// Caps how many parity subproblems may be solved concurrently per
    /// refinement step. The default of one keeps everything on the calling
    /// thread; results are identical either way.
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_parity(mut self, parity: ParityMode) -> Self {
        self.parity = parity;
        self
    }

    pub fn operator(&self) -> &CoeffArray {
        &self.operator
    }

    pub fn bcs(&self) -> &[BcSpec] {
        &self.bcs
    }

    pub fn xinterval(&self) -> Interval {
        self.operator.xinterval()
    }

    pub fn yinterval(&self) -> Interval {
        self.operator.yinterval()
    }
}

/// One pass of the adaptive loop.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub nx: usize,
    pub ny: usize,
    pub subproblems: usize,
    pub path: SolvePath,
    pub equation_residual: Option<f64>,
    pub constraint_residual_y: Option<f64>,
    pub constraint_residual_x: Option<f64>,
    pub x_resolved: bool,
    pub y_resolved: bool,
}

/// Everything the solver learned on the way to the answer.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub final_nx: usize,
    pub final_ny: usize,
    pub rank: usize,
    pub steps: Vec<StepReport>,
    pub compat_defect: f64,
    pub path: SolvePath,
    pub subproblems: usize,
    pub resolved: (bool, bool),
    pub wall_time: Duration,
}

/// A solved PDE: the coefficient representation of `u` plus diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Cheb2,
    pub diagnostics: Diagnostics,
}
