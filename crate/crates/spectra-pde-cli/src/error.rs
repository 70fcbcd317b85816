//! Exit-code policy shared by every subcommand: 0 success, 2 not resolved
//! within the configured limits, 3 mathematically ill-posed problem data,
//! 4 malformed input (bad JSON, unknown keys, parse errors, missing flags).
//! Each failure carries exactly one line of text for stderr.

use cheb_core::ChebError;
use ode1d::OdeError;
use pde_solver::PdeError;
use pdo_frontend::PdoError;
use sylvester::SylError;

pub const EXIT_UNRESOLVED: i32 = 2;
pub const EXIT_ILL_POSED: i32 = 3;
pub const EXIT_SCHEMA: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self { code: EXIT_SCHEMA, message: message.into() }
    }

    pub fn ill_posed(message: impl Into<String>) -> Self {
        Self { code: EXIT_ILL_POSED, message: message.into() }
    }

    pub fn unresolved(message: impl Into<String>) -> Self {
        Self { code: EXIT_UNRESOLVED, message: message.into() }
    }
}

impl From<PdoError> for CliError {
    fn from(e: PdoError) -> Self {
        Self::schema(e.to_string())
    }
}

impl From<PdeError> for CliError {
    fn from(e: PdeError) -> Self {
        let code = match &e {
            PdeError::Unresolved { .. } => EXIT_UNRESOLVED,
            // Exhausting a resource limit is a capacity failure, not a
            // defect in the problem statement.
            PdeError::SolverAt { source: SylError::ResourceLimit { .. }, .. } => EXIT_UNRESOLVED,
            PdeError::Frontend(_) => EXIT_SCHEMA,
            _ => EXIT_ILL_POSED,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<OdeError> for CliError {
    fn from(e: OdeError) -> Self {
        let code = match &e {
            OdeError::Unresolved { .. } => EXIT_UNRESOLVED,
            OdeError::IllPosed { .. } | OdeError::Operator(_) => EXIT_ILL_POSED,
            _ => EXIT_SCHEMA,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<ChebError> for CliError {
    fn from(e: ChebError) -> Self {
        let code = match &e {
            ChebError::Unresolved { .. } => EXIT_UNRESOLVED,
            _ => EXIT_SCHEMA,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::schema(e.to_string())
    }
}
