//! spectra-pde: solve linear PDEs with variable coefficients on rectangles
//! from the command line. `solve` runs the adaptive spectral solver on a
//! JSON problem file, `eval` samples a stored result, `rank` reports an
//! operator's splitting rank, and `ode` handles 1D boundary-value problems.
//!
//! Exit codes: 0 success, 2 not resolved within limits (or evaluation
//! outside the domain), 3 ill-posed problem data, 4 malformed input.

mod commands;
mod error;
mod resultdoc;
mod schema;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{cmd_eval, cmd_ode, cmd_rank, cmd_solve, EvalArgs, EvalFormat, OdeArgs, RankArgs, SolveArgs};
use error::{CliError, EXIT_SCHEMA};
use schema::Overrides;

#[derive(Parser)]
#[command(
    name = "spectra-pde",
    version,
    about = "Spectral solver for linear PDEs with variable coefficients on rectangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the PDE described by a JSON problem file.
    Solve {
        /// Path to the problem file.
        problem: PathBuf,
        /// Write the result document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the problem file's resolution tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the problem file's degree cap.
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        /// Override the problem file's splitting-rank tolerance.
        #[arg(long = "rank-tol")]
        rank_tol: Option<f64>,
    },
    /// Evaluate a stored result document on a grid or a point list.
    Eval {
        /// Path to a result document produced by `solve`.
        result: PathBuf,
        /// Uniform grid "NXxNY" over the stored domain.
        #[arg(long)]
        grid: Option<String>,
        /// File with one "x,y" point per line.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the samples here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the splitting rank of an operator.
    Rank {
        /// Operator text, e.g. "laplacian(u) + 1000*u".
        operator: String,
        /// Singular-value cutoff for the rank decision.
        #[arg(long = "rank-tol")]
        rank_tol: Option<f64>,
    },
    /// Solve a 1D boundary-value problem on an interval.
    Ode {
        /// Operator text in x only, e.g. "0.001*diff(u,x,2) + x*diff(u,x,1)".
        #[arg(long)]
        op: String,
        /// Point constraint like "u(-1) = 1"; repeat for each condition.
        #[arg(long)]
        bc: Vec<String>,
        /// Right-hand side as a function of x; "0" means zero.
        #[arg(long, default_value = "0")]
        rhs: String,
        /// Interval "a,b"; defaults to "-1,1".
        #[arg(long)]
        domain: Option<String>,
        /// Resolution tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Degree cap.
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{}", line.trim_start_matches("error: "));
            std::process::exit(EXIT_SCHEMA);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", e.message);
        std::process::exit(e.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Solve { problem, out, tol, max_n, rank_tol } => cmd_solve(&SolveArgs {
            problem,
            out,
            overrides: Overrides { tol, max_n, rank_tol, threads },
        }),
        Command::Eval { result, grid, points, format, out } => cmd_eval(&EvalArgs {
            result,
            grid,
            points,
            format: match format {
                Format::Csv => EvalFormat::Csv,
                Format::Json => EvalFormat::Json,
            },
            out,
        }),
        Command::Rank { operator, rank_tol } => cmd_rank(&RankArgs {
            operator,
            rank_tol: rank_tol.unwrap_or(separable::DEFAULT_RANK_TOL),
        }),
        Command::Ode { op, bc, rhs, domain, tol, max_n, out } => {
            cmd_ode(&OdeArgs { op, bc, rhs, domain, tol, max_n, out })
        }
    }
}

/// SPECTRA_PDE_THREADS caps how many boundary subproblems the solver works
/// on concurrently; unset means sequential. Results are identical either way.
fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("SPECTRA_PDE_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::schema(format!(
                "SPECTRA_PDE_THREADS must be a positive integer, got {s:?}"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(CliError::schema(format!("SPECTRA_PDE_THREADS: {e}"))),
    }
}
