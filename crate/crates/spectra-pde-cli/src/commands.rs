//! Subcommand implementations. Each returns `Ok(())` after writing its
//! output to stdout or `--out`, or a `CliError` whose code becomes the
//! process exit status.

use std::path::{Path, PathBuf};

use cheb_core::{interp1_adaptive, AdaptiveOptions, Cheb1, Interval};
use num_complex::Complex64;
use ode1d::{solve_ode, Constraint, OdeProblem};
use pde_solver::solve_pde;
use pdo_frontend::{extract_coeffs, parse_pdo, parse_point_constraint, DROP_TOL};
use separable::splitting_rank;
use ultra_ops::LinearODO;

use crate::error::CliError;
use crate::resultdoc::{
    fmt_f64, read_result, render_result, write_sidecar, MatrixPayload, EMBED_LIMIT, SCHEMA_TAG,
};
use crate::schema::{Overrides, ProblemFile};

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::schema(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub struct SolveArgs {
    pub problem: PathBuf,
    pub out: Option<PathBuf>,
    pub overrides: Overrides,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.problem)
        .map_err(|e| CliError::schema(format!("{}: {e}", args.problem.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| CliError::schema(format!("problem file: {e}")))?;
    let domain = file.domain;
    let problem = file.into_problem(&args.overrides)?;
    let solution = solve_pde(&problem)?;
    let (ny, nx) = solution.u.coeffs().dim();
    let payload = match (&args.out, ny * nx > EMBED_LIMIT) {
        (Some(out), true) => {
            let sidecar = out.with_extension("bin");
            write_sidecar(&sidecar, solution.u.coeffs())?;
            let name = sidecar
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .ok_or_else(|| CliError::schema("--out must name a file"))?;
            MatrixPayload::Sidecar(name)
        }
        _ => MatrixPayload::Embed,
    };
    let doc = render_result(&solution, domain, &payload);
    emit(args.out.as_deref(), &doc)
}

#[derive(Copy, Clone)]
pub enum EvalFormat {
    Csv,
    Json,
}

pub struct EvalArgs {
    pub result: PathBuf,
    pub grid: Option<String>,
    pub points: Option<PathBuf>,
    pub format: EvalFormat,
    pub out: Option<PathBuf>,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let stored = read_result(&args.result)?;
    let pts = match (&args.grid, &args.points) {
        (Some(g), None) => grid_points(g, stored.domain)?,
        (None, Some(p)) => read_points(p)?,
        (None, None) => {
            return Err(CliError::schema("eval: provide --grid NXxNY or --points FILE"))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::schema("eval: --grid and --points are mutually exclusive"))
        }
    };
    let [a, b, c, d] = stored.domain;
    for (idx, &(x, y)) in pts.iter().enumerate() {
        if x < a || x > b || y < c || y > d {
            return Err(CliError::unresolved(format!(
                "point {idx} at ({x}, {y}) lies outside the domain [{a}, {b}] x [{c}, {d}]"
            )));
        }
    }
    let values = pts
        .iter()
        .map(|&(x, y)| stored.u.eval(x, y))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::unresolved(e.to_string()))?;
    let text = match args.format {
        EvalFormat::Csv => render_csv(&pts, &values),
        EvalFormat::Json => render_points_json(&pts, &values),
    };
    emit(args.out.as_deref(), &text)
}

pub fn parse_grid(spec: &str) -> Result<(usize, usize), CliError> {
    let norm: String = spec
        .chars()
        .map(|ch| if ch == 'X' || ch == '\u{d7}' { 'x' } else { ch })
        .collect();
    let parts: Vec<&str> = norm.split('x').collect();
    let bad = || CliError::schema(format!("--grid expects NXxNY, got {spec:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let nx: usize = parts[0].trim().parse().map_err(|_| bad())?;
    let ny: usize = parts[1].trim().parse().map_err(|_| bad())?;
    if nx == 0 || ny == 0 {
        return Err(CliError::schema("--grid sizes must be at least 1"));
    }
    Ok((nx, ny))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    let mut out: Vec<f64> = (0..n)
        .map(|j| a + (b - a) * j as f64 / (n - 1) as f64)
        .collect();
    // Pin the endpoints: rounding must not push them outside the domain.
    out[0] = a;
    out[n - 1] = b;
    out
}

fn grid_points(spec: &str, domain: [f64; 4]) -> Result<Vec<(f64, f64)>, CliError> {
    let (nx, ny) = parse_grid(spec)?;
    let xs = linspace(domain[0], domain[1], nx);
    let ys = linspace(domain[2], domain[3], ny);
    let mut pts = Vec::with_capacity(nx * ny);
    for &y in &ys {
        for &x in &xs {
            pts.push((x, y));
        }
    }
    Ok(pts)
}

fn read_points(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |field: Option<&str>| -> Result<f64, CliError> {
            field
                .map(str::trim)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::schema(format!(
                        "{}:{}: expected \"x,y\", got {line:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
        };
        let x = parse(fields.next())?;
        let y = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(CliError::schema(format!(
                "{}:{}: expected \"x,y\", got {line:?}",
                path.display(),
                lineno + 1
            )));
        }
        pts.push((x, y));
    }
    if pts.is_empty() {
        return Err(CliError::schema(format!(
            "{}: no points found",
            path.display()
        )));
    }
    Ok(pts)
}

fn render_csv(pts: &[(f64, f64)], values: &[Complex64]) -> String {
    let mut s = String::from("x,y,re,im\n");
    for (&(x, y), v) in pts.iter().zip(values) {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(v.re),
            fmt_f64(v.im)
        ));
    }
    s
}

fn render_points_json(pts: &[(f64, f64)], values: &[Complex64]) -> String {
    let mut s = String::from("{\n");
    s.push_str(&format!("\"schema\": \"{SCHEMA_TAG}\",\n"));
    s.push_str("\"points\": [\n");
    let total = pts.len();
    for (idx, (&(x, y), v)) in pts.iter().zip(values).enumerate() {
        s.push_str(&format!(
            "[{}, {}, {}, {}]",
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(v.re),
            fmt_f64(v.im)
        ));
        s.push_str(if idx + 1 < total { ",\n" } else { "\n" });
    }
    s.push_str("]\n}\n");
    s
}

pub struct RankArgs {
    pub operator: String,
    pub rank_tol: f64,
}

pub fn cmd_rank(args: &RankArgs) -> Result<(), CliError> {
    let expr = parse_pdo(&args.operator)?;
    let square = Interval::new(-1.0, 1.0).expect("unit interval is valid");
    let coeffs = extract_coeffs(&expr, square, square, DROP_TOL)?;
    let rep = splitting_rank(&coeffs, args.rank_tol).map_err(|e| CliError::ill_posed(e.to_string()))?;
    let mut s = format!("splitting rank: {}\n", rep.k());
    let svs: Vec<String> = rep
        .singular_values()
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect();
    s.push_str(&format!("singular values: {}\n", svs.join(", ")));
    for (idx, term) in rep.terms().iter().enumerate() {
        s.push_str(&format!(
            "term {}: y-order {}, x-order {}\n",
            idx + 1,
            term.ode_y.order(),
            term.ode_x.order()
        ));
    }
    emit(None, &s)
}

pub struct OdeArgs {
    pub op: String,
    pub bc: Vec<String>,
    pub rhs: String,
    pub domain: Option<String>,
    pub tol: Option<f64>,
    pub max_n: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn cmd_ode(args: &OdeArgs) -> Result<(), CliError> {
    if args.bc.is_empty() {
        return Err(CliError::schema("ode: at least one --bc constraint is required"));
    }
    let (a, b) = parse_domain_1d(args.domain.as_deref().unwrap_or("-1,1"))?;
    let xint = Interval::new(a, b).map_err(|e| CliError::schema(e.to_string()))?;
    let operator = ode_operator(&args.op, xint)?;
    let mut constraints = Vec::with_capacity(args.bc.len());
    let mut values = Vec::with_capacity(args.bc.len());
    for text in &args.bc {
        let pc = parse_point_constraint(text)?;
        if pc.point < a || pc.point > b {
            return Err(CliError::schema(format!(
                "constraint point {} lies outside [{a}, {b}]",
                pc.point
            )));
        }
        constraints.push(Constraint::PointFunctional { x: pc.point, terms: pc.terms });
        values.push(pc.value);
    }
    let tol = args.tol.unwrap_or(1e-14);
    let rhs = ode_rhs(&args.rhs, xint, tol)?;
    let problem = OdeProblem::new(operator, constraints, values, rhs)?;
    let opts = ode1d::SolveOptions {
        tol,
        max_degree: args.max_n.unwrap_or(1 << 17),
        ..Default::default()
    };
    let sol = solve_ode(&problem, &opts)?;
    let mut s = format!("final degree: {}\n", sol.u.degree());
    s.push_str(&format!("discretization: {}\n", sol.diagnostics.final_n));
    s.push_str(&format!("residual: {:.3e}\n", sol.diagnostics.residual));
    s.push_str(&format!("coefficients ({}):\n", sol.u.len()));
    for v in sol.u.coeffs() {
        s.push_str(&format!("{} {}\n", fmt_f64(v.re), fmt_f64(v.im)));
    }
    emit(args.out.as_deref(), &s)
}

fn parse_domain_1d(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::schema(format!("--domain expects \"a,b\" with a < b, got {text:?}"));
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn ode_operator(text: &str, xint: Interval) -> Result<LinearODO, CliError> {
    let expr = parse_pdo(text)?;
    let dummy = Interval::new(-1.0, 1.0).expect("unit interval is valid");
    let coeffs = extract_coeffs(&expr, xint, dummy, DROP_TOL)?;
    let mut terms = Vec::new();
    for ((dy, dx), c2) in coeffs.iter() {
        if dy != 0 {
            return Err(CliError::schema("ode: derivatives in y are not allowed"));
        }
        if c2.ny() != 1 {
            return Err(CliError::schema("ode: coefficients must involve x only"));
        }
        let row: Vec<Complex64> = c2.coeffs().row(0).to_vec();
        let coeff = Cheb1::new(row, xint).map_err(CliError::from)?;
        terms.push((dx, coeff));
    }
    LinearODO::new(terms, xint).map_err(|e| CliError::ill_posed(e.to_string()))
}

fn ode_rhs(text: &str, xint: Interval, tol: f64) -> Result<Cheb1, CliError> {
    let expr = parse_pdo(text.trim())?;
    if expr.contains_u() {
        return Err(CliError::schema("ode: rhs must not reference u"));
    }
    if let Some(v) = expr.const_value() {
        return Ok(Cheb1::constant(v, xint));
    }
    if expr.depends_on(pdo_frontend::Axis::Y) {
        return Err(CliError::schema("ode: rhs must involve x only"));
    }
    let opts = AdaptiveOptions { tol, ..Default::default() };
    let f = |x: f64| expr.eval_scalar(x, 0.0).unwrap_or(Complex64::new(f64::NAN, 0.0));
    interp1_adaptive(f, xint, &opts).map_err(CliError::from)
}
