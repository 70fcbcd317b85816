//! Result documents: a small JSON schema carrying the solved coefficient
//! matrix plus solve diagnostics. Every float is written with 17 significant
//! digits so the parsed value reproduces the original bit pattern; matrices
//! beyond a size threshold move to a binary sidecar file instead of bloating
//! the JSON. Wall time sits in its own trailing block so consumers can hash
//! the rest of the document for reproducibility checks.

use std::path::Path;

use cheb_core::{Cheb2, Interval};
use ndarray::Array2;
use num_complex::Complex64;
use pde_solver::Solution;
use sylvester::SolvePath;

use crate::error::CliError;

pub const SCHEMA_TAG: &str = "spectra-pde/1";
/// Coefficient matrices with at most this many entries are embedded.
pub const EMBED_LIMIT: usize = 1_000_000;
/// Sidecar layout: this magic, then row-major little-endian (re, im) f64 pairs.
pub const SIDECAR_MAGIC: &[u8; 8] = b"SPECPDE1";

/// One leading digit plus 16 more: 17 significant digits, enough for any
/// f64 to survive a print/parse round trip exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_f64(v),
        None => "null".to_owned(),
    }
}

pub fn path_name(path: SolvePath) -> &'static str {
    match path {
        SolvePath::K1 => "k1",
        SolvePath::K2 => "k2",
        SolvePath::Kron { .. } => "kge3",
    }
}

/// Where the coefficient matrix lives in the rendered document.
pub enum MatrixPayload {
    Embed,
    /// Basename of a sidecar file next to the result document.
    Sidecar(String),
}

pub fn render_result(sol: &Solution, domain: [f64; 4], payload: &MatrixPayload) -> String {
    let coeffs = sol.u.coeffs();
    let (ny, nx) = coeffs.dim();
    let d = &sol.diagnostics;
    let last = d.steps.last();
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str(&format!("\"schema\": \"{SCHEMA_TAG}\",\n"));
    s.push_str(&format!(
        "\"domain\": [{}, {}, {}, {}],\n",
        fmt_f64(domain[0]),
        fmt_f64(domain[1]),
        fmt_f64(domain[2]),
        fmt_f64(domain[3])
    ));
    s.push_str(&format!("\"ny\": {ny},\n"));
    s.push_str(&format!("\"nx\": {nx},\n"));
    s.push_str("\"diagnostics\": {\n");
    s.push_str(&format!("\"final_nx\": {},\n", d.final_nx));
    s.push_str(&format!("\"final_ny\": {},\n", d.final_ny));
    s.push_str(&format!("\"splitting_rank\": {},\n", d.rank));
    s.push_str(&format!("\"path\": \"{}\",\n", path_name(d.path)));
    s.push_str(&format!("\"subproblems\": {},\n", d.subproblems));
    s.push_str(&format!(
        "\"equation_residual\": {},\n",
        fmt_opt(last.and_then(|r| r.equation_residual))
    ));
    s.push_str(&format!(
        "\"constraint_residual_y\": {},\n",
        fmt_opt(last.and_then(|r| r.constraint_residual_y))
    ));
    s.push_str(&format!(
        "\"constraint_residual_x\": {},\n",
        fmt_opt(last.and_then(|r| r.constraint_residual_x))
    ));
    s.push_str(&format!(
        "\"compatibility_defect\": {},\n",
        fmt_f64(d.compat_defect)
    ));
    s.push_str(&format!("\"resolved\": {},\n", d.resolved.0 && d.resolved.1));
    let steps: Vec<String> = d
        .steps
        .iter()
        .map(|r| format!("[{}, {}]", r.nx, r.ny))
        .collect();
    s.push_str(&format!("\"steps\": [{}]\n", steps.join(", ")));
    s.push_str("},\n");
    match payload {
        MatrixPayload::Embed => {
            s.push_str("\"x\": [\n");
            let total = ny * nx;
            for (idx, v) in coeffs.iter().enumerate() {
                s.push_str(&format!("[{}, {}]", fmt_f64(v.re), fmt_f64(v.im)));
                s.push_str(if idx + 1 < total { ",\n" } else { "\n" });
            }
            s.push_str("],\n");
        }
        MatrixPayload::Sidecar(name) => {
            s.push_str(&format!("\"x_sidecar\": {},\n", json_string(name)));
        }
    }
    s.push_str(&format!(
        "\"timing\": {{\"wall_ms\": {}}}\n",
        d.wall_time.as_millis()
    ));
    s.push_str("}\n");
    s
}

fn json_string(v: &str) -> String {
    serde_json::to_string(v).expect("strings always serialize")
}

pub fn write_sidecar(path: &Path, coeffs: &Array2<Complex64>) -> Result<(), CliError> {
    let (ny, nx) = coeffs.dim();
    let mut buf = Vec::with_capacity(SIDECAR_MAGIC.len() + ny * nx * 16);
    buf.extend_from_slice(SIDECAR_MAGIC);
    for v in coeffs.iter() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    std::fs::write(path, buf)
        .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

pub fn read_sidecar(path: &Path, ny: usize, nx: usize) -> Result<Array2<Complex64>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let expected = SIDECAR_MAGIC.len() + ny * nx * 16;
    if bytes.len() < SIDECAR_MAGIC.len() || &bytes[..SIDECAR_MAGIC.len()] != SIDECAR_MAGIC {
        return Err(CliError::schema(format!(
            "{}: not a coefficient sidecar (bad magic)",
            path.display()
        )));
    }
    if bytes.len() != expected {
        return Err(CliError::schema(format!(
            "{}: expected {expected} bytes for a {ny} x {nx} matrix, found {}",
            path.display(),
            bytes.len()
        )));
    }
    let mut arr = Array2::zeros((ny, nx));
    for (idx, chunk) in bytes[SIDECAR_MAGIC.len()..].chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(chunk[..8].try_into().expect("chunk is 16 bytes"));
        let im = f64::from_le_bytes(chunk[8..].try_into().expect("chunk is 16 bytes"));
        arr[(idx / nx, idx % nx)] = Complex64::new(re, im);
    }
    Ok(arr)
}

pub struct StoredSolution {
    pub u: Cheb2,
    pub domain: [f64; 4],
}

pub fn read_result(path: &Path) -> Result<StoredSolution, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::schema(format!("result document: {e}")))?;
    if doc.get("schema").and_then(|v| v.as_str()) != Some(SCHEMA_TAG) {
        return Err(CliError::schema(format!(
            "result document: expected \"schema\": {SCHEMA_TAG:?}"
        )));
    }
    let domain = read_domain(&doc)?;
    let ny = read_size(&doc, "ny")?;
    let nx = read_size(&doc, "nx")?;
    let arr = if let Some(x) = doc.get("x") {
        read_embedded(x, ny, nx)?
    } else if let Some(name) = doc.get("x_sidecar").and_then(|v| v.as_str()) {
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        read_sidecar(&dir.join(name), ny, nx)?
    } else {
        return Err(CliError::schema(
            "result document: missing \"x\" or \"x_sidecar\"",
        ));
    };
    let xint = Interval::new(domain[0], domain[1]).map_err(|e| CliError::schema(e.to_string()))?;
    let yint = Interval::new(domain[2], domain[3]).map_err(|e| CliError::schema(e.to_string()))?;
    let u = Cheb2::new(arr, xint, yint).map_err(|e| CliError::schema(e.to_string()))?;
    Ok(StoredSolution { u, domain })
}

fn read_domain(doc: &serde_json::Value) -> Result<[f64; 4], CliError> {
    let arr = doc
        .get("domain")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::schema("result document: missing \"domain\""))?;
    if arr.len() != 4 {
        return Err(CliError::schema("result document: \"domain\" must have 4 entries"));
    }
    let mut out = [0.0; 4];
    for (slot, v) in out.iter_mut().zip(arr) {
        *slot = v
            .as_f64()
            .ok_or_else(|| CliError::schema("result document: \"domain\" entries must be numbers"))?;
    }
    Ok(out)
}

fn read_size(doc: &serde_json::Value, key: &str) -> Result<usize, CliError> {
    doc.get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .filter(|&v| v >= 1)
        .ok_or_else(|| CliError::schema(format!("result document: missing positive integer {key:?}")))
}

fn read_embedded(x: &serde_json::Value, ny: usize, nx: usize) -> Result<Array2<Complex64>, CliError> {
    let rows = x
        .as_array()
        .ok_or_else(|| CliError::schema("result document: \"x\" must be an array of [re, im] pairs"))?;
    if rows.len() != ny * nx {
        return Err(CliError::schema(format!(
            "result document: \"x\" must hold ny*nx = {} pairs, found {}",
            ny * nx,
            rows.len()
        )));
    }
    let mut arr = Array2::zeros((ny, nx));
    for (idx, pair) in rows.iter().enumerate() {
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CliError::schema("result document: each \"x\" entry must be [re, im]"))?;
        let re = pair[0]
            .as_f64()
            .ok_or_else(|| CliError::schema("result document: coefficient entries must be numbers"))?;
        let im = pair[1]
            .as_f64()
            .ok_or_else(|| CliError::schema("result document: coefficient entries must be numbers"))?;
        arr[(idx / nx, idx % nx)] = Complex64::new(re, im);
    }
    Ok(arr)
}
