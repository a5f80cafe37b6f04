//! Text formats: solution CSV and JSON sidecar, candidate files, rate
//! reports, and figure data.
//!
//! All numbers are written with 17 significant digits so a value read back is
//! bit-identical to the one written.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::rate_lab::RateReport;
use crate::viscosity_check::{catalog, PiecewisePoly};
use crate::vv_solver::ViscousSolution;

pub const SOLUTION_HEADER: &str = "r,p_eps,u_eps,u_limit";

/// Number of samples in each figure file.
pub const FIGURE_SAMPLES: usize = 2001;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn solution_csv(sol: &ViscousSolution) -> String {
    let limit = sol.limit_values();
    let mut out = String::with_capacity(80 * sol.grid.len());
    out.push_str(SOLUTION_HEADER);
    out.push('\n');
    for i in 0..sol.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(sol.grid[i]),
            num(sol.p_values[i]),
            num(sol.u_values[i]),
            num(limit[i])
        );
    }
    out
}

/// Metadata written next to a solution CSV. `stamp` adds a `created_unix`
/// field; without it the sidecar is a pure function of the inputs.
pub fn solution_sidecar(sol: &ViscousSolution, stamp: Option<u64>) -> serde_json::Value {
    let mut v = json!({
        "epsilon": sol.spec.epsilon,
        "dim": sol.spec.dim,
        "potential": sol.spec.potential.label(),
        "panel_order": sol.meta.panel_order,
        "t_cutoff": sol.meta.t_cutoff,
        "max_panels": sol.meta.max_panels,
        "grid_size": sol.grid.len(),
        "simpson_spacing": sol.meta.simpson_spacing,
        "simpson_intervals": sol.meta.simpson_intervals,
        "estimated_error": sol.meta.estimated_error,
    });
    if let Some(t) = stamp {
        v["created_unix"] = json!(t);
    }
    v
}

/// Columns of a solution CSV read back from disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionTable {
    pub r: Vec<f64>,
    pub p_eps: Vec<f64>,
    pub u_eps: Vec<f64>,
    pub u_limit: Vec<f64>,
}

pub fn parse_solution_csv(text: &str) -> Result<SolutionTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SOLUTION_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected header `{SOLUTION_HEADER}`") }),
    }
    let mut t = SolutionTable::default();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        if fields.len() != 4 {
            return Err(Error::Parse { line: i + 1, message: format!("expected 4 fields, got {}", fields.len()) });
        }
        t.r.push(fields[0]);
        t.p_eps.push(fields[1]);
        t.u_eps.push(fields[2]);
        t.u_limit.push(fields[3]);
    }
    Ok(t)
}

/// Parse a candidate file: `pp <K>` followed by `K` lines `x_lo x_hi c0 c1 c2`.
pub fn parse_candidate(text: &str) -> Result<PiecewisePoly> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (head_line, head) = lines.next().ok_or(Error::Parse { line: 1, message: "empty candidate file".into() })?;
    let count = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["pp", k] => k
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Parse { line: head_line, message: format!("bad piece count {k:?}") })?,
        _ => return Err(Error::Parse { line: head_line, message: format!("expected `pp <K>`, got {head:?}") }),
    };
    let mut breaks = Vec::with_capacity(count + 1);
    let mut coeffs = Vec::with_capacity(count);
    let mut last_line = head_line;
    for (line, l) in lines {
        if coeffs.len() == count {
            return Err(Error::Parse { line, message: format!("more than {count} pieces") });
        }
        let f: Vec<f64> = l
            .split_whitespace()
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse { line, message: format!("non-numeric field in {l:?}") })?;
        if f.len() != 5 {
            return Err(Error::Parse { line, message: format!("expected `x_lo x_hi c0 c1 c2`, got {} fields", f.len()) });
        }
        match breaks.last() {
            None => breaks.push(f[0]),
            Some(&prev) if prev == f[0] => {}
            Some(&prev) => {
                return Err(Error::Parse { line, message: format!("piece starts at {} but previous ended at {prev}", f[0]) })
            }
        }
        if !(f[1] > f[0]) {
            return Err(Error::Parse { line, message: format!("empty piece [{}, {}]", f[0], f[1]) });
        }
        breaks.push(f[1]);
        coeffs.push([f[2], f[3], f[4]]);
        last_line = line;
    }
    if coeffs.len() != count {
        return Err(Error::Parse { line: last_line, message: format!("expected {count} pieces, got {}", coeffs.len()) });
    }
    PiecewisePoly::new(breaks, coeffs).map_err(|e| Error::Parse { line: last_line, message: e.to_string() })
}

pub fn candidate_text(u: &PiecewisePoly) -> String {
    let mut out = format!("pp {}\n", u.coeffs().len());
    for (lo, hi, c) in u.pieces() {
        let _ = writeln!(out, "{} {} {} {} {}", num(lo), num(hi), num(c[0]), num(c[1]), num(c[2]));
    }
    out
}

pub fn report_json(report: &RateReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// One row per ε: sup, uniform and pointwise errors plus the bound constant.
pub fn report_csv(report: &RateReport) -> String {
    let mut out = String::from("epsilon,sup_error,uniform_error,bound_constant");
    for r in &report.pointwise_radii {
        let _ = write!(out, ",error_at_{r}");
    }
    out.push('\n');
    for i in 0..report.epsilons.len() {
        let _ = write!(
            out,
            "{},{},{},{}",
            num(report.epsilons[i]),
            num(report.sup_errors[i]),
            num(report.uniform_errors[i]),
            num(report.bound_constants[i])
        );
        for e in &report.pointwise_errors[i] {
            let _ = write!(out, ",{}", num(*e));
        }
        out.push('\n');
    }
    out
}

/// The four functions of the worked examples, keyed by output name.
pub fn figure_functions() -> Vec<(&'static str, PiecewisePoly)> {
    vec![
        ("figure-u", catalog::tent()),
        ("figure-f", catalog::double_vee()),
        ("figure-u1", catalog::u1()),
        ("figure-u2", catalog::u2()),
    ]
}

/// `n` evenly spaced samples of `u` over its domain, endpoints included.
pub fn sample(u: &PiecewisePoly, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = u.domain();
    let last = (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / last })
        .collect();
    let ys = xs.iter().map(|&x| u.eval(x)).collect();
    (xs, ys)
}

pub fn xy_csv(xs: &[f64], ys: &[f64]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{},{}", num(*x), num(*y));
    }
    out
}

/// Minimal polyline: one `x,y` pair per line, usable as an SVG `points` list.
pub fn polyline(xs: &[f64], ys: &[f64]) -> String {
    let mut out = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

/// Write `contents` to `path` via a temporary file in the same directory and
/// a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Invalid(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
