//! Command-line front end: `solve`, `limit`, `verify`, `compare`, `rate`,
//! `zero-probe` and `examples`.
//!
//! Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage,
//! input or I/O error. Human-readable summaries go to stdout; data goes to
//! files.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io;
use crate::potential::{parse_potential, PotentialProfile, ZERO_TOL};
use crate::rate_lab::{self, DEFAULT_EPSILONS};
use crate::viscosity_check::{
    self, check_comparison, CheckOptions, Dirichlet, PiecewisePoly, Verdict, DEFAULT_TOL, SAMPLED_TOL,
};
use crate::vv_solver::{eval_limit, eval_u_eps, uniform_grid, ProblemSpec, DEFAULT_GRID};

/// Environment variable capping worker threads (`0` or unset: automatic).
pub const THREADS_ENV: &str = "EIKONAL_VV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "eikonal-vv", version, about = "Vanishing-viscosity solutions of the radial eikonal equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// `const:<c>`, `vee:<center>` or a potential file.
    #[arg(long, global = true)]
    pub potential: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: u32,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub epsilons: Vec<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long = "r-min", global = true, default_value_t = 0.1)]
    pub r_min: f64,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Record a creation timestamp in JSON sidecars.
    #[arg(long, global = true)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    SvgData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum CheckRole {
    Sub,
    Super,
    #[default]
    Solution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Boundary {
    #[default]
    Both,
    Right,
    Left,
    None,
}

impl From<Boundary> for Dirichlet {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Both => Dirichlet::Both,
            Boundary::Right => Dirichlet::Right,
            Boundary::Left => Dirichlet::Left,
            Boundary::None => Dirichlet::None,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sample p^ε and u^ε on a uniform grid; writes CSV and a JSON sidecar.
    Solve,
    /// Sample the limit u(r) = ∫_r^1 V.
    Limit,
    /// Check a candidate as a viscosity sub/super-solution of |u'| = f.
    Verify {
        /// Candidate file (`pp <K>` format) or a solution CSV.
        candidate: PathBuf,
        /// Right-hand side: `const:<c>`, `vee:<c>`, a candidate file or a potential file.
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value_t = CheckRole::Solution)]
        role: CheckRole,
        #[arg(long, value_enum, default_value_t = Boundary::Both)]
        boundary: Boundary,
        /// Mirror a candidate on [0, b] (and f) to [-b, b] before checking.
        #[arg(long)]
        reflect: bool,
    },
    /// Comparison on the zero set of f: if u ≤ v there, check u ≤ v everywhere.
    Compare {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        f: String,
        /// Zero set points; defaults to the exact zeros of f.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        zeros: Option<Vec<f64>>,
    },
    /// Convergence sweep over ε with rate and bound-constant fits.
    Rate,
    /// |u^ε(0) − u(0)| across ε.
    ZeroProbe,
    /// Data files for the four example plots (u, f, u1, u2 on [-1, 1]).
    Examples,
}

/// Parse `args` and run. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn configure_threads() {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).unwrap_or(0);
    if threads > 0 {
        // Fails only if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve => cmd_solve(g),
        Command::Limit => cmd_limit(g),
        Command::Verify { candidate, f, role, boundary, reflect } => {
            cmd_verify(g, candidate, f, *role, (*boundary).into(), *reflect)
        }
        Command::Compare { u, v, f, zeros } => cmd_compare(g, u, v, f, zeros.as_deref()),
        Command::Rate => cmd_rate(g),
        Command::ZeroProbe => cmd_zero_probe(g),
        Command::Examples => cmd_examples(g),
    }
}

/// `const:<c>`, `vee:<center>`, or a path to a potential file.
pub fn load_potential(source: &str) -> Result<PotentialProfile> {
    if source.starts_with("const:") || source.starts_with("vee:") {
        return PotentialProfile::from_shorthand(source);
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Error::Invalid(format!("cannot read potential file {source}: {e}")))?;
    parse_potential(&text)
}

fn require_potential(g: &GlobalArgs) -> Result<PotentialProfile> {
    let src = g
        .potential
        .as_deref()
        .ok_or_else(|| Error::Invalid("--potential is required".into()))?;
    load_potential(src)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn epsilon_list(g: &GlobalArgs) -> Vec<f64> {
    if !g.epsilons.is_empty() {
        g.epsilons.clone()
    } else if let Some(e) = g.epsilon {
        vec![e]
    } else {
        DEFAULT_EPSILONS.to_vec()
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn cmd_solve(g: &GlobalArgs) -> Result<i32> {
    let potential = require_potential(g)?;
    let eps = g.epsilon.ok_or_else(|| Error::Invalid("--epsilon is required".into()))?;
    if g.grid < 2 {
        return Err(Error::Invalid(format!("--grid must be at least 2, got {}", g.grid)));
    }
    let spec = ProblemSpec::new(potential, g.dim, eps)?;
    let sol = eval_u_eps(&spec, &uniform_grid(g.grid))?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("solution.csv"));
    let sidecar = io::solution_sidecar(&sol, g.stamp.then(unix_now));

    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            io::write_atomic(&out, io::solution_csv(&sol).as_bytes())?;
            io::write_atomic(&sidecar_path(&out), serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
        }
        Format::Json => {
            let mut doc = sidecar;
            doc["r"] = serde_json::json!(sol.grid);
            doc["p_eps"] = serde_json::json!(sol.p_values);
            doc["u_eps"] = serde_json::json!(sol.u_values);
            doc["u_limit"] = serde_json::json!(sol.limit_values());
            io::write_atomic(&out, serde_json::to_string_pretty(&doc)?.as_bytes())?;
        }
        Format::SvgData => {
            io::write_atomic(&out, io::polyline(&sol.grid, &sol.u_values).as_bytes())?;
            io::write_atomic(&sidecar_path(&out), serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
        }
    }
    let u0 = sol.u_values[0];
    let lim0 = spec.potential.integral(0.0, 1.0);
    println!(
        "solve {} n={} eps={:e}: u_eps(0) = {u0:.12}, u(0) = {lim0:.12}, |diff| = {:.3e}, quadrature error ~ {:.1e}",
        spec.potential.label(),
        spec.dim,
        spec.epsilon,
        (u0 - lim0).abs(),
        sol.meta.estimated_error
    );
    println!("wrote {}", out.display());
    Ok(0)
}

pub fn cmd_limit(g: &GlobalArgs) -> Result<i32> {
    let potential = require_potential(g)?;
    if g.grid < 2 {
        return Err(Error::Invalid(format!("--grid must be at least 2, got {}", g.grid)));
    }
    let grid = uniform_grid(g.grid);
    let values = grid.iter().map(|&r| eval_limit(&potential, r)).collect::<Result<Vec<_>>>()?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("limit.csv"));
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("r,u_limit\n");
            for (r, u) in grid.iter().zip(&values) {
                s.push_str(&format!("{r:.16e},{u:.16e}\n"));
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "potential": potential.label(),
            "r": grid,
            "u_limit": values,
        }))?,
        Format::SvgData => io::polyline(&grid, &values),
    };
    io::write_atomic(&out, body.as_bytes())?;
    println!("limit {}: u(0) = {:.12}", potential.label(), values[0]);
    println!("wrote {}", out.display());
    Ok(0)
}

/// Candidate from a `pp` file or a solution CSV (linear interpolation of
/// `u_eps`). The flag reports whether it came from sampled data.
fn load_candidate(path: &Path) -> Result<(PiecewisePoly, bool)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read candidate {}: {e}", path.display())))?;
    if text.trim_start().starts_with(io::SOLUTION_HEADER) {
        let table = io::parse_solution_csv(&text)?;
        return Ok((PiecewisePoly::interpolate_linear(&table.r, &table.u_eps)?, true));
    }
    Ok((io::parse_candidate(&text)?, false))
}

/// Right-hand side `f` on `domain`.
fn load_rhs(source: &str, domain: (f64, f64)) -> Result<PiecewisePoly> {
    let (a, b) = domain;
    if let Some(c) = source.strip_prefix("const:") {
        let c: f64 = c.parse().map_err(|_| Error::Invalid(format!("bad constant in {source:?}")))?;
        return PiecewisePoly::constant(a, b, c);
    }
    if let Some(c) = source.strip_prefix("vee:") {
        let c: f64 = c.parse().map_err(|_| Error::Invalid(format!("bad center in {source:?}")))?;
        let mut breaks = vec![a];
        let mut coeffs = Vec::new();
        if c > a && c < b {
            breaks.push(c);
            coeffs.push([c, -1.0, 0.0]);
            coeffs.push([-c, 1.0, 0.0]);
        } else if c >= b {
            coeffs.push([c, -1.0, 0.0]);
        } else {
            coeffs.push([-c, 1.0, 0.0]);
        }
        breaks.push(b);
        return PiecewisePoly::new(breaks, coeffs);
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Error::Invalid(format!("cannot read right-hand side {source}: {e}")))?;
    match io::parse_candidate(&text) {
        Ok(f) => Ok(f),
        Err(candidate_err) => match parse_potential(&text) {
            Ok(v) => Ok(PiecewisePoly::from_potential(&v)),
            Err(_) => Err(candidate_err),
        },
    }
}

fn write_verdict(g: &GlobalArgs, verdict: &Verdict) -> Result<()> {
    if let Some(out) = &g.out {
        io::write_atomic(out, serde_json::to_string_pretty(verdict)?.as_bytes())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn report_verdict(verdict: &Verdict) {
    let status = serde_json::to_value(verdict.status).unwrap_or_default();
    let role = serde_json::to_value(verdict.role).unwrap_or_default();
    let status = status.as_str().unwrap_or("?");
    let role = role.as_str().unwrap_or("?");
    match (verdict.witness_x, verdict.lhs, verdict.rhs) {
        (Some(x), Some(l), Some(r)) => println!(
            "{role}: {status} at x = {x} ({}: lhs {l} vs rhs {r}), margin {:.3e}",
            verdict.detail.as_deref().unwrap_or("inequality"),
            verdict.margin
        ),
        _ => println!("{role}: {status}, margin {:.3e}", verdict.margin),
    }
}

pub fn cmd_verify(
    g: &GlobalArgs,
    candidate: &Path,
    f_source: &str,
    role: CheckRole,
    dirichlet: Dirichlet,
    reflect: bool,
) -> Result<i32> {
    let (mut u, sampled) = load_candidate(candidate)?;
    let mut f = load_rhs(f_source, if reflect { (0.0, u.domain().1) } else { u.domain() })?;
    if reflect {
        u = u.evenly_reflect()?;
        if f.domain().0 == 0.0 {
            f = f.evenly_reflect()?;
        }
    }
    let tol = g.tol.unwrap_or(if sampled { SAMPLED_TOL } else { DEFAULT_TOL });
    let opts = CheckOptions { tol, dirichlet, ..CheckOptions::default() };
    let verdict = match role {
        CheckRole::Sub => viscosity_check::check_subsolution_with(&u, &f, &opts)?,
        CheckRole::Super => viscosity_check::check_supersolution_with(&u, &f, &opts)?,
        CheckRole::Solution => viscosity_check::check_solution_with(&u, &f, &opts)?,
    };
    report_verdict(&verdict);
    write_verdict(g, &verdict)?;
    Ok(if verdict.is_pass() { 0 } else { 1 })
}

pub fn cmd_compare(g: &GlobalArgs, u: &Path, v: &Path, f_source: &str, zeros: Option<&[f64]>) -> Result<i32> {
    let (u, sampled_u) = load_candidate(u)?;
    let (v, sampled_v) = load_candidate(v)?;
    let f = load_rhs(f_source, u.domain())?;
    let zero_set = match zeros {
        Some(z) => crate::potential::ZeroSet::new(z.to_vec(), vec![]),
        None => f.zero_set(ZERO_TOL),
    };
    let tol = g.tol.unwrap_or(if sampled_u || sampled_v { SAMPLED_TOL } else { DEFAULT_TOL });
    let verdict = check_comparison(&u, &v, &f, &zero_set, tol)?;
    report_verdict(&verdict);
    write_verdict(g, &verdict)?;
    Ok(if verdict.is_pass() { 0 } else { 1 })
}

pub fn cmd_rate(g: &GlobalArgs) -> Result<i32> {
    let potential = require_potential(g)?;
    let epsilons = epsilon_list(g);
    let report = rate_lab::run_convergence(&potential, g.dim, &epsilons, g.r_min, g.grid)?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("rate.json"));
    match g.format {
        Some(Format::Csv) => io::write_atomic(&out, io::report_csv(&report).as_bytes())?,
        _ => {
            io::write_atomic(&out, io::report_json(&report)?.as_bytes())?;
            io::write_atomic(&out.with_extension("csv"), io::report_csv(&report).as_bytes())?;
        }
    }
    println!("rate {} n={} r_min={}", report.potential, report.dim, report.r_min);
    println!("{:>12} {:>14} {:>14} {:>14}", "epsilon", "sup_error", "uniform_error", "bound_const");
    for i in 0..report.epsilons.len() {
        println!(
            "{:>12.4e} {:>14.6e} {:>14.6e} {:>14.6e}",
            report.epsilons[i], report.sup_errors[i], report.uniform_errors[i], report.bound_constants[i]
        );
    }
    match report.fitted_slope {
        Some(s) => println!("fitted_slope = {s:.6} (against log(eps|log eps|))"),
        None => println!("fitted_slope = n/a (fewer than 3 positive errors)"),
    }
    println!("max bound constant = {:.6e}", report.max_bound_constant());
    println!("wrote {}", out.display());
    Ok(0)
}

pub fn cmd_zero_probe(g: &GlobalArgs) -> Result<i32> {
    let potential = require_potential(g)?;
    let epsilons = epsilon_list(g);
    let probe = rate_lab::zero_point_probe(&potential, g.dim, &epsilons)?;
    println!("zero-probe {} n={}", probe.potential, probe.dim);
    for (e, err) in probe.epsilons.iter().zip(&probe.errors) {
        println!("{e:>12.4e} {err:>14.6e}");
    }
    match probe.empirical_slope {
        Some(s) => println!("empirical slope vs log eps = {s:.4}"),
        None => println!("empirical slope = n/a"),
    }
    println!("NOTE: {}", probe.note);
    if !probe.monotone_decreasing {
        println!("warning: errors are not monotonically decreasing across the sweep");
    }
    if let Some(out) = &g.out {
        io::write_atomic(out, serde_json::to_string_pretty(&probe)?.as_bytes())?;
        println!("wrote {}", out.display());
    }
    Ok(0)
}

pub fn cmd_examples(g: &GlobalArgs) -> Result<i32> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    fs::create_dir_all(&dir)?;
    let svg = g.format == Some(Format::SvgData);
    for (name, func) in io::figure_functions() {
        let (xs, ys) = io::sample(&func, io::FIGURE_SAMPLES);
        io::write_atomic(&dir.join(format!("{name}.csv")), io::xy_csv(&xs, &ys).as_bytes())?;
        if svg {
            io::write_atomic(&dir.join(format!("{name}.svgdata")), io::polyline(&xs, &ys).as_bytes())?;
        }
        io::write_atomic(&dir.join(format!("{name}.pp")), io::candidate_text(&func).as_bytes())?;
    }
    println!("wrote figure data for u, f, u1, u2 to {}", dir.display());
    Ok(0)
}
