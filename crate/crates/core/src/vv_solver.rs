//! The viscous solution `u^ε`, its radial derivative `p^ε`, and the limit `u`.
//!
//! `p^ε` is evaluated in the shifted-exponent form
//!
//! ```text
//! -p^ε(r) = ∫_{-r/ε}^0 (1 + εt/r)^{n-1} e^t V(r + εt) dt
//! ```
//!
//! so no exponential with a positive argument is ever formed. The lower limit
//! is cut at `t = -45` (the tail is below `e^{-45} M`), and the remaining range
//! is covered by 8-point Gauss–Legendre panels of width ≤ 1, split at the
//! images of `V`'s knots so each panel sees a linear `V`.
//!
//! [`ode_oracle_p`] computes the same function by marching the linear ODE
//! `p' + ((n-1)/r + 1/ε) p = -V/ε` with exponential-integrator steps; it shares
//! no code with the quadrature path and is used to cross-validate it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialProfile;
use crate::quadrature::{self, PANEL_ORDER};

/// Lower cut-off of the `t` integral.
pub const T_CUTOFF: f64 = 45.0;

/// Largest Simpson spacing used when integrating `-p^ε` into `u^ε`.
pub const SIMPSON_MAX_SPACING: f64 = 5e-4;

pub const EPSILON_RANGE: (f64, f64) = (1e-6, 1.0);
pub const DIM_RANGE: (u32, u32) = (1, 10);

/// Default number of output radii.
pub const DEFAULT_GRID: usize = 1001;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub potential: PotentialProfile,
    pub dim: u32,
    pub epsilon: f64,
}

impl ProblemSpec {
    pub fn new(potential: PotentialProfile, dim: u32, epsilon: f64) -> Result<Self> {
        if !(DIM_RANGE.0..=DIM_RANGE.1).contains(&dim) {
            return Err(Error::Domain(format!("dimension {dim} outside [{}, {}]", DIM_RANGE.0, DIM_RANGE.1)));
        }
        if !(EPSILON_RANGE.0..=EPSILON_RANGE.1).contains(&epsilon) {
            return Err(Error::Domain(format!(
                "epsilon {epsilon:e} outside [{:e}, {:e}]",
                EPSILON_RANGE.0, EPSILON_RANGE.1
            )));
        }
        Ok(Self { potential, dim, epsilon })
    }
}

/// `p^ε(r)`, the radial derivative of the viscous solution.
pub fn eval_p_eps(spec: &ProblemSpec, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(p_eps(spec, r))
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius {r} outside [0, 1]")))
    }
}

pub(crate) fn p_eps(spec: &ProblemSpec, r: f64) -> f64 {
    p_eps_with_panels(spec, r).0
}

fn p_eps_with_panels(spec: &ProblemSpec, r: f64) -> (f64, usize) {
    if r <= 0.0 {
        return (0.0, 0);
    }
    let v = &spec.potential;
    if v.is_identically_zero() {
        return (0.0, 0);
    }
    let eps = spec.epsilon;
    let power = spec.dim as i32 - 1;

    if r < eps {
        // s = rσ: -p = (r/ε) ∫_0^1 σ^{n-1} e^{r(σ-1)/ε} V(rσ) dσ. The whole
        // range is shorter than one unit in t, so a single panel width of 1
        // in σ keeps the exponential well resolved.
        let scale = r / eps;
        let breaks: Vec<f64> = v.knots().iter().map(|k| k / r).filter(|&s| s > 0.0 && s < 1.0).collect();
        let (integral, panels) = quadrature::composite(0.0, 1.0, &breaks, 1.0, |sigma| {
            sigma.powi(power) * (scale * (sigma - 1.0)).exp() * v.value(r * sigma)
        });
        return (-(scale * integral), panels);
    }

    let t_min = (-r / eps).max(-T_CUTOFF);
    let breaks: Vec<f64> = v
        .knots()
        .iter()
        .map(|k| (k - r) / eps)
        .filter(|&t| t > t_min && t < 0.0)
        .collect();
    let (integral, panels) = quadrature::composite(t_min, 0.0, &breaks, 1.0, |t| {
        let s = r + eps * t;
        (s / r).powi(power) * t.exp() * v.value(s)
    });
    (-integral, panels)
}

/// `−V(0)/(nε)`, the value of each `u^ε_{x_i x_i}(0)`.
pub fn second_derivative_at_zero(spec: &ProblemSpec) -> f64 {
    -spec.potential.value(0.0) / (spec.dim as f64 * spec.epsilon)
}

/// `u(r) = ∫_r^1 V(s) ds`, integrated exactly segment by segment.
pub fn eval_limit(potential: &PotentialProfile, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(potential.integral(r, 1.0))
}

/// The limit `u(r) = ∫_r^1 V`, evaluated on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSolution {
    pub potential: PotentialProfile,
}

impl LimitSolution {
    pub fn new(potential: PotentialProfile) -> Self {
        Self { potential }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        eval_limit(&self.potential, r)
    }

    /// `u'(r) = -V(r)`.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        Ok(-self.potential.eval(r)?)
    }
}

/// `n` uniformly spaced radii from 0 to 1 inclusive.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let last = (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { 1.0 } else { i as f64 / last }).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Domain("grid needs at least two radii".into()));
    }
    if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
        return Err(Error::Domain(format!(
            "grid must span [0, 1], got [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("grid not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeta {
    /// Gauss–Legendre nodes per panel for `p^ε`.
    pub panel_order: usize,
    /// Largest panel count used for a single `p^ε` evaluation.
    pub max_panels: usize,
    /// The `t` integral is truncated at `-t_cutoff`.
    pub t_cutoff: f64,
    /// Simpson spacing bound used for `u^ε`.
    pub simpson_spacing: f64,
    /// Total Simpson subintervals over `[0, 1]`.
    pub simpson_intervals: usize,
    /// Richardson estimate `Σ |S_h − S_2h| / 15` of the Simpson error.
    pub estimated_error: f64,
}

/// Samples of `p^ε` and `u^ε` on a grid, with the quadrature settings used.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousSolution {
    pub spec: ProblemSpec,
    pub grid: Vec<f64>,
    pub p_values: Vec<f64>,
    pub u_values: Vec<f64>,
    pub meta: QuadratureMeta,
}

impl ViscousSolution {
    /// `u(r) = ∫_r^1 V` on the same grid.
    pub fn limit_values(&self) -> Vec<f64> {
        self.grid.iter().map(|&r| self.spec.potential.integral(r, 1.0)).collect()
    }
}

/// `u^ε` on `grid`, by composite Simpson on `-p^ε` from each radius to 1.
///
/// Each grid cell is split into a multiple of four Simpson subintervals no
/// wider than `min(ε/8, 5e-4)`; the cells are summed from the right so the
/// whole grid costs one sweep.
pub fn eval_u_eps(spec: &ProblemSpec, grid: &[f64]) -> Result<ViscousSolution> {
    check_grid(grid)?;
    let h_max = (spec.epsilon / 8.0).min(SIMPSON_MAX_SPACING);

    let subdivisions: Vec<usize> = grid
        .windows(2)
        .map(|w| 4 * ((w[1] - w[0]) / (4.0 * h_max)).ceil().max(1.0) as usize)
        .collect();
    let offsets: Vec<usize> = std::iter::once(0)
        .chain(subdivisions.iter().scan(0, |acc, &m| {
            *acc += m;
            Some(*acc)
        }))
        .collect();
    let total = *offsets.last().unwrap();

    let nodes: Vec<f64> = (0..=total)
        .map(|j| {
            let cell = offsets.partition_point(|&o| o <= j).saturating_sub(1).min(grid.len() - 2);
            if j == offsets[cell + 1] {
                return grid[cell + 1];
            }
            let local = j - offsets[cell];
            let (a, b) = (grid[cell], grid[cell + 1]);
            a + (b - a) * local as f64 / subdivisions[cell] as f64
        })
        .collect();
    let samples: Vec<(f64, usize)> = nodes.par_iter().map(|&r| p_eps_with_panels(spec, r)).collect();
    let max_panels = samples.iter().map(|s| s.1).max().unwrap_or(0);
    let neg_p: Vec<f64> = samples.iter().map(|s| -s.0).collect();

    let mut u_values = vec![0.0; grid.len()];
    let mut estimated_error = 0.0;
    for cell in (0..grid.len() - 1).rev() {
        let m = subdivisions[cell];
        let f = &neg_p[offsets[cell]..=offsets[cell + 1]];
        let h = (grid[cell + 1] - grid[cell]) / m as f64;
        let fine = simpson(f, h);
        let coarse = simpson(&f.iter().step_by(2).copied().collect::<Vec<_>>(), 2.0 * h);
        estimated_error += (fine - coarse).abs() / 15.0;
        u_values[cell] = u_values[cell + 1] + fine;
    }

    let p_values = grid
        .iter()
        .enumerate()
        .map(|(i, _)| -neg_p[offsets[i]])
        .collect();

    Ok(ViscousSolution {
        spec: spec.clone(),
        grid: grid.to_vec(),
        p_values,
        u_values,
        meta: QuadratureMeta {
            panel_order: PANEL_ORDER,
            max_panels,
            t_cutoff: T_CUTOFF,
            simpson_spacing: h_max,
            simpson_intervals: total,
            estimated_error,
        },
    })
}

/// Composite Simpson over equally spaced samples (even number of intervals).
fn simpson(f: &[f64], h: f64) -> f64 {
    debug_assert!(f.len() >= 3 && f.len() % 2 == 1);
    let n = f.len() - 1;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f[0] + f[n] + 4.0 * odd + 2.0 * even)
}

/// Largest grid spacing [`ode_oracle_p`] accepts, relative to ε.
pub const ORACLE_MAX_SPACING_FACTOR: f64 = 1.0 / 8.0;

/// Internal substep bound of the oracle march, relative to ε.
pub const ORACLE_SUBSTEP_FACTOR: f64 = 1.0 / 4096.0;

/// Internal substep bound of the oracle march, relative to `r`.
pub const ORACLE_RADIAL_FACTOR: f64 = 1.0 / 256.0;

/// Independent evaluation of `p^ε` on `grid` by marching the ODE
/// `p' + ((n-1)/r + 1/ε) p = -V/ε` from `p(0) = 0`.
///
/// Each step freezes the coefficient `(n-1)/r + 1/ε` at the step midpoint and
/// solves the resulting constant-coefficient problem with linear forcing
/// exactly. Steps are split at `V`'s knots and further into substeps of at
/// most `min(ε/4096, r/256)`. The singular start is replaced by the power series of the
/// exact solution about `r = 0`, whose leading term is `-V(0) r/(nε)`.
///
/// Grids coarser than `ε/8` are refused.
pub fn ode_oracle_p(spec: &ProblemSpec, grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let eps = spec.epsilon;
    let required = eps * ORACLE_MAX_SPACING_FACTOR;
    let spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if spacing > required * (1.0 + 1e-9) {
        return Err(Error::TooCoarse { spacing, required });
    }

    let v = &spec.potential;
    let n = spec.dim as f64;
    let h_sub = eps * ORACLE_SUBSTEP_FACTOR;

    // Start the march inside the first segment of V, where the series is exact.
    let r_start = grid[1].min(v.knots()[1]).min(h_sub) * 1e-3;
    let mut p = series_start(spec, r_start);
    let mut r = r_start;

    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    for &target in &grid[1..] {
        while r < target {
            let next_knot = v.knots()[v.segment_index(r) + 1];
            let stop = target.min(if next_knot > r { next_knot } else { target });
            let slope = (v.value(stop) - v.value(r)) / (stop - r);
            while r < stop {
                // Graded near the origin, where (n-1)/r varies on the scale r.
                let h = h_sub.min(r * ORACLE_RADIAL_FACTOR);
                let b = if r + 1.5 * h >= stop { stop } else { r + h };
                p = exp_step(p, r, b, n, eps, v.value(r), slope);
                r = b;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Exact solution at `b` of `p' = -c p - (V_a + slope·(x-a))/ε` from `p(a) = p0`
/// with `c` frozen at `(n-1)/mid + 1/ε`.
#[inline]
fn exp_step(p0: f64, a: f64, b: f64, n: f64, eps: f64, v_a: f64, slope: f64) -> f64 {
    let h = b - a;
    let c = (n - 1.0) / (0.5 * (a + b)) + 1.0 / eps;
    let g0 = -v_a / eps;
    let g1 = -slope / eps;
    let lin = g1 / c;
    let base = (g0 - lin) / c;
    let decay = (-c * h).exp();
    decay * (p0 - base) + base + lin * h
}

/// Power series of `p^ε` about 0 for `V(r) = V0 + V1 r`.
///
/// With `p = Σ_{k≥1} a_k r^k`, the ODE gives `n a_1 = -V0/ε`,
/// `(n+1) a_2 = -(V1 + a_1)/ε` and `(n+k-1) a_k = -a_{k-1}/ε` for `k ≥ 3`.
fn series_start(spec: &ProblemSpec, r: f64) -> f64 {
    let eps = spec.epsilon;
    let n = spec.dim as f64;
    let v0 = spec.potential.value(0.0);
    let v1 = spec.potential.slope_at(0.0);
    let mut coeff = -v0 / (n * eps);
    let mut power = r;
    let mut sum = coeff * power;
    for k in 2..60 {
        let forcing = if k == 2 { v1 } else { 0.0 };
        coeff = -(forcing + coeff) / (eps * (n + k as f64 - 1.0));
        power *= r;
        let term = coeff * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && k > 3 {
            break;
        }
    }
    sum
}
