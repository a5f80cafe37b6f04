//! Viscosity sub/super-solution checks for `|u'| = f` on an interval.
//!
//! Candidates are continuous piecewise quadratics, so one-sided derivatives at
//! kinks come straight from the coefficients. At a kink with left derivative
//! `d⁻` and right derivative `d⁺`, a `C¹` test function can touch from above
//! only when `d⁺ ≤ d⁻` (the superdifferential is `[d⁺, d⁻]`) and from below
//! only when `d⁻ ≤ d⁺` (the subdifferential is `[d⁻, d⁺]`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PotentialProfile, ZeroSet};

/// Continuity tolerance between adjacent pieces (scaled by `max(1, |u|)`).
pub const CONTINUITY_TOL: f64 = 1e-12;

/// One-sided derivatives closer than this are treated as a smooth point.
pub const KINK_TOL: f64 = 1e-12;

/// Default additive tolerance for exact piecewise inputs.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default tolerance for candidates imported from sampled solver output.
pub const SAMPLED_TOL: f64 = 1e-6;

/// Default number of evenly spaced scan points.
pub const DEFAULT_SAMPLES: usize = 10_001;

/// `c0 + c1 x + c2 x²` on each cell of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    coeffs: Vec<[f64; 3]>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<[f64; 3]>) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != coeffs.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} breakpoints cannot carry {} pieces",
                breaks.len(),
                coeffs.len()
            )));
        }
        if breaks.iter().chain(coeffs.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite breakpoint or coefficient".into()));
        }
        if let Some(w) = breaks.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(format!("breakpoints not strictly increasing at {} -> {}", w[0], w[1])));
        }
        let poly = Self { breaks, coeffs };
        for k in 1..poly.coeffs.len() {
            let x = poly.breaks[k];
            let left = horner(&poly.coeffs[k - 1], x);
            let right = horner(&poly.coeffs[k], x);
            if (left - right).abs() > CONTINUITY_TOL * left.abs().max(right.abs()).max(1.0) {
                return Err(Error::Invalid(format!("discontinuous at x = {x}: {left} vs {right}")));
            }
        }
        Ok(poly)
    }

    /// Single polynomial piece on `[a, b]`.
    pub fn polynomial(a: f64, b: f64, c: [f64; 3]) -> Result<Self> {
        Self::new(vec![a, b], vec![c])
    }

    pub fn constant(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::polynomial(a, b, [value, 0.0, 0.0])
    }

    /// Piecewise-linear interpolant through `(xs[i], ys[i])`.
    pub fn interpolate_linear(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Invalid("abscissae and ordinates differ in length".into()));
        }
        let coeffs = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| {
                let slope = (y[1] - y[0]) / (x[1] - x[0]);
                [y[0] - slope * x[0], slope, 0.0]
            })
            .collect();
        Self::new(xs.to_vec(), coeffs)
    }

    /// The potential `V` as linear pieces on `[0, 1]`.
    pub fn from_potential(potential: &PotentialProfile) -> Self {
        Self::interpolate_linear(potential.knots(), potential.values())
            .expect("potential knots are strictly increasing and values finite")
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn coeffs(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    /// `(x_lo, x_hi, [c0, c1, c2])` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, [f64; 3])> + '_ {
        self.breaks.windows(2).zip(&self.coeffs).map(|(w, c)| (w[0], w[1], *c))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    /// Index of the piece used at `x`: the leftmost piece whose right end is
    /// `≥ x`.
    fn piece_index(&self, x: f64) -> usize {
        let interior = &self.breaks[1..self.breaks.len() - 1];
        interior.partition_point(|&b| b < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs[self.piece_index(x)], x)
    }

    /// Interior breakpoint index `k` (so `x == breaks[k]`), if any.
    fn kink_index(&self, x: f64) -> Option<usize> {
        let k = self.breaks.partition_point(|&b| b < x);
        (k > 0 && k + 1 < self.breaks.len() && (self.breaks[k] - x).abs() <= 1e-13 * x.abs().max(1.0))
            .then_some(k)
    }

    /// One-sided derivatives `(d⁻, d⁺)` at `x`.
    pub fn one_sided_derivatives(&self, x: f64) -> (f64, f64) {
        match self.kink_index(x) {
            Some(k) => (slope(&self.coeffs[k - 1], x), slope(&self.coeffs[k], x)),
            None => {
                let d = slope(&self.coeffs[self.piece_index(x)], x);
                (d, d)
            }
        }
    }

    fn check_interior(&self, x: f64) -> Result<()> {
        let (a, b) = self.domain();
        if x > a && x < b {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x} not in the open interval ({a}, {b})")))
        }
    }

    /// Mirror a function on `[0, b]` to `[-b, b]` by `x ↦ u(|x|)`.
    pub fn evenly_reflect(&self) -> Result<Self> {
        let (a, _) = self.domain();
        if a != 0.0 {
            return Err(Error::Domain(format!("reflection needs a domain starting at 0, got {a}")));
        }
        let mut breaks: Vec<f64> = self.breaks.iter().rev().map(|x| -x).collect();
        breaks.extend_from_slice(&self.breaks[1..]);
        let mut coeffs: Vec<[f64; 3]> = self.coeffs.iter().rev().map(|c| [c[0], -c[1], c[2]]).collect();
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(breaks, coeffs)
    }

    /// Roots and zero intervals, found exactly piece by piece.
    pub fn zero_set(&self, tol: f64) -> ZeroSet {
        let mut points: Vec<f64> = Vec::new();
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for (lo, hi, c) in self.pieces() {
            if c.iter().all(|x| x.abs() <= tol) {
                match intervals.last_mut() {
                    Some(last) if last.1 == lo => last.1 = hi,
                    _ => intervals.push((lo, hi)),
                }
                continue;
            }
            for x in real_roots(&c) {
                if x >= lo - 1e-14 && x <= hi + 1e-14 {
                    points.push(x.clamp(lo, hi));
                }
            }
            for x in [lo, hi] {
                if horner(&c, x).abs() <= tol {
                    points.push(x);
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        points.retain(|&x| !intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi));
        ZeroSet { points, intervals }
    }
}

#[inline]
fn horner(c: &[f64; 3], x: f64) -> f64 {
    c[0] + x * (c[1] + x * c[2])
}

#[inline]
fn slope(c: &[f64; 3], x: f64) -> f64 {
    c[1] + 2.0 * c[2] * x
}

fn real_roots(c: &[f64; 3]) -> Vec<f64> {
    let [c0, c1, c2] = *c;
    if c2 == 0.0 {
        return if c1 == 0.0 { vec![] } else { vec![-c0 / c1] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let scale = c1 * c1 + (4.0 * c2 * c0).abs();
    if disc < -1e-14 * scale {
        return vec![];
    }
    if disc <= 1e-14 * scale {
        return vec![-c1 / (2.0 * c2)];
    }
    // Stable form avoiding cancellation.
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / c2, c0 / q]
}

/// Superdifferential of `u` at an interior `x`, as `Some((lo, hi))`, or
/// `None` when empty.
pub fn superdifferential_at(u: &PiecewisePoly, x: f64) -> Result<Option<(f64, f64)>> {
    u.check_interior(x)?;
    let (left, right) = u.one_sided_derivatives(x);
    Ok(if (left - right).abs() <= KINK_TOL {
        Some((left, left))
    } else if right < left {
        Some((right, left))
    } else {
        None
    })
}

/// Subdifferential of `u` at an interior `x`.
pub fn subdifferential_at(u: &PiecewisePoly, x: f64) -> Result<Option<(f64, f64)>> {
    u.check_interior(x)?;
    let (left, right) = u.one_sided_derivatives(x);
    Ok(if (left - right).abs() <= KINK_TOL {
        Some((left, left))
    } else if left < right {
        Some((left, right))
    } else {
        None
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Comparison whose hypothesis `u ≤ v` on the zero set does not hold;
    /// the verdict is vacuously true.
    HypothesisNotMet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Subsolution,
    Supersolution,
    Solution,
    Comparison,
}

/// Outcome of a check.
///
/// `margin` is the smallest slack `rhs − lhs` over every inequality tested; a
/// pass has `margin ≥ −tol`. A failure carries the point of the worst
/// violation with both sides of the inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub role: Role,
    pub witness_x: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    /// Pass, including a vacuous comparison.
    pub fn is_pass(&self) -> bool {
        matches!(self.status, Status::Pass | Status::HypothesisNotMet)
    }
}

/// Which ends of the interval carry the Dirichlet condition `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dirichlet {
    #[default]
    Both,
    /// Radial problems on `[0, 1]`: only `r = 1` is a boundary point.
    Right,
    Left,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub samples: usize,
    pub dirichlet: Dirichlet,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, samples: DEFAULT_SAMPLES, dirichlet: Dirichlet::Both }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Tracks the tightest inequality seen during a scan.
struct Tightest {
    role: Role,
    tol: f64,
    margin: f64,
    worst: Option<(f64, f64, f64, &'static str)>,
}

impl Tightest {
    fn new(role: Role, tol: f64) -> Self {
        Self { role, tol, margin: f64::INFINITY, worst: None }
    }

    /// Record `lhs ≤ rhs` at `x`.
    fn le(&mut self, x: f64, lhs: f64, rhs: f64, what: &'static str) {
        let slack = rhs - lhs;
        if slack < self.margin {
            self.margin = slack;
            self.worst = Some((x, lhs, rhs, what));
        }
    }

    fn merge(&mut self, other: Tightest) {
        if other.margin < self.margin {
            self.margin = other.margin;
            self.worst = other.worst;
        }
    }

    fn finish(self) -> Verdict {
        let failed = self.margin < -self.tol;
        let (witness_x, lhs, rhs, detail) = match (failed, self.worst) {
            (true, Some((x, l, r, what))) => (Some(x), Some(l), Some(r), Some(what.to_string())),
            _ => (None, None, None, None),
        };
        Verdict {
            status: if failed { Status::Fail } else { Status::Pass },
            role: self.role,
            witness_x,
            lhs,
            rhs,
            margin: if self.margin.is_finite() { self.margin } else { 0.0 },
            detail,
        }
    }
}

fn check_same_domain(u: &PiecewisePoly, f: &PiecewisePoly) -> Result<()> {
    let (ua, ub) = u.domain();
    let (fa, fb) = f.domain();
    if (ua - fa).abs() > 1e-12 || (ub - fb).abs() > 1e-12 {
        return Err(Error::Domain(format!("domains differ: [{ua}, {ub}] vs [{fa}, {fb}]")));
    }
    Ok(())
}

/// Evenly spaced interior points plus every interior breakpoint, sorted.
fn interior_samples(u: &PiecewisePoly, f: &PiecewisePoly, samples: usize) -> Vec<f64> {
    let (a, b) = u.domain();
    let m = samples.max(3);
    let mut xs: Vec<f64> = (1..m - 1).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect();
    xs.extend(u.breaks().iter().chain(f.breaks()).copied().filter(|&x| x > a && x < b));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|p, q| (*p - *q).abs() <= 1e-13 * p.abs().max(1.0));
    xs
}

fn boundary_checks(u: &PiecewisePoly, dirichlet: Dirichlet) -> Vec<f64> {
    let (a, b) = u.domain();
    match dirichlet {
        Dirichlet::Both => vec![a, b],
        Dirichlet::Left => vec![a],
        Dirichlet::Right => vec![b],
        Dirichlet::None => vec![],
    }
}

fn scan_sub(u: &PiecewisePoly, f: &PiecewisePoly, opts: &CheckOptions) -> Tightest {
    let mut t = Tightest::new(Role::Subsolution, opts.tol);
    for x in interior_samples(u, f, opts.samples) {
        if let Ok(Some((lo, hi))) = superdifferential_at(u, x) {
            t.le(x, lo.abs().max(hi.abs()), f.eval(x), "max |p| over superdifferential <= f(x)");
        }
    }
    for x in boundary_checks(u, opts.dirichlet) {
        t.le(x, u.eval(x), 0.0, "u <= 0 on the boundary");
    }
    t
}

fn scan_super(u: &PiecewisePoly, f: &PiecewisePoly, opts: &CheckOptions) -> Tightest {
    let mut t = Tightest::new(Role::Supersolution, opts.tol);
    for x in interior_samples(u, f, opts.samples) {
        if let Ok(Some((lo, hi))) = subdifferential_at(u, x) {
            let min_abs = if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
            t.le(x, f.eval(x), min_abs, "f(x) <= min |p| over subdifferential");
        }
    }
    for x in boundary_checks(u, opts.dirichlet) {
        t.le(x, 0.0, u.eval(x), "u >= 0 on the boundary");
    }
    t
}

pub fn check_subsolution(u: &PiecewisePoly, f: &PiecewisePoly, tol: f64) -> Result<Verdict> {
    check_subsolution_with(u, f, &CheckOptions::with_tol(tol))
}

pub fn check_subsolution_with(u: &PiecewisePoly, f: &PiecewisePoly, opts: &CheckOptions) -> Result<Verdict> {
    check_same_domain(u, f)?;
    Ok(scan_sub(u, f, opts).finish())
}

pub fn check_supersolution(u: &PiecewisePoly, f: &PiecewisePoly, tol: f64) -> Result<Verdict> {
    check_supersolution_with(u, f, &CheckOptions::with_tol(tol))
}

pub fn check_supersolution_with(u: &PiecewisePoly, f: &PiecewisePoly, opts: &CheckOptions) -> Result<Verdict> {
    check_same_domain(u, f)?;
    Ok(scan_super(u, f, opts).finish())
}

pub fn check_solution(u: &PiecewisePoly, f: &PiecewisePoly, tol: f64) -> Result<Verdict> {
    check_solution_with(u, f, &CheckOptions::with_tol(tol))
}

/// Sub- and supersolution at once, plus `|u'(x)| = f(x)` at smooth points.
pub fn check_solution_with(u: &PiecewisePoly, f: &PiecewisePoly, opts: &CheckOptions) -> Result<Verdict> {
    check_same_domain(u, f)?;
    let mut all = Tightest::new(Role::Solution, opts.tol);
    all.merge(scan_sub(u, f, opts));
    all.merge(scan_super(u, f, opts));
    let mut eq = Tightest::new(Role::Solution, opts.tol);
    for x in interior_samples(u, f, opts.samples) {
        let (left, right) = u.one_sided_derivatives(x);
        if (left - right).abs() <= KINK_TOL {
            eq.le(x, (left.abs() - f.eval(x)).abs(), 0.0, "|u'(x)| = f(x) at a smooth point");
        }
    }
    all.merge(eq);
    Ok(all.finish())
}

/// Comparison on the zero set: if `u ≤ v` on `zeros`, check `u ≤ v` on the
/// whole interval.
///
/// Returns [`Status::HypothesisNotMet`] when `u > v + tol` somewhere on
/// `zeros`; the witness is then the offending point of the zero set.
pub fn check_comparison(
    u: &PiecewisePoly,
    v: &PiecewisePoly,
    f: &PiecewisePoly,
    zeros: &ZeroSet,
    tol: f64,
) -> Result<Verdict> {
    check_same_domain(u, v)?;
    check_same_domain(u, f)?;
    let (a, b) = u.domain();

    let mut hyp = Tightest::new(Role::Comparison, tol);
    for x in zeros.sample(101).into_iter().filter(|&x| x >= a && x <= b) {
        hyp.le(x, u.eval(x), v.eval(x), "u <= v on the zero set of f");
    }
    if hyp.margin < -tol {
        let mut verdict = hyp.finish();
        verdict.status = Status::HypothesisNotMet;
        return Ok(verdict);
    }

    let mut concl = Tightest::new(Role::Comparison, tol);
    let mut xs = interior_samples(u, v, DEFAULT_SAMPLES);
    xs.extend(f.breaks().iter().copied().filter(|&x| x > a && x < b));
    xs.extend([a, b]);
    for x in xs {
        concl.le(x, u.eval(x), v.eval(x), "u <= v in the interval");
    }
    let mut verdict = concl.finish();
    if verdict.status == Status::Fail {
        verdict.detail = Some("comparison hypothesis holds on the zero set but u > v inside".into());
    }
    Ok(verdict)
}

/// `u(r) = ∫_r^1 V` as an exact piecewise quadratic on `[0, 1]` with the
/// knots of `V` as breakpoints.
pub fn maximal_radial_solution(potential: &PotentialProfile) -> PiecewisePoly {
    let segments: Vec<_> = potential.segments().collect();
    let mut coeffs = vec![[0.0; 3]; segments.len()];
    let mut right_value = 0.0;
    for (k, &(r0, r1, v0, v1)) in segments.iter().enumerate().rev() {
        // V = alpha + beta r on this segment.
        let beta = (v1 - v0) / (r1 - r0);
        let alpha = v0 - beta * r0;
        // u(r) = u(r1) + alpha (r1 - r) + beta (r1² - r²)/2
        coeffs[k] = [right_value + alpha * r1 + 0.5 * beta * r1 * r1, -alpha, -0.5 * beta];
        right_value += 0.5 * (r1 - r0) * (v0 + v1);
    }
    PiecewisePoly::new(potential.knots().to_vec(), coeffs).expect("antiderivative pieces are continuous")
}

/// The functions of the two worked one-dimensional examples on `(-1, 1)`.
pub mod catalog {
    use super::PiecewisePoly;

    /// `f ≡ 1` on `[-1, 1]`.
    pub fn unit_speed() -> PiecewisePoly {
        PiecewisePoly::constant(-1.0, 1.0, 1.0).unwrap()
    }

    /// `1 − |x|`, the unique viscosity solution of `|u'| = 1`, `u(±1) = 0`.
    pub fn tent() -> PiecewisePoly {
        PiecewisePoly::new(vec![-1.0, 0.0, 1.0], vec![[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]]).unwrap()
    }

    /// `|x| − 1`: an a.e. solution of `|u'| = 1` that is not a supersolution.
    pub fn inverted_tent() -> PiecewisePoly {
        PiecewisePoly::new(vec![-1.0, 0.0, 1.0], vec![[-1.0, -1.0, 0.0], [-1.0, 1.0, 0.0]]).unwrap()
    }

    /// `f(x) = ||x| − 1/2|`, vanishing at `±1/2`.
    pub fn double_vee() -> PiecewisePoly {
        PiecewisePoly::new(
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            vec![[-0.5, -1.0, 0.0], [0.5, 1.0, 0.0], [0.5, -1.0, 0.0], [-0.5, 1.0, 0.0]],
        )
        .unwrap()
    }

    /// `½(x ± ½)² − ⅛`: the solution of `|u'| = double_vee` that is `−⅛` on
    /// the zero set.
    pub fn u1() -> PiecewisePoly {
        // ½(x+½)² − ⅛ = ½x² + ½x;  ½(x−½)² − ⅛ = ½x² − ½x
        PiecewisePoly::new(vec![-1.0, 0.0, 1.0], vec![[0.0, 0.5, 0.5], [0.0, -0.5, 0.5]]).unwrap()
    }

    /// The maximal solution of `|u'| = double_vee`, `⅛` on the zero set.
    pub fn u2() -> PiecewisePoly {
        // −½(x+½)² + ⅛ = −½x² − ½x;   ½(x+½)² + ⅛ = ½x² + ½x + ¼
        //  ½(x−½)² + ⅛ = ½x² − ½x + ¼; −½(x−½)² + ⅛ = −½x² + ½x
        PiecewisePoly::new(
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            vec![[0.0, -0.5, -0.5], [0.25, 0.5, 0.5], [0.25, -0.5, 0.5], [0.0, 0.5, -0.5]],
        )
        .unwrap()
    }
}
