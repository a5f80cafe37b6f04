//! Convergence experiments for `u^ε → u`.
//!
//! For each ε the viscous solution is computed on a grid and compared with the
//! exact limit `u(r) = ∫_r^1 V`. Errors away from the origin are measured
//! against the bound `C ε|log ε| (1 − r − log r)`: the per-ε constant is the
//! smallest `C` that makes the bound hold on `[r_min, 1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialProfile;
use crate::vv_solver::{eval_u_eps, uniform_grid, ProblemSpec};

/// Default sweep: half decades from 1e-1 down to 1e-3.
pub const DEFAULT_EPSILONS: [f64; 5] = [1e-1, 3.162_277_660_168_379_4e-2, 1e-2, 3.162_277_660_168_379_4e-3, 1e-3];

/// Radii (besides `r_min`) at which pointwise errors are always reported.
pub const PROBE_RADII: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// Headroom applied to the largest observed bound constant.
pub const BOUND_HEADROOM: f64 = 1.05;

/// Weight `1 − r − log r` of the rate bound; zero at `r = 1`.
pub fn rate_weight(r: f64) -> f64 {
    (1.0 - r) - (r - 1.0).ln_1p()
}

/// `ε |log ε|`.
pub fn rate_scale(eps: f64) -> f64 {
    eps * eps.ln().abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub potential: String,
    pub dim: u32,
    pub r_min: f64,
    pub grid_size: usize,
    pub epsilons: Vec<f64>,
    /// `sup_{r ∈ [r_min, 1]} |u^ε − u|` per ε.
    pub sup_errors: Vec<f64>,
    /// `sup_{r ∈ [0, 1]} |u^ε − u|` per ε, origin included.
    pub uniform_errors: Vec<f64>,
    pub pointwise_radii: Vec<f64>,
    /// `pointwise_errors[i][j]` is the error at `pointwise_radii[j]` for ε_i.
    pub pointwise_errors: Vec<Vec<f64>>,
    /// `sup_{r ∈ [r_min, 1)} |u^ε − u| / (ε|log ε| (1 − r − log r))` per ε.
    pub bound_constants: Vec<f64>,
    /// `1.05 × max(bound_constants)`.
    pub fitted_constant: f64,
    /// Slope of `log sup_error` against `log(ε|log ε|)`; `None` when fewer
    /// than three errors are positive.
    pub fitted_slope: Option<f64>,
    pub fitted_intercept: Option<f64>,
    /// Slope of `log sup_error` against `log ε`, reported alongside.
    pub slope_vs_epsilon: Option<f64>,
}

impl RateReport {
    pub fn max_bound_constant(&self) -> f64 {
        self.bound_constants.iter().copied().fold(0.0, f64::max)
    }

    /// Ratio of the largest to the smallest positive bound constant.
    pub fn bound_constant_spread(&self) -> f64 {
        let positive: Vec<f64> = self.bound_constants.iter().copied().filter(|&c| c > 0.0).collect();
        if positive.is_empty() {
            return 1.0;
        }
        let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = positive.iter().copied().fold(0.0, f64::max);
        hi / lo
    }
}

struct EpsilonRun {
    sup_error: f64,
    uniform_error: f64,
    pointwise: Vec<f64>,
    bound_constant: f64,
}

pub fn run_convergence(
    potential: &PotentialProfile,
    dim: u32,
    epsilons: &[f64],
    r_min: f64,
    grid_size: usize,
) -> Result<RateReport> {
    if !(r_min > 0.0 && r_min < 1.0) {
        return Err(Error::Domain(format!(
            "r_min must lie in (0, 1), got {r_min}: the rate bound blows up at r = 0"
        )));
    }
    if grid_size < 101 {
        return Err(Error::Invalid(format!("grid size must be at least 101, got {grid_size}")));
    }
    if epsilons.is_empty() {
        return Err(Error::Invalid("no epsilons given".into()));
    }
    if let Some(w) = epsilons.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid(format!("epsilons must be strictly decreasing ({} then {})", w[0], w[1])));
    }
    if let Some(&e) = epsilons.iter().find(|&&e| e >= 1.0) {
        return Err(Error::Domain(format!("epsilon {e} leaves ε|log ε| = 0; use ε < 1")));
    }
    let specs = epsilons
        .iter()
        .map(|&eps| ProblemSpec::new(potential.clone(), dim, eps))
        .collect::<Result<Vec<_>>>()?;

    let mut pointwise_radii = vec![r_min];
    pointwise_radii.extend(PROBE_RADII);
    pointwise_radii.sort_by(f64::total_cmp);
    pointwise_radii.dedup();

    let mut grid = uniform_grid(grid_size);
    grid.extend(&pointwise_radii);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let runs = specs
        .par_iter()
        .map(|spec| -> Result<EpsilonRun> {
            let sol = eval_u_eps(spec, &grid)?;
            let limit = sol.limit_values();
            let errors: Vec<f64> = sol.u_values.iter().zip(&limit).map(|(a, b)| (a - b).abs()).collect();
            let scale = rate_scale(spec.epsilon);

            let mut sup_error = 0.0f64;
            let mut bound_constant = 0.0f64;
            for (&r, &e) in grid.iter().zip(&errors) {
                if r >= r_min {
                    sup_error = sup_error.max(e);
                    if r < 1.0 {
                        bound_constant = bound_constant.max(e / (scale * rate_weight(r)));
                    }
                }
            }
            let pointwise = pointwise_radii
                .iter()
                .map(|r| errors[grid.partition_point(|g| g < r)])
                .collect();
            Ok(EpsilonRun {
                sup_error,
                uniform_error: errors.iter().copied().fold(0.0, f64::max),
                pointwise,
                bound_constant,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sup_errors: Vec<f64> = runs.iter().map(|r| r.sup_error).collect();
    let bound_constants: Vec<f64> = runs.iter().map(|r| r.bound_constant).collect();
    let fit = fit_rate(epsilons, &sup_errors).ok();
    let vs_eps = fit_loglog(epsilons, &sup_errors, |e| e.ln()).ok();

    Ok(RateReport {
        potential: potential.label(),
        dim,
        r_min,
        grid_size,
        epsilons: epsilons.to_vec(),
        uniform_errors: runs.iter().map(|r| r.uniform_error).collect(),
        pointwise_errors: runs.into_iter().map(|r| r.pointwise).collect(),
        fitted_constant: BOUND_HEADROOM * bound_constants.iter().copied().fold(0.0, f64::max),
        bound_constants,
        fitted_slope: fit.as_ref().map(|f| f.slope),
        fitted_intercept: fit.as_ref().map(|f| f.intercept),
        slope_vs_epsilon: vs_eps.map(|f| f.slope),
        pointwise_radii,
        sup_errors,
    })
}

/// Least-squares line through `(log(ε|log ε|), log error)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Euclidean norm of the residuals in log space.
    pub residual_norm: f64,
    /// Indices of points dropped because their error was not positive.
    pub excluded: Vec<usize>,
}

/// Fit `log error = slope · log(ε|log ε|) + intercept`.
///
/// Points with a nonpositive error are dropped and listed in `excluded`; at
/// least three must remain.
pub fn fit_rate(epsilons: &[f64], errors: &[f64]) -> Result<RateFit> {
    if let Some(&e) = epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Domain(format!("epsilon {e} outside (0, 1)")));
    }
    fit_loglog(epsilons, errors, |e| rate_scale(e).ln())
}

fn fit_loglog(epsilons: &[f64], errors: &[f64], abscissa: impl Fn(f64) -> f64) -> Result<RateFit> {
    if epsilons.len() != errors.len() {
        return Err(Error::Invalid("epsilons and errors differ in length".into()));
    }
    let excluded: Vec<usize> = errors.iter().enumerate().filter(|(_, &e)| !(e > 0.0)).map(|(i, _)| i).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = epsilons
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&eps, &e)| (abscissa(eps), e.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Invalid(format!(
            "rate fit needs at least 3 positive errors, got {} ({} excluded)",
            xs.len(),
            excluded.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(RateFit { slope, intercept, residual_norm, excluded })
}

/// `|u^ε(0) − u(0)|` across ε.
///
/// No convergence rate at the origin is known; the slope is reported as an
/// observation only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroProbe {
    pub potential: String,
    pub dim: u32,
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    /// Empirical slope of `log error` against `log ε`, if computable.
    pub empirical_slope: Option<f64>,
    pub monotone_decreasing: bool,
    pub note: String,
}

pub const NO_RATE_CLAIMED: &str = "no theoretical rate claimed at r = 0; slope is empirical only";

pub fn zero_point_probe(potential: &PotentialProfile, dim: u32, epsilons: &[f64]) -> Result<ZeroProbe> {
    if epsilons.is_empty() {
        return Err(Error::Invalid("no epsilons given".into()));
    }
    if let Some(w) = epsilons.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid(format!("epsilons must be strictly decreasing ({} then {})", w[0], w[1])));
    }
    let exact = potential.integral(0.0, 1.0);
    let errors = epsilons
        .par_iter()
        .map(|&eps| {
            let spec = ProblemSpec::new(potential.clone(), dim, eps)?;
            let sol = eval_u_eps(&spec, &[0.0, 1.0])?;
            Ok((sol.u_values[0] - exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let monotone_decreasing = errors.windows(2).all(|w| w[1] <= w[0]);
    let empirical_slope = fit_loglog(epsilons, &errors, f64::ln).ok().map(|f| f.slope);
    Ok(ZeroProbe {
        potential: potential.label(),
        dim,
        epsilons: epsilons.to_vec(),
        errors,
        empirical_slope,
        monotone_decreasing,
        note: NO_RATE_CLAIMED.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one() -> PotentialProfile {
        PotentialProfile::constant(1.0).unwrap()
    }

    #[test]
    fn weight_function() {
        assert_eq!(rate_weight(1.0), 0.0);
        assert_abs_diff_eq!(rate_weight(0.5), 0.5 + 2f64.ln(), epsilon = 1e-15);
        // w ≈ 2(1 − r) next to r = 1.
        assert_abs_diff_eq!(rate_weight(1.0 - 1e-9) / 1e-9, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn constant_potential_sup_errors_match_closed_form() {
        let eps = [1e-1, 1e-2, 1e-3];
        let report = run_convergence(&one(), 1, &eps, 0.1, 1001).unwrap();
        for (&e, &err) in eps.iter().zip(&report.sup_errors) {
            let exact = e * ((-0.1 / e).exp() - (-1.0 / e).exp());
            assert_abs_diff_eq!(err, exact, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(report.sup_errors[0], 3.678e-2, epsilon = 1e-5);
    }

    #[test]
    fn zero_potential_has_no_error() {
        let zero = PotentialProfile::constant(0.0).unwrap();
        let report = run_convergence(&zero, 3, &[1e-1, 1e-2], 0.2, 101).unwrap();
        assert!(report.sup_errors.iter().chain(&report.uniform_errors).all(|&e| e == 0.0));
        assert!(report.pointwise_errors.iter().flatten().all(|&e| e == 0.0));
        assert_eq!(report.fitted_slope, None);
    }

    #[test]
    fn rejects_bad_sweeps() {
        assert!(matches!(run_convergence(&one(), 1, &[0.1], 0.0, 101), Err(Error::Domain(_))));
        assert!(run_convergence(&one(), 1, &[0.1], -0.1, 101).is_err());
        assert!(run_convergence(&one(), 1, &[0.1], 0.1, 100).is_err());
        assert!(run_convergence(&one(), 1, &[0.01, 0.1], 0.1, 101).is_err());
        assert!(run_convergence(&one(), 1, &[1.0, 0.1], 0.1, 101).is_err());
        assert!(run_convergence(&one(), 1, &[], 0.1, 101).is_err());
    }

    #[test]
    fn fit_recovers_planted_rates() {
        let eps = [1e-1, 1e-2, 1e-3, 1e-4];
        let planted: Vec<f64> = eps.iter().map(|&e| 0.7 * rate_scale(e)).collect();
        let fit = fit_rate(&eps, &planted).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 0.7f64.ln(), epsilon = 1e-12);
        assert!(fit.residual_norm < 1e-12);

        // Errors ∝ ε regressed on log(ε|log ε|); value from an independent
        // numpy least-squares solve on the same four abscissae.
        let linear: Vec<f64> = eps.to_vec();
        assert_abs_diff_eq!(fit_rate(&eps, &linear).unwrap().slope, 1.244_130_03, epsilon = 1e-8);
    }

    #[test]
    fn fit_needs_three_positive_points() {
        assert!(fit_rate(&[0.1], &[0.5]).is_err());
        let fit = fit_rate(&[1e-1, 1e-2, 1e-3, 1e-4], &[0.0, 1e-2, 1e-3, 1e-4]).unwrap();
        assert_eq!(fit.excluded, vec![0]);
        assert!(fit_rate(&[1e-1, 1e-2, 1e-3], &[0.0, 1e-2, 1e-3]).is_err());
    }

    #[test]
    fn zero_probe_examples() {
        let zero = PotentialProfile::constant(0.0).unwrap();
        let probe = zero_point_probe(&zero, 2, &[1e-1, 1e-2]).unwrap();
        assert!(probe.errors.iter().all(|&e| e == 0.0));

        let eps = [1e-1, 1e-2, 1e-3];
        let probe = zero_point_probe(&one(), 1, &eps).unwrap();
        for (&e, &err) in eps.iter().zip(&probe.errors) {
            assert_abs_diff_eq!(err, e * (1.0 - (-1.0 / e).exp()), epsilon = 1e-8);
        }
        assert!(probe.monotone_decreasing);
        assert_eq!(probe.note, NO_RATE_CLAIMED);
    }
}
