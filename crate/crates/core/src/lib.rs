//! Vanishing-viscosity approximation of the radially symmetric eikonal equation
//!
//! The boundary value problem `|Du| = V` in the unit ball with `u = 0` on the
//! boundary has, for radial `V`, the explicit viscous approximation
//!
//! ```text
//! p^ε(r) = -(1/ε) r^{1-n} ∫_0^r s^{n-1} e^{(s-r)/ε} V(s) ds,    u^ε(r) = ∫_r^1 -p^ε(s) ds
//! ```
//!
//! and the limit `u(r) = ∫_r^1 V(s) ds`. This crate evaluates both, cross-checks
//! the viscous derivative against an independent exponential-integrator ODE march,
//! measures how fast `u^ε → u`, and certifies piecewise-quadratic candidates as
//! viscosity sub/super-solutions of `|u'| = f` on an interval.
//!
//! Modules:
//! - [`potential`]: radial potentials `V` on `[0, 1]` and their zero sets.
//! - [`vv_solver`]: `p^ε`, `u^ε`, the limit `u`, and the ODE oracle.
//! - [`viscosity_check`]: sub/super-differentials, solution and comparison verdicts.
//! - [`rate_lab`]: convergence sweeps over ε and log-log rate fits.
//! - [`io`]: text formats for potentials, candidates, solutions and reports.

pub mod cli;
pub mod error;
pub mod io;
pub mod potential;
pub mod quadrature;
pub mod rate_lab;
pub mod viscosity_check;
pub mod vv_solver;

pub use error::{Error, Result};
pub use potential::{parse_potential, PotentialKind, PotentialProfile, ZeroSet};
pub use rate_lab::{fit_rate, run_convergence, zero_point_probe, RateFit, RateReport, ZeroProbe};
pub use viscosity_check::{
    check_comparison, check_solution, check_solution_with, check_subsolution, check_subsolution_with,
    check_supersolution, check_supersolution_with, maximal_radial_solution, CheckOptions, Dirichlet, PiecewisePoly, Role, Status, Verdict,
};
pub use vv_solver::{
    eval_limit, eval_p_eps, eval_u_eps, ode_oracle_p, second_derivative_at_zero, uniform_grid,
    LimitSolution, ProblemSpec, ViscousSolution,
};
