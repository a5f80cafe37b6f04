//! Convergence sweep: sup errors away from the origin, the bound constants
//! `sup |u^ε - u| / (ε|log ε| (1 - r - log r))` and the log-log slope.
//!
//! cargo run --release --example convergence_rate -- [dim]

use eikonal_vv::rate_lab::{run_convergence, DEFAULT_EPSILONS};
use eikonal_vv::PotentialProfile;

fn main() -> eikonal_vv::Result<()> {
    let dim: u32 = std::env::args().nth(1).map_or(Ok(2), |s| s.parse()).expect("dim");
    let report = run_convergence(&PotentialProfile::vee(0.5)?, dim, &DEFAULT_EPSILONS, 0.1, 1001)?;

    println!("{} n={} r_min={}", report.potential, report.dim, report.r_min);
    println!("{:>10} {:>12} {:>12} {:>10}", "eps", "sup_err", "uniform_err", "C(eps)");
    for i in 0..report.epsilons.len() {
        println!(
            "{:>10.3e} {:>12.4e} {:>12.4e} {:>10.4}",
            report.epsilons[i], report.sup_errors[i], report.uniform_errors[i], report.bound_constants[i]
        );
    }
    println!("C = {:.4} (spread {:.2})", report.fitted_constant, report.bound_constant_spread());
    if let (Some(s), Some(t)) = (report.fitted_slope, report.slope_vs_epsilon) {
        println!("slope vs log(eps|log eps|) = {s:.3}, vs log eps = {t:.3}");
    }
    Ok(())
}
