//! How fast does `u^ε(0)` approach `u(0)`? Only an empirical answer is given.

use eikonal_vv::{zero_point_probe, PotentialProfile};

fn main() -> eikonal_vv::Result<()> {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    for v in [PotentialProfile::constant(1.0)?, PotentialProfile::vee(0.5)?, PotentialProfile::vee(0.0)?] {
        for dim in [1, 3] {
            let probe = zero_point_probe(&v, dim, &eps)?;
            let errs: Vec<String> = probe.errors.iter().map(|e| format!("{e:.2e}")).collect();
            println!(
                "{:<8} n={dim}: {}  slope {:.3}",
                probe.potential,
                errs.join(" "),
                probe.empirical_slope.unwrap_or(f64::NAN)
            );
        }
    }
    println!("{}", eikonal_vv::rate_lab::NO_RATE_CLAIMED);
    Ok(())
}
