//! Cross-check the quadrature evaluation of `p^ε` against the independent
//! ODE march for a few potentials, dimensions and ε.

use eikonal_vv::{eval_p_eps, ode_oracle_p, uniform_grid, PotentialProfile, ProblemSpec};

fn main() -> eikonal_vv::Result<()> {
    let potentials = [
        PotentialProfile::constant(1.0)?,
        PotentialProfile::vee(0.5)?,
        PotentialProfile::piecewise_linear(vec![0.0, 0.2, 0.6, 1.0], vec![1.5, 0.0, 0.8, 0.1])?,
    ];
    println!("{:<34} {:>3} {:>8} {:>12}", "potential", "n", "eps", "sup |diff|");
    for v in &potentials {
        for dim in 1..=3 {
            for eps in [1e-1, 1e-2] {
                let grid = uniform_grid(1001.max((8.0 / eps) as usize + 1));
                let spec = ProblemSpec::new(v.clone(), dim, eps)?;
                let oracle = ode_oracle_p(&spec, &grid)?;
                let mut worst = 0.0f64;
                for (&r, q) in grid.iter().zip(&oracle) {
                    worst = worst.max((eval_p_eps(&spec, r)? - q).abs());
                }
                println!("{:<34} {dim:>3} {eps:>8.0e} {worst:>12.3e}", v.to_string());
            }
        }
    }

    // The oracle refuses grids too coarse for its frozen-coefficient steps.
    let spec = ProblemSpec::new(PotentialProfile::constant(1.0)?, 1, 1e-3)?;
    match ode_oracle_p(&spec, &uniform_grid(101)) {
        Err(e) => println!("coarse grid: {e}"),
        Ok(_) => println!("coarse grid unexpectedly accepted"),
    }
    Ok(())
}
