//! As ε → 0 the viscous solution for `V(r) = |r - 1/2|` picks out the maximal
//! solution `u2` (value 1/4 at the origin), not `u1` (value 0).

use eikonal_vv::viscosity_check::catalog;
use eikonal_vv::{eval_u_eps, maximal_radial_solution, uniform_grid, PotentialProfile, ProblemSpec};

fn main() -> eikonal_vv::Result<()> {
    let v = PotentialProfile::vee(0.5)?;
    let (u1, u2) = (catalog::u1(), catalog::u2());
    println!("u1(0) = {}, u2(0) = {}", u1.eval(0.0), u2.eval(0.0));

    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let sol = eval_u_eps(&ProblemSpec::new(v.clone(), 1, eps)?, &uniform_grid(101))?;
        let u0 = sol.u_values[0];
        println!("eps = {eps:>6.0e}: u_eps(0) = {u0:.6}  |u_eps(0) - u2(0)| = {:.2e}", (u0 - 0.25).abs());
    }

    // The limit on [0, 1], mirrored to [-1, 1], is u2.
    let limit = maximal_radial_solution(&v).evenly_reflect()?;
    let gap = (0..=200)
        .map(|i| -1.0 + i as f64 / 100.0)
        .map(|x| (limit.eval(x) - u2.eval(x)).abs())
        .fold(0.0, f64::max);
    println!("sup |reflected limit - u2| = {gap:.1e}");
    Ok(())
}
