//! Viscosity sub/super-solution checks on the textbook one-dimensional
//! examples, plus the exact radial limit.

use eikonal_vv::viscosity_check::{catalog, subdifferential_at, superdifferential_at};
use eikonal_vv::{
    check_solution, check_solution_with, check_supersolution, maximal_radial_solution, CheckOptions, Dirichlet,
    PiecewisePoly, PotentialProfile, Verdict,
};

fn show(name: &str, v: &Verdict) {
    match v.witness_x {
        Some(x) => println!("{name:<24} {:?} at x = {x} (margin {:.3e})", v.status, v.margin),
        None => println!("{name:<24} {:?} (margin {:.3e})", v.status, v.margin),
    }
}

fn main() -> eikonal_vv::Result<()> {
    let one = catalog::unit_speed();
    let f = catalog::double_vee();

    show("1 - |x|, f = 1", &check_solution(&catalog::tent(), &one, 1e-9)?);
    show("|x| - 1, f = 1 (super)", &check_supersolution(&catalog::inverted_tent(), &one, 1e-9)?);
    show("u1", &check_solution(&catalog::u1(), &f, 1e-9)?);
    show("u2", &check_solution(&catalog::u2(), &f, 1e-9)?);

    let u1 = catalog::u1();
    println!("u1: D+ u1(0) = {:?}, D- u1(0) = {:?}", superdifferential_at(&u1, 0.0)?, subdifferential_at(&u1, 0.0)?);

    // The radial limit only carries u = 0 at r = 1.
    let v = PotentialProfile::vee(0.3)?;
    let opts = CheckOptions { dirichlet: Dirichlet::Right, ..CheckOptions::default() };
    let u = maximal_radial_solution(&v);
    show("radial limit, V = |r-0.3|", &check_solution_with(&u, &PiecewisePoly::from_potential(&v), &opts)?);
    Ok(())
}
