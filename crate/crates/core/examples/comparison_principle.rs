//! Comparison on the zero set of `f`: ordering there propagates to the
//! whole interval, and strictly positive `f` forces uniqueness.

use eikonal_vv::potential::ZeroSet;
use eikonal_vv::viscosity_check::catalog;
use eikonal_vv::{check_comparison, PiecewisePoly};

fn main() -> eikonal_vv::Result<()> {
    let f = catalog::double_vee();
    let zeros = f.zero_set(1e-12);
    println!("zero set of f: {:?}", zeros.points);

    let (u1, u2) = (catalog::u1(), catalog::u2());
    println!("u1 <= u2: {:?}", check_comparison(&u1, &u2, &f, &zeros, 1e-9)?.status);
    println!("u2 <= u1: {:?}", check_comparison(&u2, &u1, &f, &zeros, 1e-9)?.status);

    // A function that is below u2 on the zero set but crosses it inside.
    let bump = PiecewisePoly::polynomial(-1.0, 1.0, [0.3, 0.0, -0.8])?;
    let v = check_comparison(&bump, &u2, &f, &ZeroSet::new(vec![-0.5, 0.5], vec![]), 1e-9)?;
    println!("bump <= u2: {:?} at x = {:?}", v.status, v.witness_x);

    // Empty zero set: the hypothesis is vacuous.
    let one = catalog::unit_speed();
    let v = check_comparison(&catalog::tent(), &catalog::tent(), &one, &one.zero_set(1e-12), 1e-9)?;
    println!("f = 1, tent vs tent: {:?}", v.status);
    Ok(())
}
