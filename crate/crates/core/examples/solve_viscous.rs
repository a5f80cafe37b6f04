//! Sample `p^ε` and `u^ε` for a piecewise-linear potential and compare with
//! the limit `u(r) = ∫_r^1 V`.
//!
//! cargo run --example solve_viscous -- [epsilon] [dim]

use eikonal_vv::{eval_u_eps, parse_potential, uniform_grid, ProblemSpec};

fn main() -> eikonal_vv::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(Ok(0.01), |s| s.parse()).expect("epsilon");
    let dim: u32 = args.next().map_or(Ok(2), |s| s.parse()).expect("dim");

    let potential = parse_potential(
        "# a well at r = 0.4 and a bump at 0.7
pl
0    0.3
0.4  0
0.7  1.2
1    0.5
",
    )?;
    let spec = ProblemSpec::new(potential, dim, epsilon)?;
    let sol = eval_u_eps(&spec, &uniform_grid(11))?;
    let limit = sol.limit_values();

    println!("V = {}, n = {dim}, eps = {epsilon:e}", spec.potential);
    println!("{:>6} {:>14} {:>14} {:>14}", "r", "p_eps", "u_eps", "u");
    for i in 0..sol.grid.len() {
        println!(
            "{:>6.2} {:>14.8} {:>14.8} {:>14.8}",
            sol.grid[i], sol.p_values[i], sol.u_values[i], limit[i]
        );
    }
    println!(
        "panels <= {}, simpson h <= {:e} ({} subintervals), error estimate {:.1e}",
        sol.meta.max_panels, sol.meta.simpson_spacing, sol.meta.simpson_intervals, sol.meta.estimated_error
    );
    Ok(())
}
