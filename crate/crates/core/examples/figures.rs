//! Write plot data for the four example functions through the `examples`
//! subcommand, then print a coarse table.
//!
//! cargo run --example figures -- [out_dir]

use eikonal_vv::io::{figure_functions, sample};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    let code = eikonal_vv::cli::run(["eikonal-vv", "examples", "--format", "svg-data", "--out", &out]);
    if code != 0 {
        std::process::exit(code);
    }
    for (name, u) in figure_functions() {
        let (xs, ys) = sample(&u, 9);
        let row: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("{x:+.2}:{y:+.4}")).collect();
        println!("{name:<10} {}", row.join(" "));
    }
}
