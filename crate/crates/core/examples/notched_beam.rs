//! Notched beam in three-point bending from the shipped preset. Pass a step
//! count to shorten the run (default 60).

use std::path::Path;

use polyfrac::bench::preset;
use polyfrac::cli::commands::build_solver;
use polyfrac::cli::parse_config_str;

fn main() -> polyfrac::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let p = preset("notched-beam").expect("shipped preset");
    let cfg = parse_config_str(&p.config, Path::new("."))?;
    let solver = build_solver(&cfg)?;
    let inc = cfg.solver.as_ref().expect("preset has a solver block").increment;
    println!(
        "{} elements, {} quadrature points, {} nonlocal pairs",
        solver.disc.mesh().num_elements(),
        solver.disc.num_gps(),
        solver.table.num_pairs()
    );
    let mut state = solver.initial_state();
    for _ in 0..steps {
        state = solver.solve_step(&state, inc)?;
        let r = state.records.last().expect("one record per step");
        println!("{:.4} mm  {:>8.1} N  iters {}  max omega {:.4}", r.control, r.reaction, r.iterations, r.max_omega);
    }
    Ok(())
}
