//! Interaction table of a refined mesh for both kernels, and nonlocal
//! smoothing of a localised field.

use polyfrac::basis::QuadratureRule;
use polyfrac::mesh::{generate_structured, refine_polytree, Rect, RefinementPlan};
use polyfrac::nonlocal::{build_table, KernelSpec};
use polyfrac::solver::Discretization;

fn main() -> polyfrac::Result<()> {
    let base = generate_structured(Rect::new(0.0, 0.0, 40.0, 10.0), 40, 10, &[])?;
    let mesh = refine_polytree(&base, &RefinementPlan::in_box(&base, &Rect::new(15.0, 0.0, 25.0, 10.0), 2, true))?;
    let disc = Discretization::new(mesh, QuadratureRule::OnePoint, 1.0)?;
    let (pos, vol) = (disc.gp_positions(), disc.gp_volumes());
    println!("{} quadrature points", pos.len());

    // unit spike on the points within 0.5 of x = 20
    let field: Vec<f64> = pos.iter().map(|p| if (p.x - 20.0).abs() < 0.5 { 1.0 } else { 0.0 }).collect();
    for (label, spec) in [("truncated", KernelSpec::truncated(2.0)?), ("gauss", KernelSpec::gauss(0.7, 2.0)?)] {
        let t = std::time::Instant::now();
        let table = build_table(pos, vol, &spec)?;
        let avg = table.average(&field)?;
        let width = pos.iter().zip(&avg).filter(|(_, v)| **v > 1e-3).map(|(p, _)| p.x);
        let (lo, hi) = width.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
        println!(
            "{label}: {} pairs in {:.1} ms, peak {:.3}, support x in [{lo:.2}, {hi:.2}]",
            table.num_pairs(),
            1e3 * t.elapsed().as_secs_f64(),
            avg.iter().copied().fold(0.0, f64::max)
        );
    }
    Ok(())
}
