//! Plate with a hole under remote tension: elastic solves on three mapped
//! meshes, errors against the Kirsch solution and fitted rates.

use polyfrac::bench::PlateHoleStudy;

fn main() -> polyfrac::Result<()> {
    let study = PlateHoleStudy::default();
    let t = std::time::Instant::now();
    let report = study.run()?;
    report.write_csv(std::io::stdout()).expect("stdout");
    println!("L2 slope {:.3}, energy slope {:.3}", report.l2_slope, report.h1_slope);
    println!("{:.2} s", t.elapsed().as_secs_f64());
    Ok(())
}
