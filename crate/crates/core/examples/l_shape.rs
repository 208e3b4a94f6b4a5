//! L-shaped specimen through the command layer: writes the preset, runs it
//! and reads the curve back.

use polyfrac::cli::commands::{run, write_preset};
use polyfrac::cli::read_curve;

fn main() -> polyfrac::Result<()> {
    let dir = std::env::temp_dir().join("polyfrac-l-shape");
    let mut out = std::io::stdout();
    let cfg = write_preset("l-shape", &dir, &mut out)?;
    run(&cfg, &mut out)?;
    let (header, rows) = read_curve(&dir.join("l-shape_curve.csv"))?;
    println!("{}", header.join(" | "));
    for row in rows.iter().step_by(10) {
        println!("{row:?}");
    }
    Ok(())
}
