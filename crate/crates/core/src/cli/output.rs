//! Load-displacement curves as CSV and field snapshots as legacy VTK.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::config::Units;
use crate::solver::{Discretization, Snapshot, StepRecord};
use crate::{Error, Result};

pub const CURVE_HEADER: &str = "step,control_disp,reaction_force,newton_iters,max_omega";

/// Writes the curve; monitor columns follow the fixed ones when present.
/// Floats are written with shortest round-trip formatting.
pub fn write_curve<W: Write>(records: &[StepRecord], monitor_names: &[String], mut out: W) -> std::io::Result<()> {
    write!(out, "{CURVE_HEADER}")?;
    for m in monitor_names {
        write!(out, ",{m}")?;
    }
    writeln!(out)?;
    for r in records {
        write!(out, "{},{:?},{:?},{},{:?}", r.step, r.control, r.reaction, r.iterations, r.max_omega)?;
        for v in &r.monitors {
            write!(out, ",{v:?}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn emit_curve(records: &[StepRecord], monitor_names: &[String], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Input("no step records to write".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_curve(records, monitor_names, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Header names and numeric rows of a curve file.
pub fn read_curve(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header: Vec<String> = match lines.next() {
        Some(l) => l.map_err(|e| Error::io(path, e))?.split(',').map(str::to_string).collect(),
        None => return Err(Error::Input(format!("{} is empty", path.display()))),
    };
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        match row {
            Ok(r) if r.len() == header.len() => rows.push(r),
            _ => {
                return Err(Error::Parse {
                    path: path.into(),
                    line: n + 2,
                    message: format!("expected {} numeric columns", header.len()),
                })
            }
        }
    }
    Ok((header, rows))
}

/// Writes an unstructured grid with polygon cells, nodal `ux uy` and per
/// cell `omega_max` (max over the cell's points) and `eps_eq_nl` (mean).
pub fn write_vtk<W: Write>(disc: &Discretization, snap: &Snapshot, units: &Units, mut out: W) -> std::io::Result<()> {
    let mesh = disc.mesh();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    // the title line is limited to 256 characters
    writeln!(
        out,
        "step {} control {:?}; {}; cell omega_max = max over quadrature points, eps_eq_nl = mean",
        snap.step,
        snap.control,
        units.describe()
    )?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_nodes())?;
    for p in mesh.nodes() {
        writeln!(out, "{:?} {:?} 0", p.x, p.y)?;
    }
    let size: usize = mesh.elements().iter().map(|r| r.len() + 1).sum();
    writeln!(out, "CELLS {} {size}", mesh.num_elements())?;
    for ring in mesh.elements() {
        write!(out, "{}", ring.len())?;
        for v in ring {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_elements())?;
    for _ in mesh.elements() {
        writeln!(out, "7")?;
    }
    writeln!(out, "POINT_DATA {}", mesh.num_nodes())?;
    for (name, c) in [("ux", 0), ("uy", 1)] {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for n in 0..mesh.num_nodes() {
            writeln!(out, "{:?}", snap.d[2 * n + c])?;
        }
    }
    writeln!(out, "CELL_DATA {}", mesh.num_elements())?;
    writeln!(out, "SCALARS omega_max double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for el in disc.elements() {
        let m = el.gps().map(|g| snap.omega[g]).fold(0.0, f64::max);
        writeln!(out, "{m:?}")?;
    }
    writeln!(out, "SCALARS eps_eq_nl double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for el in disc.elements() {
        let mean = el.gps().map(|g| snap.eps_bar[g]).sum::<f64>() / el.num_gps() as f64;
        writeln!(out, "{mean:?}")?;
    }
    Ok(())
}

pub fn emit_vtk(disc: &Discretization, snap: &Snapshot, units: &Units, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_vtk(disc, snap, units, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::QuadratureRule;
    use crate::mesh::{generate_structured, Rect};

    fn record(step: usize, reaction: f64) -> StepRecord {
        StepRecord {
            step,
            control: 0.1 * step as f64,
            reaction,
            iterations: 3,
            max_omega: 0.25,
            monitors: vec![],
        }
    }

    #[test]
    fn one_record_is_two_lines() {
        let mut buf = Vec::new();
        write_curve(&[record(1, 2.5)], &[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), CURVE_HEADER);
    }

    #[test]
    fn curve_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let values = [1.0 / 3.0, -2.0e-17, 123456.78901234567, std::f64::consts::PI];
        let mut recs: Vec<StepRecord> = values.iter().enumerate().map(|(i, &v)| record(i + 1, v)).collect();
        for r in &mut recs {
            r.monitors = vec![r.reaction * 7.0];
        }
        emit_curve(&recs, &["tip".to_string()], &path).unwrap();
        let (header, rows) = read_curve(&path).unwrap();
        assert_eq!(header.last().unwrap(), "tip");
        for (r, row) in recs.iter().zip(&rows) {
            assert_eq!(row[2], r.reaction);
            assert_eq!(row[5], r.monitors[0]);
        }
        assert!(emit_curve(&[], &[], &path).is_err());
    }

    #[test]
    fn unit_square_vtk() {
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 1, 1, &[]).unwrap();
        let disc = Discretization::new(m, QuadratureRule::ThreePoint, 1.0).unwrap();
        let n = disc.num_gps();
        let snap = Snapshot {
            step: 1,
            control: 0.5,
            d: vec![0.0; 8],
            omega: (0..n).map(|g| g as f64 / 100.0).collect(),
            eps_bar: vec![2.0; n],
        };
        let mut buf = Vec::new();
        write_vtk(&disc, &snap, &Units::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("CELLS 1 5\n4 0 1 3 2\n"), "{text}");
        assert!(text.contains("CELL_TYPES 1\n7\n"));
        assert!(text.contains(&format!("omega_max double 1\nLOOKUP_TABLE default\n{:?}\n", (n - 1) as f64 / 100.0)));
        assert!(text.contains("eps_eq_nl double 1\nLOOKUP_TABLE default\n2.0\n"));
        assert!(text.lines().nth(1).unwrap().contains("length mm"));
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let r = emit_curve(&[record(1, 1.0)], &[], Path::new("/nonexistent-dir/x.csv"));
        assert!(matches!(r, Err(Error::Io { .. })));
    }
}
