use std::path::Path;
use std::process::{Command, Output};

use polyfrac::cli::read_curve;

fn polyfrac(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfrac"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BAR: &str = "
mesh.generator = structured
mesh.domain = 0 0 20 4
mesh.nx = 20
mesh.ny = 4
mesh.cutouts = 9 0 11 1

material.E = 30000
material.nu = 0.2
material.thickness = 10

damage.criterion = von-mises
damage.k = 10
damage.alpha = 0.95
damage.beta = 300
damage.kappa0 = 1e-4

nonlocal.R = 2.5

solver.steps = 25
solver.increment = 0.0005
solver.deterministic = true

bc.fix.set = left
bc.fix.component = xy
bc.fix.value = 0
bc.pull.set = right
bc.pull.component = x
bc.pull.drive = 1

output.curve = bar.csv
output.vtk_dir = bar_vtk
output.vtk_every = 5
output.monitor.tip = right x
";

#[test]
fn preset_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyfrac(dir.path(), &["preset", "double-notched", "--out", "cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("cfg/double-notched.cfg");
    let text = std::fs::read_to_string(&path).unwrap().replace("solver.steps = 120", "solver.steps = 30");
    std::fs::write(&path, text).unwrap();

    let o = polyfrac(dir.path(), &["run", "cfg/double-notched.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("units: length mm"));
    let curve = dir.path().join("cfg/double-notched_curve.csv");
    let first = std::fs::read(&curve).unwrap();
    let (header, rows) = read_curve(&curve).unwrap();
    assert_eq!(header.last().unwrap(), "delta");
    assert_eq!(rows.len(), 30);
    let peak = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    assert!(peak > 0.0 && rows.last().unwrap()[2] < peak, "expected softening");
    assert!(dir.path().join("cfg/double-notched_vtk/step_00020.vtk").exists());

    let o = polyfrac(dir.path(), &["run", "cfg/double-notched.cfg"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&curve).unwrap(), first);
}

#[test]
fn failed_run_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BAR.to_string() + "solver.max_iter = 1\nsolver.bisection = 0\nsolver.tol_rel = 1e-10\n";
    std::fs::write(dir.path().join("bar.cfg"), cfg).unwrap();
    let o = polyfrac(dir.path(), &["run", "bar.cfg"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("error:"));
    let (_, rows) = read_curve(&dir.path().join("bar.csv")).unwrap();
    assert!(!rows.is_empty() && rows.len() < 25);
    assert!(dir.path().join("bar.csv.incomplete").exists());

    // a good run afterwards clears the marker
    std::fs::write(dir.path().join("bar.cfg"), BAR).unwrap();
    let o = polyfrac(dir.path(), &["run", "bar.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!dir.path().join("bar.csv.incomplete").exists());
    let (header, rows) = read_curve(&dir.path().join("bar.csv")).unwrap();
    assert_eq!(header.len(), 6);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[5] == r[1]));
    assert!(dir.path().join("bar_vtk/step_00025.vtk").exists());
}

#[test]
fn elastic_patch_and_convergence_commands() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bar.cfg"), BAR).unwrap();
    let o = polyfrac(dir.path(), &["elastic", "bar.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("reaction at unit control"));

    for name in ["patch", "plate-hole"] {
        assert!(polyfrac(dir.path(), &["preset", name, "--out", "."]).status.success());
    }
    let o = polyfrac(dir.path(), &["patch", "patch.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("patch test passed"));

    let o = polyfrac(dir.path(), &["convergence", "plate-hole.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("plate-hole_convergence.csv")).unwrap();
    assert!(report.starts_with("mesh_id,n_elem,h,l2_rel,h1_rel"));
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyfrac(dir.path(), &["preset", "nope"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("notched-beam"));

    std::fs::write(dir.path().join("bad.cfg"), BAR.replace("nonlocal.R = 2.5", "nonlocal.R = -1\nsolver.colour = red")).unwrap();
    let o = polyfrac(dir.path(), &["run", "bad.cfg"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("nonlocal.R") && err.contains("solver.colour"), "{err}");

    let o = polyfrac(dir.path(), &["run", "missing.cfg"]);
    assert!(!o.status.success());
}
