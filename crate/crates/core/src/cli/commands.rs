use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;

use super::config::{parse_config, RunConfig};
use super::output::{emit_curve, emit_vtk};
use crate::bench::{patch_test, preset, preset_benchmarks, solve_elastic};
use crate::solver::{set_deterministic, Discretization, DofMap, Schedule, Snapshot, Solver};
use crate::{Error, Result};

fn say(out: &mut dyn Write, text: std::fmt::Arguments) {
    // console output is best effort
    let _ = out.write_fmt(text);
    let _ = out.write_all(b"\n");
}

fn external_forces(cfg: &RunConfig, disc: &Discretization) -> Vec<f64> {
    let mut f = vec![0.0; disc.num_dofs()];
    for load in &cfg.loads {
        let t = Vector2::new(load.traction[0], load.traction[1]);
        for (a, b) in f.iter_mut().zip(disc.traction_load(&load.edges, |_| t)) {
            *a += b;
        }
    }
    f
}

/// Builds the damage solver described by a run configuration.
pub fn build_solver(cfg: &RunConfig) -> Result<Solver> {
    cfg.require_run()?;
    let mesh = cfg.mesh()?.clone();
    let dofs = DofMap::new(2 * mesh.num_nodes(), cfg.constraints.clone())?;
    let disc = Discretization::new(mesh, cfg.quadrature, cfg.thickness)?;
    let f_ext = external_forces(cfg, &disc);
    let kernel = cfg.kernel.expect("checked by require_run");
    let block = cfg.solver.as_ref().expect("checked by require_run");
    let mut solver = Solver::new(disc, cfg.material()?.clone(), &kernel, dofs)?;
    solver.f_ext = f_ext;
    solver.settings = block.settings;
    solver.monitors = cfg.output.monitors.iter().map(|(_, m)| m.clone()).collect();
    solver.elastic_points = solver
        .disc
        .gp_positions()
        .iter()
        .map(|p| cfg.elastic_zones.iter().any(|z| z.contains(p)))
        .collect();
    Ok(solver)
}

fn write_snapshots(dir: &Path, disc: &Discretization, snaps: &[Snapshot], cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for s in snaps {
        let p = dir.join(format!("step_{:05}.vtk", s.step));
        emit_vtk(disc, s, &cfg.units, &p)?;
        paths.push(p);
    }
    Ok(paths)
}

/// Nonlinear damage run. On a failed step the curve and snapshots up to the
/// last converged step are still written, a `.incomplete` marker is placed
/// next to the curve and the step error is returned.
pub fn run(config: &Path, out: &mut dyn Write) -> Result<()> {
    let cfg = parse_config(config)?;
    let solver = build_solver(&cfg)?;
    let block = cfg.solver.as_ref().expect("validated");
    set_deterministic(block.deterministic);
    say(out, format_args!("units: {}", cfg.units.describe()));
    say(
        out,
        format_args!(
            "mesh: {} elements, {} nodes, {} quadrature points, {} nonlocal pairs",
            solver.disc.mesh().num_elements(),
            solver.disc.mesh().num_nodes(),
            solver.disc.num_gps(),
            solver.table.num_pairs()
        ),
    );
    let every = if cfg.output.vtk_dir.is_some() { cfg.output.vtk_every } else { 0 };
    let outcome = solver.run(&Schedule::uniform(block.steps, block.increment), every);
    let records = &outcome.state.records;
    let names: Vec<String> = cfg.output.monitors.iter().map(|(n, _)| n.clone()).collect();

    if let Some(path) = &cfg.output.curve {
        if !records.is_empty() {
            emit_curve(records, &names, path)?;
            say(out, format_args!("curve: {} ({} steps)", path.display(), records.len()));
        }
        let marker = PathBuf::from(format!("{}.incomplete", path.display()));
        match &outcome.failure {
            Some(e) => std::fs::write(&marker, format!("{e}\n")).map_err(|err| Error::io(&marker, err))?,
            None if marker.exists() => std::fs::remove_file(&marker).map_err(|err| Error::io(&marker, err))?,
            None => {}
        }
    }
    if let Some(dir) = &cfg.output.vtk_dir {
        let written = write_snapshots(dir, &solver.disc, &outcome.snapshots, &cfg)?;
        say(out, format_args!("snapshots: {} in {}", written.len(), dir.display()));
    }
    if let Some(peak) = records.iter().max_by(|a, b| a.reaction.total_cmp(&b.reaction)) {
        say(
            out,
            format_args!(
                "peak reaction {:.6e} at control {:.6e}; final max omega {:.4}",
                peak.reaction,
                peak.control,
                records.last().map_or(0.0, |r| r.max_omega)
            ),
        );
    }
    match outcome.failure {
        Some(e) => {
            say(out, format_args!("run stopped early after {} steps; outputs are partial", records.len()));
            Err(e)
        }
        None => Ok(()),
    }
}

/// Linear-elastic solve; driven conditions are applied at unit control.
pub fn elastic(config: &Path, out: &mut dyn Write) -> Result<()> {
    let cfg = parse_config(config)?;
    let mesh = cfg.mesh()?.clone();
    let model = cfg.elastic()?.clone();
    let dofs = DofMap::new(2 * mesh.num_nodes(), cfg.constraints.clone())?;
    let disc = Discretization::new(mesh, cfg.quadrature, cfg.thickness)?;
    let f_ext = external_forces(&cfg, &disc);
    let d = solve_elastic(&disc, &model, &dofs, &f_ext, 1.0)?;

    let mut r: Vec<f64> = f_ext.iter().map(|v| -v).collect();
    for (i, j, v) in disc.elastic_triplets(&model.elastic_matrix()) {
        r[i] += v * d[j];
    }
    say(out, format_args!("units: {}", cfg.units.describe()));
    let umax = (0..disc.mesh().num_nodes())
        .map(|n| Vector2::new(d[2 * n], d[2 * n + 1]).norm())
        .fold(0.0, f64::max);
    say(out, format_args!("max |u| = {umax:.6e}"));
    if dofs.is_driven() {
        say(out, format_args!("reaction at unit control = {:.6e}", dofs.reaction(&r)));
    }
    for (name, m) in &cfg.output.monitors {
        say(out, format_args!("{name} = {:.6e}", m.value(&d)));
    }
    if let Some(dir) = &cfg.output.vtk_dir {
        let n = disc.num_gps();
        let snap = Snapshot {
            step: 0,
            control: 1.0,
            d,
            omega: vec![0.0; n],
            eps_bar: vec![0.0; n],
        };
        let written = write_snapshots(dir, &disc, &[snap], &cfg)?;
        say(out, format_args!("snapshot: {}", written[0].display()));
    }
    Ok(())
}

pub fn convergence(config: &Path, out: &mut dyn Write) -> Result<()> {
    let cfg = parse_config(config)?;
    let (study, report_path) = cfg
        .convergence
        .clone()
        .ok_or_else(|| Error::Config(vec!["convergence.*: a convergence block is required for this command".into()]))?;
    let report = study.run()?;
    let mut text = Vec::new();
    report.write_csv(&mut text).expect("in-memory write");
    let _ = out.write_all(&text);
    if let Some(p) = &report_path {
        std::fs::write(p, &text).map_err(|e| Error::io(p, e))?;
        say(out, format_args!("report: {}", p.display()));
    }
    say(out, format_args!("L2 slope {:.4}", report.l2_slope));
    say(out, format_args!("energy slope {:.4}", report.h1_slope));
    Ok(())
}

pub fn patch(config: &Path, out: &mut dyn Write) -> Result<()> {
    const TOL: f64 = 1e-9;
    let cfg = parse_config(config)?;
    let field = cfg.patch_field.unwrap_or_default();
    let rep = patch_test(cfg.mesh()?, cfg.elastic()?, &field, cfg.quadrature)?;
    say(out, format_args!("interior nodes: {}", rep.interior_nodes));
    say(out, format_args!("max interior error (relative): {:.3e}", rep.max_interior_error));
    say(out, format_args!("max stress deviation (relative): {:.3e}", rep.max_stress_deviation));
    if rep.passes(TOL) {
        say(out, format_args!("patch test passed (tolerance {TOL:e})"));
        Ok(())
    } else {
        Err(Error::Input(format!("patch test failed: errors exceed {TOL:e}")))
    }
}

/// Writes `<dir>/<name>.cfg` and returns its path.
pub fn write_preset(name: &str, dir: &Path, out: &mut dyn Write) -> Result<PathBuf> {
    let p = preset(name).ok_or_else(|| {
        let names: Vec<&str> = preset_benchmarks().iter().map(|p| p.name).collect();
        Error::Input(format!("unknown preset `{name}`; available: {}", names.join(", ")))
    })?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{name}.cfg"));
    std::fs::write(&path, &p.config).map_err(|e| Error::io(&path, e))?;
    say(out, format_args!("{}: {}", p.description, path.display()));
    Ok(path)
}

