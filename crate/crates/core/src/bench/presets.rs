//! Ready-to-run configuration files for the benchmark problems.
//!
//! Dimensions that are only shown in drawings are fixed here as plain
//! numbers; every preset lists them in its header comment.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Config file text.
    pub config: String,
}

const UNITS: &str = "units.length = mm
units.force = N
units.stress = MPa
";

fn beam(name: &str, notched: bool, radius: f64, refine_levels: usize, band_factor: f64) -> String {
    let cutout = if notched {
        "mesh.cutouts = 245 0 255 50\n"
    } else {
        ""
    };
    let band = band_factor * radius;
    format!(
        "# three-point bending beam{notch_note}
# 500 x 100 mm, span 450 mm, thickness 100 mm{notch_dims}
# load applied over the top nodes within 5 mm of midspan
{UNITS}
mesh.generator = structured
mesh.domain = 0 0 500 100
mesh.nx = 100
mesh.ny = 20
{cutout}mesh.quadrature = 1
mesh.refine.band.box = {x0} 0 {x1} 100
mesh.refine.band.levels = {refine_levels}

select.pin = nearest 25 0
select.roller = nearest 475 0
select.load = box 244.9 99.9 255.1 100.1

material.E = 20000
material.nu = 0.2
material.plane = stress
material.thickness = 100

damage.criterion = mazars
damage.alpha = 0.98
damage.beta = 300
damage.kappa0 = 9.0e-5
damage.elastic_zone.load = 235 90 265 100
damage.elastic_zone.pin = 15 0 35 10
damage.elastic_zone.roller = 465 0 485 10

nonlocal.kernel = truncated
nonlocal.R = {radius}

solver.steps = 120
solver.increment = 0.0025
solver.deterministic = true

bc.pin.set = pin
bc.pin.component = xy
bc.pin.value = 0
bc.roller.set = roller
bc.roller.component = y
bc.roller.value = 0
bc.load.set = load
bc.load.component = y
bc.load.drive = -1

output.curve = {name}_curve.csv
output.vtk_dir = {name}_vtk
output.vtk_every = 20
output.monitor.midspan = load y
",
        notch_note = if notched { ", central notch" } else { " without notch" },
        notch_dims = if notched { "\n# notch 10 mm wide, 50 mm deep" } else { "" },
        x0 = 250.0 - band,
        x1 = 250.0 + band,
    )
}

fn l_shape() -> String {
    format!(
        "# L-shaped specimen, 500 x 500 mm with a 250 x 250 mm corner removed
# short bottom edge clamped; upward displacement at (470, 250) near the
# right end of the lower face of the long arm; thickness 100 mm
{UNITS}
mesh.generator = structured
mesh.domain = 0 0 500 500
mesh.nx = 32
mesh.ny = 32
mesh.cutouts = 250 0 500 250

select.load = nearest 470 250

material.E = 25850
material.nu = 0.18
material.plane = stress
material.thickness = 100

damage.criterion = von-mises
damage.k = 10
damage.alpha = 0.98
damage.beta = 350
damage.kappa0 = {kappa0:?}
damage.elastic_zone.load = 450 250 490 270

nonlocal.kernel = truncated
nonlocal.R = 10

solver.steps = 100
solver.increment = 0.005
solver.deterministic = true

bc.clamp.set = bottom
bc.clamp.component = xy
bc.clamp.value = 0
bc.load.set = load
bc.load.component = y
bc.load.drive = 1

output.curve = l-shape_curve.csv
output.vtk_dir = l-shape_vtk
output.vtk_every = 20
output.monitor.load_point = load y
",
        kappa0 = 2.7 / 25850.0
    )
}

fn galvez() -> String {
    format!(
        "# mixed-mode notched beam, 675 x 150 mm, thickness 50 mm
# notch 5 mm wide and 75 mm deep at midspan
# supports at x = 37.5 and 637.5 on the bottom, load at x = 487.5 on the top
# CMOD: horizontal opening between the two notch mouth corners
{UNITS}
mesh.generator = structured
mesh.domain = 0 0 675 150
mesh.nx = 135
mesh.ny = 30
mesh.cutouts = 335 0 340 75

select.pin = nearest 37.5 0
select.roller = nearest 637.5 0
select.load = nearest 487.5 150
select.mouth_left = nearest 335 0
select.mouth_right = nearest 340 0

material.E = 38000
material.nu = 0.18
material.plane = stress
material.thickness = 50

damage.criterion = von-mises
damage.k = 19
damage.alpha = 0.98
damage.beta = 400
damage.kappa0 = 0.9e-4
damage.elastic_zone.load = 475 140 500 150
damage.elastic_zone.pin = 27 0 48 10
damage.elastic_zone.roller = 627 0 648 10

nonlocal.kernel = truncated
nonlocal.R = 5

solver.steps = 100
solver.increment = 0.002
solver.deterministic = true

bc.pin.set = pin
bc.pin.component = xy
bc.pin.value = 0
bc.roller.set = roller
bc.roller.component = y
bc.roller.value = 0
bc.load.set = load
bc.load.component = y
bc.load.drive = -1

output.curve = {name}_curve.csv
output.vtk_dir = {name}_vtk
output.vtk_every = 20
output.monitor.point_b = load y
output.opening.cmod = mouth_left mouth_right x
",
        name = "galvez"
    )
}

fn double_notched() -> String {
    format!(
        "# double-edge-notched tension specimen, 60 x 125 mm, thickness 50 mm
# notches 5 x 5 mm on both sides at mid-height (y = 60 to 65)
# bottom fixed, top pulled; gauge length 35 mm from y = 45 to y = 80
{UNITS}
mesh.generator = structured
mesh.domain = 0 0 60 125
mesh.nx = 24
mesh.ny = 50
mesh.cutouts = 0 60 5 65; 55 60 60 65

select.gauge_low = nearest 0 45
select.gauge_high = nearest 0 80

material.E = 18000
material.nu = 0.2
material.plane = stress
material.thickness = 50

damage.criterion = von-mises
damage.k = 10
damage.alpha = 0.96
damage.beta = 350
damage.kappa0 = 1.0e-4

nonlocal.kernel = truncated
nonlocal.R = 3

solver.steps = 120
solver.increment = 0.0005
solver.deterministic = true

bc.base.set = bottom
bc.base.component = xy
bc.base.value = 0
bc.grip.set = top
bc.grip.component = x
bc.grip.value = 0
bc.pull.set = top
bc.pull.component = y
bc.pull.drive = 1

output.curve = double-notched_curve.csv
output.vtk_dir = double-notched_vtk
output.vtk_every = 20
output.opening.delta = gauge_low gauge_high y
"
    )
}

fn plate_hole() -> String {
    format!(
        "# quarter plate with a hole: a = 0.4, plate 4 x 2, remote tension 10
# exact boundary tractions; meshes n_r = n_t = 8, 16, 32
{UNITS}
material.E = 2.1e5
material.nu = 0.33
material.plane = stress

convergence.levels = 8 16 32
convergence.sigma = 10
convergence.a = 0.4
convergence.half_length = 2
convergence.half_height = 1
convergence.report = plate-hole_convergence.csv
"
    )
}

fn patch() -> String {
    format!(
        "# linear patch test on a unit square, 2 x 2 cells, lower-left cell refined
{UNITS}
mesh.generator = structured
mesh.domain = 0 0 1 1
mesh.nx = 2
mesh.ny = 2
mesh.balance = false
mesh.refine.corner.box = 0 0 0.5 0.5
mesh.refine.corner.levels = 1

material.E = 30000
material.nu = 0.25
material.plane = stress

patch.field = 1e-3 2e-3 -5e-4 -7e-4 8e-4 1.5e-3
"
    )
}

/// All shipped presets.
pub fn preset_benchmarks() -> Vec<Preset> {
    vec![
        Preset {
            name: "notched-beam",
            description: "three-point bending of a notched beam (Mazars)",
            config: beam("notched-beam", true, 4.0, 2, 5.0),
        },
        Preset {
            name: "notched-beam-fine",
            description: "notched beam with one more refinement level in a narrower process-zone band",
            config: beam("notched-beam-fine", true, 4.0, 3, 2.5),
        },
        Preset {
            name: "unnotched-beam",
            description: "three-point bending of a beam without notch (Mazars)",
            config: beam("unnotched-beam", false, 8.0, 1, 5.0),
        },
        Preset {
            name: "l-shape",
            description: "L-shaped specimen under mixed-mode loading (modified von Mises)",
            config: l_shape(),
        },
        Preset {
            name: "galvez",
            description: "mixed-mode notched beam with CMOD monitor (modified von Mises)",
            config: galvez(),
        },
        Preset {
            name: "double-notched",
            description: "double-edge-notched tension specimen (modified von Mises)",
            config: double_notched(),
        },
        Preset {
            name: "plate-hole",
            description: "plate-with-hole convergence study against the Kirsch solution",
            config: plate_hole(),
        },
        Preset {
            name: "patch",
            description: "linear patch test on a mesh with hanging nodes",
            config: patch(),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    preset_benchmarks().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let all = preset_benchmarks();
        for (i, p) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|q| q.name != p.name));
            assert!(preset(p.name).is_some());
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn beam_refinement_band_scales_with_radius() {
        assert!(beam("x", false, 8.0, 1, 5.0).contains("mesh.refine.band.box = 210 0 290 100"));
        assert!(beam("x", true, 4.0, 3, 2.5).contains("mesh.refine.band.box = 240 0 260 100"));
    }
}
