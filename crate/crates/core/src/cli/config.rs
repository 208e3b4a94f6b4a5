//! Line-oriented run configuration: `section.key = value`, `#` comments.
//!
//! Parsing is strict. Unknown or repeated keys, malformed values and
//! references to missing mesh sets are all collected and reported together.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use crate::basis::QuadratureRule;
use crate::bench::{AffineField, PlateHoleStudy};
use crate::material::{Criterion, MaterialModel, PlaneCondition};
use crate::mesh::{generate_quarter_plate_hole, generate_structured, load_mesh, refine_polytree, PolyMesh, Rect, RefinementPlan};
use crate::nonlocal::{KernelKind, KernelSpec};
use crate::solver::{Constraint, Monitor, NewtonSettings};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Units {
    pub length: String,
    pub force: String,
    pub stress: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            length: "mm".into(),
            force: "N".into(),
            stress: "MPa".into(),
        }
    }
}

impl Units {
    pub fn describe(&self) -> String {
        format!("length {}, force {}, stress {}", self.length, self.force, self.stress)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverBlock {
    pub steps: usize,
    pub increment: f64,
    pub settings: NewtonSettings,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadBlock {
    pub label: String,
    pub edges: Vec<(usize, usize)>,
    pub traction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    pub curve: Option<PathBuf>,
    pub vtk_dir: Option<PathBuf>,
    pub vtk_every: usize,
    pub monitors: Vec<(String, Monitor)>,
}

/// A validated configuration with its mesh already built.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: PathBuf,
    pub units: Units,
    pub mesh: Option<PolyMesh>,
    pub quadrature: QuadratureRule,
    pub thickness: f64,
    /// Elasticity only; present whenever `material.E` and `material.nu` are.
    pub elastic: Option<MaterialModel>,
    /// Elasticity plus the damage block.
    pub material: Option<MaterialModel>,
    pub kernel: Option<KernelSpec>,
    pub solver: Option<SolverBlock>,
    pub constraints: Vec<Constraint>,
    pub driven_blocks: usize,
    pub loads: Vec<LoadBlock>,
    /// Regions whose quadrature points stay undamaged.
    pub elastic_zones: Vec<Rect>,
    pub output: OutputBlock,
    pub convergence: Option<(PlateHoleStudy, Option<PathBuf>)>,
    pub patch_field: Option<AffineField>,
}

impl RunConfig {
    pub fn mesh(&self) -> Result<&PolyMesh> {
        self.mesh.as_ref().ok_or_else(|| Error::Config(vec!["mesh.generator: required for this command".into()]))
    }

    pub fn elastic(&self) -> Result<&MaterialModel> {
        self.elastic
            .as_ref()
            .ok_or_else(|| Error::Config(vec!["material.E / material.nu: required for this command".into()]))
    }

    pub fn material(&self) -> Result<&MaterialModel> {
        self.material
            .as_ref()
            .ok_or_else(|| Error::Config(vec!["damage.*: a damage block is required for this command".into()]))
    }

    /// Checks everything a damage run needs, listing all gaps.
    pub fn require_run(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.mesh.is_none() {
            errs.push("mesh.generator: required".to_string());
        }
        if self.material.is_none() {
            errs.push("damage.kappa0: required (damage block missing)".into());
        }
        if self.kernel.is_none() {
            errs.push("nonlocal.R: required".into());
        }
        if self.solver.is_none() {
            errs.push("solver.steps / solver.increment: required".into());
        }
        if self.driven_blocks != 1 {
            errs.push(format!(
                "bc.*.drive: exactly one driven boundary condition is required (found {})",
                self.driven_blocks
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut cfg = parse_config_str(&text, &base)?;
    cfg.source = path.to_path_buf();
    Ok(cfg)
}

struct Entry {
    value: String,
    line: usize,
}

struct Reader {
    entries: BTreeMap<String, Entry>,
    order: Vec<String>,
    used: HashSet<String>,
    errors: Vec<String>,
}

impl Reader {
    fn new(text: &str) -> Self {
        let mut r = Reader {
            entries: BTreeMap::new(),
            order: Vec::new(),
            used: HashSet::new(),
            errors: Vec::new(),
        };
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                r.errors.push(format!("line {line}: expected `key = value`"));
                continue;
            };
            let key = k.trim().to_string();
            let value = v.trim().trim_matches('"').trim().to_string();
            if key.is_empty() || key.split('.').any(str::is_empty) {
                r.errors.push(format!("line {line}: malformed key `{}`", k.trim()));
                continue;
            }
            if let Some(prev) = r.entries.get(&key) {
                r.errors.push(format!("line {line}: {key}: duplicate key (first set on line {})", prev.line));
                continue;
            }
            r.order.push(key.clone());
            r.entries.insert(key, Entry { value, line });
        }
        r
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.order.iter().any(|k| k.starts_with(prefix))
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        let e = self.entries.get(key)?;
        self.used.insert(key.to_string());
        Some((e.value.clone(), e.line))
    }

    fn err(&mut self, key: &str, line: usize, msg: impl std::fmt::Display) {
        self.errors.push(format!("line {line}: {key}: {msg}"));
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let (v, line) = self.raw(key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(key, line, format!("expected {what}, got `{v}`"));
                None
            }
        }
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let (v, line) = self.raw(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.err(key, line, format!("expected a finite number, got `{v}`"));
                None
            }
        }
    }

    fn positive(&mut self, key: &str) -> Option<f64> {
        let line = self.entries.get(key)?.line;
        let v = self.number(key)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.err(key, line, format!("must be positive (got {v})"));
            None
        }
    }

    fn required_number(&mut self, key: &str) -> Option<f64> {
        if !self.entries.contains_key(key) {
            self.errors.push(format!("{key}: required"));
            return None;
        }
        self.number(key)
    }

    fn numbers(&mut self, key: &str, count: Option<usize>) -> Option<Vec<f64>> {
        let (v, line) = self.raw(key)?;
        let parsed: std::result::Result<Vec<f64>, _> = v.split_whitespace().map(str::parse::<f64>).collect();
        match parsed {
            Ok(xs) if xs.iter().all(|x| x.is_finite()) && count.map_or(!xs.is_empty(), |c| xs.len() == c) => Some(xs),
            _ => {
                let want = count.map_or("a list of numbers".to_string(), |c| format!("{c} numbers"));
                self.err(key, line, format!("expected {want}, got `{v}`"));
                None
            }
        }
    }

    fn rect(&mut self, key: &str) -> Option<Rect> {
        let line = self.entries.get(key)?.line;
        let v = self.numbers(key, Some(4))?;
        if v[2] > v[0] && v[3] > v[1] {
            Some(Rect::new(v[0], v[1], v[2], v[3]))
        } else {
            self.err(key, line, "box needs x0 < x1 and y0 < y1");
            None
        }
    }

    fn choice(&mut self, key: &str, options: &[&str]) -> Option<String> {
        let (v, line) = self.raw(key)?;
        if options.contains(&v.as_str()) {
            Some(v)
        } else {
            self.err(key, line, format!("expected one of {}, got `{v}`", options.join(", ")));
            None
        }
    }

    /// Distinct labels `x` of keys `prefix.x.<rest>` or `prefix.x`, in file order.
    fn labels(&self, prefix: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for k in &self.order {
            if let Some(rest) = k.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) {
                let label = rest.split('.').next().unwrap_or("").to_string();
                if !out.contains(&label) {
                    out.push(label);
                }
            }
        }
        out
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }
}

fn component(s: &str) -> Option<Vec<usize>> {
    match s {
        "x" => Some(vec![0]),
        "y" => Some(vec![1]),
        "xy" => Some(vec![0, 1]),
        _ => None,
    }
}

fn set_listing(mesh: &PolyMesh, edges: bool) -> String {
    let names: Vec<&str> = if edges {
        mesh.edge_sets().keys().map(String::as_str).collect()
    } else {
        mesh.node_sets().keys().map(String::as_str).collect()
    };
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

/// Parses configuration text; relative paths resolve against `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let mut r = Reader::new(text);

    let mut units = Units::default();
    for (key, slot) in [
        ("units.length", &mut units.length),
        ("units.force", &mut units.force),
        ("units.stress", &mut units.stress),
    ] {
        if let Some((v, _)) = r.raw(key) {
            *slot = v;
        }
    }

    // elasticity
    let e = r.positive("material.E");
    let nu = r.number("material.nu");
    if let Some(nu) = nu {
        if !(nu > -1.0 && nu < 0.5) {
            let line = r.line_of("material.nu");
            r.err("material.nu", line, format!("must lie in (-1, 0.5) (got {nu})"));
        }
    }
    let plane = match r.choice("material.plane", &["stress", "strain"]).as_deref() {
        Some("strain") => PlaneCondition::Strain,
        _ => PlaneCondition::Stress,
    };
    let thickness = r.positive("material.thickness").unwrap_or(1.0);
    let quadrature = match r.choice("mesh.quadrature", &["1", "3"]).as_deref() {
        Some("1") => QuadratureRule::OnePoint,
        _ => QuadratureRule::ThreePoint,
    };

    // mesh
    let mesh = build_mesh(&mut r, base_dir);
    let needs_material = r.has_prefix("mesh.") || r.has_prefix("convergence.");
    if needs_material {
        if !r.entries.contains_key("material.E") {
            r.errors.push("material.E: required".into());
        }
        if !r.entries.contains_key("material.nu") {
            r.errors.push("material.nu: required".into());
        }
    }

    // damage
    let mut material = None;
    let mut elastic_zones = Vec::new();
    if r.has_prefix("damage.") {
        let criterion = match r.choice("damage.criterion", &["mazars", "von-mises"]).as_deref() {
            Some("von-mises") => {
                let k = if r.entries.contains_key("damage.k") {
                    r.positive("damage.k")
                } else {
                    r.errors.push("damage.k: required for the von-mises criterion".into());
                    None
                };
                k.map(|k| Criterion::ModifiedVonMises { k })
            }
            _ => Some(Criterion::Mazars),
        };
        for label in r.labels("damage.elastic_zone") {
            if let Some(b) = r.rect(&format!("damage.elastic_zone.{label}")) {
                elastic_zones.push(b);
            }
        }
        let alpha = r.required_number("damage.alpha");
        let beta = r.required_number("damage.beta");
        let kappa0 = r.required_number("damage.kappa0");
        if let (Some(e), Some(nu), Some(c), Some(a), Some(b), Some(k0)) = (e, nu, criterion, alpha, beta, kappa0) {
            let m = MaterialModel {
                e,
                nu,
                plane,
                criterion: c,
                alpha: a,
                beta: b,
                kappa0: k0,
            };
            match m.validate() {
                Ok(()) => material = Some(m),
                Err(err) => r.errors.push(format!("damage: {err}")),
            }
        }
    }

    // nonlocal
    let mut kernel = None;
    if r.has_prefix("nonlocal.") {
        let kind = match r.choice("nonlocal.kernel", &["gauss", "truncated"]).as_deref() {
            Some("gauss") => KernelKind::Gauss,
            _ => KernelKind::TruncatedQuadratic,
        };
        let radius = if r.entries.contains_key("nonlocal.R") {
            r.positive("nonlocal.R")
        } else {
            r.errors.push("nonlocal.R: required".into());
            None
        };
        let lc_given = r.positive("nonlocal.lc");
        let ratio = r.positive("nonlocal.ratio");
        let lc = match (lc_given, ratio, radius) {
            (Some(lc), _, _) => Some(lc),
            (None, Some(q), Some(rad)) => Some(rad / q),
            (None, None, Some(rad)) if kind == KernelKind::TruncatedQuadratic => Some(rad),
            (None, None, Some(_)) => {
                r.errors.push("nonlocal.lc: the gauss kernel needs nonlocal.lc or nonlocal.ratio (= R / lc)".into());
                None
            }
            _ => None,
        };
        if let (Some(rad), Some(lc)) = (radius, lc) {
            match KernelSpec::new(kind, rad, lc) {
                Ok(k) => kernel = Some(k),
                Err(err) => r.errors.push(format!("nonlocal: {err}")),
            }
        }
    }

    // solver
    let mut solver = None;
    if r.has_prefix("solver.") {
        let d = NewtonSettings::default();
        let steps = r.parse::<usize>("solver.steps", "a step count");
        let increment = r.required_number("solver.increment");
        if !r.entries.contains_key("solver.steps") {
            r.errors.push("solver.steps: required".into());
        }
        let settings = NewtonSettings {
            tol_rel: r.positive("solver.tol_rel").unwrap_or(d.tol_rel),
            tol_abs: r.positive("solver.tol_abs").unwrap_or(d.tol_abs),
            max_iter: r.parse::<usize>("solver.max_iter", "an iteration count").unwrap_or(d.max_iter),
            bisection_depth: r.parse::<usize>("solver.bisection", "a depth").unwrap_or(d.bisection_depth),
        };
        let deterministic = r.parse::<bool>("solver.deterministic", "true or false").unwrap_or(false);
        if let (Some(steps), Some(increment)) = (steps, increment) {
            if steps == 0 {
                let line = r.line_of("solver.steps");
                r.err("solver.steps", line, "must be at least 1");
            } else {
                solver = Some(SolverBlock {
                    steps,
                    increment,
                    settings,
                    deterministic,
                });
            }
        }
    }

    // boundary conditions, loads, monitors
    let mut constraints = Vec::new();
    let mut driven_blocks = 0;
    let mut loads = Vec::new();
    let mut monitors = Vec::new();
    for label in r.labels("bc") {
        let p = |k: &str| format!("bc.{label}.{k}");
        let set = r.raw(&p("set"));
        let comp = r.raw(&p("component"));
        let value = r.number(&p("value"));
        let drive = r.number(&p("drive"));
        let Some((set, sline)) = set else {
            r.errors.push(format!("{}: required", p("set")));
            continue;
        };
        let comps = match comp {
            Some((c, line)) => component(&c).or_else(|| {
                r.err(&p("component"), line, format!("expected x, y or xy, got `{c}`"));
                None
            }),
            None => {
                r.errors.push(format!("{}: required", p("component")));
                None
            }
        };
        if value.is_some() && drive.is_some() {
            r.errors.push(format!("bc.{label}: set either value or drive, not both"));
            continue;
        }
        if drive.is_some() {
            driven_blocks += 1;
        }
        let Some(mesh) = mesh.as_ref() else { continue };
        let Some(nodes) = mesh.node_set(&set) else {
            r.err(&p("set"), sline, format!("unknown node set `{set}`; available: {}", set_listing(mesh, false)));
            continue;
        };
        if let Some(comps) = comps {
            for &n in nodes {
                for &c in &comps {
                    constraints.push(match drive {
                        Some(s) => Constraint::driven(n, c, s),
                        None => Constraint::fixed(n, c, value.unwrap_or(0.0)),
                    });
                }
            }
        }
    }
    for label in r.labels("load") {
        let p = |k: &str| format!("load.{label}.{k}");
        let set = r.raw(&p("edgeset"));
        let tr = r.numbers(&p("traction"), Some(2));
        if !r.entries.contains_key(&p("traction")) {
            r.errors.push(format!("{}: required", p("traction")));
        }
        let Some((set, line)) = set else {
            r.errors.push(format!("{}: required", p("edgeset")));
            continue;
        };
        let Some(mesh) = mesh.as_ref() else { continue };
        match (mesh.edge_set(&set), tr) {
            (None, _) => r.err(&p("edgeset"), line, format!("unknown edge set `{set}`; available: {}", set_listing(mesh, true))),
            (Some(edges), Some(t)) => loads.push(LoadBlock {
                label: label.clone(),
                edges: edges.to_vec(),
                traction: [t[0], t[1]],
            }),
            _ => {}
        }
    }
    for kind in ["monitor", "opening"] {
        for label in r.labels(&format!("output.{kind}")) {
            let key = format!("output.{kind}.{label}");
            let Some((v, line)) = r.raw(&key) else { continue };
            let parts: Vec<&str> = v.split_whitespace().collect();
            let want = if kind == "monitor" { 2 } else { 3 };
            if parts.len() != want {
                let form = if kind == "monitor" { "<set> x|y" } else { "<set> <set> x|y" };
                r.err(&key, line, format!("expected `{form}`, got `{v}`"));
                continue;
            }
            let comp = match parts[want - 1] {
                "x" => 0,
                "y" => 1,
                other => {
                    r.err(&key, line, format!("component must be x or y, got `{other}`"));
                    continue;
                }
            };
            let Some(mesh) = mesh.as_ref() else { continue };
            let mut nodes = Vec::new();
            for s in &parts[..want - 1] {
                match mesh.node_set(s).and_then(|n| n.first()) {
                    Some(&n) => nodes.push(n),
                    None => r.err(&key, line, format!("unknown or empty node set `{s}`; available: {}", set_listing(mesh, false))),
                }
            }
            if nodes.len() == want - 1 {
                let m = if kind == "monitor" {
                    Monitor::Displacement {
                        node: nodes[0],
                        component: comp,
                    }
                } else {
                    Monitor::Opening {
                        a: nodes[0],
                        b: nodes[1],
                        component: comp,
                    }
                };
                monitors.push((label.clone(), m));
            }
        }
    }

    let output = OutputBlock {
        curve: r.raw("output.curve").map(|(v, _)| base_dir.join(v)),
        vtk_dir: r.raw("output.vtk_dir").map(|(v, _)| base_dir.join(v)),
        vtk_every: r.parse::<usize>("output.vtk_every", "a step count").unwrap_or(10),
        monitors,
    };

    // convergence study
    let mut convergence = None;
    if r.has_prefix("convergence.") {
        let d = PlateHoleStudy::default();
        let levels = r.numbers("convergence.levels", None).map(|v| v.iter().map(|&x| x as usize).collect::<Vec<_>>());
        if let Some(l) = &levels {
            if l.len() < 3 || l.iter().any(|&n| n < 2) {
                let line = r.line_of("convergence.levels");
                r.err("convergence.levels", line, "need at least three mesh levels, each at least 2");
            }
        }
        let study = PlateHoleStudy {
            sigma: r.positive("convergence.sigma").unwrap_or(d.sigma),
            a: r.positive("convergence.a").unwrap_or(d.a),
            half_length: r.positive("convergence.half_length").unwrap_or(d.half_length),
            half_height: r.positive("convergence.half_height").unwrap_or(d.half_height),
            e: e.unwrap_or(d.e),
            nu: nu.unwrap_or(d.nu),
            plane,
            thickness,
            rule: quadrature,
            levels: levels.unwrap_or(d.levels),
        };
        let report = r.raw("convergence.report").map(|(v, _)| base_dir.join(v));
        convergence = Some((study, report));
    }

    let patch_field = r.numbers("patch.field", Some(6)).map(|v| AffineField {
        u: [v[0], v[1], v[2]],
        v: [v[3], v[4], v[5]],
    });

    // anything left over is unknown
    let unknown: Vec<String> = r
        .order
        .iter()
        .filter(|k| !r.used.contains(*k))
        .map(|k| format!("line {}: {k}: unknown key", r.entries[k].line))
        .collect();
    r.errors.extend(unknown);

    if !r.errors.is_empty() {
        return Err(Error::Config(r.errors));
    }

    // damage parameters of the elastic model are placeholders
    let elastic = match (e, nu) {
        (Some(e), Some(nu)) => Some(MaterialModel {
            e,
            nu,
            plane,
            criterion: Criterion::Mazars,
            alpha: 0.9,
            beta: 1.0,
            kappa0: 1.0,
        }),
        _ => None,
    };

    Ok(RunConfig {
        source: PathBuf::from("<string>"),
        units,
        mesh,
        quadrature,
        thickness,
        elastic,
        material,
        kernel,
        solver,
        constraints,
        driven_blocks,
        loads,
        elastic_zones,
        output,
        convergence,
        patch_field,
    })
}

fn build_mesh(r: &mut Reader, base_dir: &Path) -> Option<PolyMesh> {
    let generator = r.choice("mesh.generator", &["structured", "quarter-plate-hole", "file"])?;
    let mut mesh = match generator.as_str() {
        "structured" => {
            let domain = r.rect("mesh.domain");
            let nx = r.parse::<usize>("mesh.nx", "a cell count");
            let ny = r.parse::<usize>("mesh.ny", "a cell count");
            for k in ["mesh.domain", "mesh.nx", "mesh.ny"] {
                if !r.entries.contains_key(k) {
                    r.errors.push(format!("{k}: required for the structured generator"));
                }
            }
            let mut cutouts = Vec::new();
            if let Some((v, line)) = r.raw("mesh.cutouts") {
                for part in v.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                    let xs: Vec<f64> = part.split_whitespace().filter_map(|t| t.parse().ok()).collect();
                    if xs.len() == 4 && part.split_whitespace().count() == 4 && xs[2] > xs[0] && xs[3] > xs[1] {
                        cutouts.push(Rect::new(xs[0], xs[1], xs[2], xs[3]));
                    } else {
                        r.err("mesh.cutouts", line, format!("expected `x0 y0 x1 y1` boxes separated by `;`, got `{part}`"));
                    }
                }
            }
            let (domain, nx, ny) = (domain?, nx?, ny?);
            generate_structured(domain, nx, ny, &cutouts)
        }
        "quarter-plate-hole" => {
            let a = r.positive("mesh.a");
            let l = r.positive("mesh.half_length");
            let h = r.positive("mesh.half_height");
            let nr = r.parse::<usize>("mesh.n_r", "a cell count");
            let nt = r.parse::<usize>("mesh.n_t", "a cell count");
            for k in ["mesh.a", "mesh.half_length", "mesh.half_height", "mesh.n_r", "mesh.n_t"] {
                if !r.entries.contains_key(k) {
                    r.errors.push(format!("{k}: required for the quarter-plate-hole generator"));
                }
            }
            generate_quarter_plate_hole(a?, l?, h?, nr?, nt?)
        }
        _ => {
            let Some((file, _)) = r.raw("mesh.file") else {
                r.errors.push("mesh.file: required for the file generator".into());
                return None;
            };
            load_mesh(base_dir.join(file))
        }
    };
    let balance = r.parse::<bool>("mesh.balance", "true or false").unwrap_or(true);
    for label in r.labels("mesh.refine") {
        let bkey = format!("mesh.refine.{label}.box");
        let lkey = format!("mesh.refine.{label}.levels");
        let rect = r.rect(&bkey);
        let levels = r.parse::<usize>(&lkey, "a level count");
        if !r.entries.contains_key(&bkey) {
            r.errors.push(format!("{bkey}: required"));
        }
        if let (Ok(m), Some(rect)) = (&mesh, rect) {
            let levels = levels.unwrap_or(1);
            if levels > 0 {
                let plan = RefinementPlan::in_box(m, &rect, levels, balance);
                if plan.targets.is_empty() {
                    let line = r.line_of(&bkey);
                    r.err(&bkey, line, "no element centroid lies in the box");
                } else {
                    mesh = refine_polytree(m, &plan);
                }
            }
        }
    }
    let mut mesh = match mesh {
        Ok(m) => m,
        Err(e) => {
            r.errors.push(format!("mesh: {e}"));
            return None;
        }
    };
    for label in r.labels("select") {
        let key = format!("select.{label}");
        let Some((v, line)) = r.raw(&key) else { continue };
        let parts: Vec<&str> = v.split_whitespace().collect();
        let nums: Vec<f64> = parts.iter().skip(1).filter_map(|t| t.parse().ok()).collect();
        let nodes = match (parts.first().copied(), nums.len(), parts.len()) {
            (Some("box"), 4, 5) => mesh.nodes_in_box(&Rect::new(nums[0], nums[1], nums[2], nums[3])),
            (Some("nearest"), 2, 3) => mesh.nearest_node(&Point::new(nums[0], nums[1])).into_iter().collect(),
            _ => {
                r.err(&key, line, format!("expected `box x0 y0 x1 y1` or `nearest x y`, got `{v}`"));
                continue;
            }
        };
        if nodes.is_empty() {
            r.err(&key, line, "selects no nodes");
            continue;
        }
        if mesh.node_sets().contains_key(&label) {
            r.err(&key, line, format!("node set `{label}` already exists"));
            continue;
        }
        match mesh.with_node_set(&label, nodes) {
            Ok(m) => mesh = m,
            Err(e) => r.err(&key, line, e),
        }
    }
    Some(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
mesh.generator = structured
mesh.domain = 0 0 4 1
mesh.nx = 4
mesh.ny = 1
material.E = 100
material.nu = 0.2
damage.alpha = 0.9
damage.beta = 100
damage.kappa0 = 1e-3
nonlocal.R = 0.5
solver.steps = 10
solver.increment = 1e-3
bc.fix.set = left
bc.fix.component = xy
bc.pull.set = right
bc.pull.component = x
bc.pull.drive = 1
";

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config_str(text, Path::new("."))
    }

    fn messages(text: &str) -> Vec<String> {
        match parse(text) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(MINIMAL).unwrap();
        let s = c.solver.as_ref().unwrap();
        assert_eq!(s.settings.tol_rel, 1e-4);
        assert_eq!(s.settings.max_iter, 25);
        assert_eq!(c.thickness, 1.0);
        assert_eq!(c.kernel.unwrap().kind, KernelKind::TruncatedQuadratic);
        assert_eq!(c.constraints.len(), 2 * 2 + 2);
        c.require_run().unwrap();
    }

    #[test]
    fn nonpositive_radius_named() {
        let m = messages(&MINIMAL.replace("nonlocal.R = 0.5", "nonlocal.R = 0"));
        assert!(m.iter().any(|s| s.contains("nonlocal.R")), "{m:?}");
    }

    #[test]
    fn unknown_set_lists_available() {
        let m = messages(&MINIMAL.replace("bc.pull.set = right", "bc.pull.set = topp"));
        let msg = m.iter().find(|s| s.contains("topp")).expect("names the typo");
        assert!(msg.contains("bottom, left, right, top"), "{msg}");
    }

    #[test]
    fn unknown_and_duplicate_keys_all_reported() {
        let text = format!("{MINIMAL}\nsolver.tol = 1\nmaterial.E = 5\n");
        let m = messages(&text);
        assert!(m.iter().any(|s| s.contains("solver.tol: unknown key")));
        assert!(m.iter().any(|s| s.contains("material.E: duplicate key")));
    }

    #[test]
    fn missing_required_keys() {
        let m = messages("mesh.generator = structured\nmesh.nx = 2\n");
        for k in ["mesh.domain", "mesh.ny", "material.E", "material.nu"] {
            assert!(m.iter().any(|s| s.starts_with(k)), "{k}: {m:?}");
        }
    }

    #[test]
    fn drive_count_checked_for_runs() {
        let c = parse(&MINIMAL.replace("bc.pull.drive = 1", "bc.pull.value = 0.1")).unwrap();
        assert!(matches!(c.require_run(), Err(Error::Config(_))));
    }

    #[test]
    fn selections_and_monitors() {
        let text = format!("{MINIMAL}\nselect.tip = nearest 4.1 1.2\nselect.base = box -1 -1 0.1 0.1\noutput.monitor.tip = tip x\noutput.opening.gap = base tip y\n");
        let c = parse(&text).unwrap();
        let mesh = c.mesh().unwrap();
        let tip = mesh.node_set("tip").unwrap();
        assert_eq!(tip.len(), 1);
        assert_eq!(mesh.nodes()[tip[0]], Point::new(4.0, 1.0));
        assert_eq!(c.output.monitors.len(), 2);
    }

    #[test]
    fn refinement_block_applies() {
        let text = format!("{MINIMAL}\nmesh.refine.end.box = 0 0 1 1\nmesh.refine.end.levels = 1\n");
        assert_eq!(parse(&text).unwrap().mesh().unwrap().num_elements(), 3 + 4);
    }

    #[test]
    fn presets_parse() {
        for p in crate::bench::preset_benchmarks() {
            parse(&p.config).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }
}
