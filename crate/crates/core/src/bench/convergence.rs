use std::io::Write;

use nalgebra::Vector2;
use rayon::prelude::*;

use super::{error_norms, solve_elastic, KirschField};
use crate::basis::QuadratureRule;
use crate::material::{Criterion, MaterialModel, PlaneCondition};
use crate::mesh::generate_quarter_plate_hole;
use crate::solver::{Constraint, Discretization, DofMap};
use crate::{Error, Result};

/// Quarter plate with a hole, loaded by the exact Kirsch tractions on every
/// boundary edge that is not a symmetry plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateHoleStudy {
    pub sigma: f64,
    pub a: f64,
    pub half_length: f64,
    pub half_height: f64,
    pub e: f64,
    pub nu: f64,
    pub plane: PlaneCondition,
    pub thickness: f64,
    pub rule: QuadratureRule,
    /// `n_r = n_t` per mesh.
    pub levels: Vec<usize>,
}

impl Default for PlateHoleStudy {
    fn default() -> Self {
        PlateHoleStudy {
            sigma: 10.0,
            a: 0.4,
            half_length: 2.0,
            half_height: 1.0,
            e: 2.1e5,
            nu: 0.33,
            plane: PlaneCondition::Stress,
            thickness: 1.0,
            rule: QuadratureRule::ThreePoint,
            levels: vec![8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub mesh_id: String,
    pub n_elem: usize,
    /// Smallest element diameter.
    pub h: f64,
    pub l2: f64,
    pub h1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub l2_slope: f64,
    pub h1_slope: f64,
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "mesh_id,n_elem,h,l2_rel,h1_rel")?;
        for r in &self.rows {
            writeln!(out, "{},{},{:?},{:?},{:?}", r.mesh_id, r.n_elem, r.h, r.l2, r.h1)?;
        }
        Ok(())
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l2 < w[0].l2 && w[1].h1 < w[0].h1)
    }
}

impl PlateHoleStudy {
    pub fn field(&self) -> KirschField {
        KirschField {
            sigma: self.sigma,
            a: self.a,
            e: self.e,
            nu: self.nu,
            plane: self.plane,
        }
    }

    fn model(&self) -> Result<MaterialModel> {
        // damage parameters are irrelevant for an elastic solve
        MaterialModel::new(self.e, self.nu, self.plane, Criterion::Mazars, 0.9, 1.0, 1.0)
    }

    /// Solves one mesh and returns its row.
    pub fn solve_level(&self, n: usize) -> Result<ConvergenceRow> {
        let mesh = generate_quarter_plate_hole(self.a, self.half_length, self.half_height, n, n)?;
        let field = self.field();
        let model = self.model()?;
        let mut cons = Vec::new();
        for &v in mesh.node_set("left").unwrap_or(&[]) {
            cons.push(Constraint::fixed(v, 0, 0.0));
        }
        for &v in mesh.node_set("bottom").unwrap_or(&[]) {
            cons.push(Constraint::fixed(v, 1, 0.0));
        }
        let dofs = DofMap::new(2 * mesh.num_nodes(), cons)?;
        let mut loaded = Vec::new();
        for name in ["arc", "right", "top"] {
            loaded.extend_from_slice(mesh.edge_set(name).unwrap_or(&[]));
        }
        let n_elem = mesh.num_elements();
        let h = mesh.min_element_diameter();
        let disc = Discretization::new(mesh, self.rule, self.thickness)?;

        let mut f = vec![0.0; disc.num_dofs()];
        for &(e, k) in &loaded {
            let (a, b) = disc.mesh().edge_nodes(e, k);
            let t = disc.mesh().nodes()[b] - disc.mesh().nodes()[a];
            let normal = Vector2::new(t.y, -t.x) / t.norm();
            let fe = disc.traction_load(&[(e, k)], |p| {
                let s = field.stress(p);
                Vector2::new(s[0] * normal.x + s[2] * normal.y, s[2] * normal.x + s[1] * normal.y)
            });
            for (acc, v) in f.iter_mut().zip(fe) {
                *acc += v;
            }
        }
        let d = solve_elastic(&disc, &model, &dofs, &f, 0.0)?;
        let (l2, h1) = error_norms(
            &disc,
            &d,
            &model.elastic_matrix(),
            |p| field.displacement(p),
            |p| field.strain(p),
        )?;
        Ok(ConvergenceRow {
            mesh_id: format!("q{n}x{n}"),
            n_elem,
            h,
            l2,
            h1,
        })
    }

    /// Solves all levels in parallel; rows come back in level order.
    pub fn run(&self) -> Result<ConvergenceReport> {
        if self.levels.len() < 3 {
            return Err(Error::Input(format!("a convergence study needs at least 3 meshes (got {})", self.levels.len())));
        }
        let rows: Vec<ConvergenceRow> = self.levels.par_iter().map(|&n| self.solve_level(n)).collect::<Result<_>>()?;
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let l2_slope = fit_slope(&h, &rows.iter().map(|r| r.l2).collect::<Vec<_>>())?;
        let h1_slope = fit_slope(&h, &rows.iter().map(|r| r.h1).collect::<Vec<_>>())?;
        Ok(ConvergenceReport { rows, l2_slope, h1_slope })
    }
}

/// Least-squares slope of `log err` against `log h`.
pub fn fit_slope(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(Error::Input("slope fit needs at least two matching samples".into()));
    }
    if h.iter().chain(err).any(|v| !(*v > 0.0)) {
        return Err(Error::Input("slope fit needs positive sizes and errors".into()));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("slope fit needs distinct mesh sizes".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powf(1.7)).collect();
        assert!((fit_slope(&h, &e).unwrap() - 1.7).abs() < 1e-12);
        assert!(fit_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(fit_slope(&[1.0, 0.5], &[0.0, 2.0]).is_err());
    }

    #[test]
    fn coarse_study_converges() {
        let study = PlateHoleStudy {
            levels: vec![4, 8, 16],
            ..Default::default()
        };
        let rep = study.run().unwrap();
        assert!(rep.strictly_decreasing());
        assert!(rep.l2_slope > 1.0 && rep.h1_slope > 0.5, "{rep:?}");
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mesh_id,n_elem,h,l2_rel,h1_rel\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn too_few_levels_rejected() {
        let study = PlateHoleStudy {
            levels: vec![4, 8],
            ..Default::default()
        };
        assert!(study.run().is_err());
    }
}
