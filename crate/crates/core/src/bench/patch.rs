use nalgebra::{Vector2, Vector3};

use super::solve_elastic;
use crate::basis::QuadratureRule;
use crate::material::MaterialModel;
use crate::mesh::{generate_structured, refine_polytree, PolyMesh, Rect, RefinementPlan};
use crate::solver::{Constraint, Discretization, DofMap};
use crate::{Error, Point, Result};

/// `u_x = u0 + u1 x + u2 y`, `u_y = v0 + v1 x + v2 y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl Default for AffineField {
    fn default() -> Self {
        AffineField {
            u: [1.0e-3, 2.0e-3, -0.5e-3],
            v: [-0.7e-3, 0.8e-3, 1.5e-3],
        }
    }
}

impl AffineField {
    pub fn at(&self, p: &Point) -> Vector2<f64> {
        Vector2::new(
            self.u[0] + self.u[1] * p.x + self.u[2] * p.y,
            self.v[0] + self.v[1] * p.x + self.v[2] * p.y,
        )
    }

    pub fn strain(&self) -> Vector3<f64> {
        Vector3::new(self.u[1], self.v[2], self.u[2] + self.v[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchReport {
    /// Max nodal error on interior nodes over the max boundary value.
    pub max_interior_error: f64,
    /// Max quadrature-point stress deviation over the exact stress norm.
    pub max_stress_deviation: f64,
    pub interior_nodes: usize,
}

impl PatchReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_interior_error < tol && self.max_stress_deviation < tol
    }
}

/// Prescribes `field` on every boundary node, solves without body or edge
/// loads and compares the interior to the affine field.
pub fn patch_test(mesh: &PolyMesh, model: &MaterialModel, field: &AffineField, rule: QuadratureRule) -> Result<PatchReport> {
    let boundary = mesh.boundary_nodes();
    let mut on_boundary = vec![false; mesh.num_nodes()];
    let mut cons = Vec::with_capacity(2 * boundary.len());
    let mut scale: f64 = 0.0;
    for &n in &boundary {
        on_boundary[n] = true;
        let u = field.at(&mesh.nodes()[n]);
        scale = scale.max(u.norm());
        cons.push(Constraint::fixed(n, 0, u.x));
        cons.push(Constraint::fixed(n, 1, u.y));
    }
    if scale == 0.0 {
        return Err(Error::Input("affine field vanishes on the boundary".into()));
    }
    let dofs = DofMap::new(2 * mesh.num_nodes(), cons)?;
    let disc = Discretization::new(mesh.clone(), rule, 1.0)?;
    let d = solve_elastic(&disc, model, &dofs, &vec![0.0; disc.num_dofs()], 0.0)?;

    let mut err: f64 = 0.0;
    let mut interior = 0;
    for (n, p) in mesh.nodes().iter().enumerate() {
        if !on_boundary[n] {
            interior += 1;
            err = err.max((Vector2::new(d[2 * n], d[2 * n + 1]) - field.at(p)).norm());
        }
    }
    let c = model.elastic_matrix();
    let exact = c * field.strain();
    let ref_stress = exact.norm().max(f64::MIN_POSITIVE);
    let dev = disc
        .strains(&d)
        .iter()
        .map(|eps| (c * eps - exact).norm() / ref_stress)
        .fold(0.0, f64::max);
    Ok(PatchReport {
        max_interior_error: err / scale,
        max_stress_deviation: dev,
        interior_nodes: interior,
    })
}

/// Unit square, 2 × 2 cells, with the lower-left cell refined once; its
/// neighbors carry hanging nodes.
pub fn hanging_node_patch_mesh() -> Result<PolyMesh> {
    let base = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 2, 2, &[])?;
    refine_polytree(&base, &RefinementPlan::uniform(vec![0], 1, false))
}
