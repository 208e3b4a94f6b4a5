use nalgebra::{DMatrix, DVector, Matrix3, Matrix3xX, Vector2, Vector3};
use rayon::prelude::*;

use crate::basis::{quadrature, QuadratureRule};
use crate::mesh::{diameter, vertex_centroid, PolyMesh};
use crate::projection::{build_projection, LocalFrame, StrainProjection};
use crate::{Error, Point, Result};

#[derive(Debug, Clone)]
pub struct ElementData {
    /// Global dofs `(2v, 2v + 1)` for each ring vertex `v`.
    pub dofs: Vec<usize>,
    pub first_gp: usize,
    pub projection: StrainProjection,
}

impl ElementData {
    pub fn num_gps(&self) -> usize {
        self.projection.b_tilde.len()
    }

    pub fn gps(&self) -> std::ops::Range<usize> {
        self.first_gp..self.first_gp + self.num_gps()
    }
}

/// Geometry-only data of a mesh: quadrature, projected operators and the
/// global quadrature-point cloud.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: PolyMesh,
    thickness: f64,
    rule: QuadratureRule,
    elements: Vec<ElementData>,
    gp_position: Vec<Point>,
    gp_volume: Vec<f64>,
    gp_element: Vec<usize>,
}

impl Discretization {
    pub fn new(mesh: PolyMesh, rule: QuadratureRule, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::Input(format!("thickness must be positive (got {thickness})")));
        }
        let built: Vec<(Vec<usize>, Vec<Point>, Vec<f64>, StrainProjection)> = (0..mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let coords = mesh.coords(e);
                let gps = quadrature(&coords, e, rule)?;
                let frame = LocalFrame {
                    center: vertex_centroid(&coords),
                    scale: diameter(&coords),
                };
                let projection = build_projection(e, frame, &gps)?;
                let dofs = mesh.element(e).iter().flat_map(|&v| [2 * v, 2 * v + 1]).collect();
                Ok((
                    dofs,
                    gps.iter().map(|q| q.position).collect(),
                    gps.iter().map(|q| q.volume()).collect(),
                    projection,
                ))
            })
            .collect::<Result<_>>()?;

        let mut elements = Vec::with_capacity(built.len());
        let (mut gp_position, mut gp_volume, mut gp_element) = (Vec::new(), Vec::new(), Vec::new());
        for (e, (dofs, pos, vol, projection)) in built.into_iter().enumerate() {
            elements.push(ElementData {
                dofs,
                first_gp: gp_position.len(),
                projection,
            });
            gp_element.extend(std::iter::repeat(e).take(pos.len()));
            gp_position.extend(pos);
            gp_volume.extend(vol);
        }
        Ok(Discretization {
            mesh,
            thickness,
            rule,
            elements,
            gp_position,
            gp_volume,
            gp_element,
        })
    }

    pub fn mesh(&self) -> &PolyMesh {
        &self.mesh
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn elements(&self) -> &[ElementData] {
        &self.elements
    }

    pub fn num_dofs(&self) -> usize {
        2 * self.mesh.num_nodes()
    }

    pub fn num_gps(&self) -> usize {
        self.gp_position.len()
    }

    pub fn gp_positions(&self) -> &[Point] {
        &self.gp_position
    }

    /// `w|J|` per quadrature point (without thickness).
    pub fn gp_volumes(&self) -> &[f64] {
        &self.gp_volume
    }

    pub fn gp_element(&self, g: usize) -> usize {
        self.gp_element[g]
    }

    /// `B̃` at global quadrature point `g`.
    pub fn b_tilde(&self, g: usize) -> &Matrix3xX<f64> {
        let el = &self.elements[self.gp_element[g]];
        &el.projection.b_tilde[g - el.first_gp]
    }

    pub fn gather(&self, e: usize, d: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.elements[e].dofs.len(), self.elements[e].dofs.iter().map(|&i| d[i]))
    }

    /// Assumed strain at every quadrature point.
    pub fn strains(&self, d: &[f64]) -> Vec<Vector3<f64>> {
        let per: Vec<Vec<Vector3<f64>>> = (0..self.elements.len())
            .into_par_iter()
            .map(|e| {
                let de = self.gather(e, d);
                self.elements[e].projection.b_tilde.iter().map(|b| b * &de).collect()
            })
            .collect();
        per.into_iter().flatten().collect()
    }

    /// `Σ_g s_g B̃ᵀ C B̃ w|J| t` for element `e`, with per-point factors `s_g`.
    pub fn element_stiffness(&self, e: usize, c: &Matrix3<f64>, scale: impl Fn(usize) -> f64) -> DMatrix<f64> {
        let el = &self.elements[e];
        let n = el.dofs.len();
        let mut k = DMatrix::zeros(n, n);
        for (l, b) in el.projection.b_tilde.iter().enumerate() {
            let g = el.first_gp + l;
            let f = scale(g) * self.gp_volume[g] * self.thickness;
            if f != 0.0 {
                let cb = c * b;
                k.gemm_tr(f, b, &cb, 1.0);
            }
        }
        k
    }

    /// Elastic stiffness triplets over all dofs, in element order.
    pub fn elastic_triplets(&self, c: &Matrix3<f64>) -> Vec<(usize, usize, f64)> {
        let blocks: Vec<DMatrix<f64>> = (0..self.elements.len())
            .into_par_iter()
            .map(|e| self.element_stiffness(e, c, |_| 1.0))
            .collect();
        let mut out = Vec::new();
        for (e, k) in blocks.iter().enumerate() {
            let dofs = &self.elements[e].dofs;
            for (a, &r) in dofs.iter().enumerate() {
                for (b, &col) in dofs.iter().enumerate() {
                    out.push((r, col, k[(a, b)]));
                }
            }
        }
        out
    }

    /// Consistent nodal forces of a traction on the listed boundary edges,
    /// integrated with 3-point Gauss-Legendre and scaled by the thickness.
    pub fn traction_load(&self, edges: &[(usize, usize)], traction: impl Fn(&Point) -> Vector2<f64>) -> Vec<f64> {
        const GL: [(f64, f64); 3] = [
            (-0.774_596_669_241_483_4, 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            (0.774_596_669_241_483_4, 5.0 / 9.0),
        ];
        let mut f = vec![0.0; self.num_dofs()];
        for &(e, k) in edges {
            let (a, b) = self.mesh.edge_nodes(e, k);
            let (pa, pb) = (self.mesh.nodes()[a], self.mesh.nodes()[b]);
            let half = 0.5 * (pb - pa).norm();
            for &(s, w) in &GL {
                let t = 0.5 * (1.0 + s);
                let x = Point::from(pa.coords * (1.0 - t) + pb.coords * t);
                let tr = traction(&x) * (w * half * self.thickness);
                f[2 * a] += (1.0 - t) * tr.x;
                f[2 * a + 1] += (1.0 - t) * tr.y;
                f[2 * b] += t * tr.x;
                f[2 * b + 1] += t * tr.y;
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured, Rect};

    #[test]
    fn cloud_volumes_sum_to_area() {
        let m = generate_structured(Rect::new(0.0, 0.0, 3.0, 2.0), 3, 2, &[]).unwrap();
        let d = Discretization::new(m, QuadratureRule::ThreePoint, 1.0).unwrap();
        assert_eq!(d.num_gps(), 6 * 12);
        assert!((d.gp_volumes().iter().sum::<f64>() - 6.0).abs() < 1e-13);
        assert_eq!(d.gp_element(13), 1);
    }

    #[test]
    fn uniform_traction_resultant() {
        let m = generate_structured(Rect::new(0.0, 0.0, 2.0, 1.0), 4, 3, &[]).unwrap();
        let edges = m.edge_set("right").unwrap().to_vec();
        let d = Discretization::new(m, QuadratureRule::ThreePoint, 0.5).unwrap();
        let f = d.traction_load(&edges, |_| Vector2::new(3.0, 0.0));
        let fx: f64 = f.iter().step_by(2).sum();
        assert!((fx - 3.0 * 1.0 * 0.5).abs() < 1e-14);
    }
}
