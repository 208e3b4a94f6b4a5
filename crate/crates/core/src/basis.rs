//! Piecewise-linear polygonal shape functions.
//!
//! An n-gon is split into n triangles by joining its centroid to each edge.
//! On every sub-triangle the shape function of vertex `i` is the linear
//! interpolant of its values at the three corners: `δ_ij` at ring vertices
//! and `1/n` at the centroid.
//!
//! The centroid used here is the vertex mean. With the `1/n` centroid value
//! only that point makes the interpolant reproduce affine fields exactly.

use nalgebra::{Matrix3xX, Vector2};

use crate::mesh::{signed_area, vertex_centroid};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SubTriangle {
    /// Local ring indices `(k, k + 1 mod n)`; the third corner is the centroid.
    pub vertices: (usize, usize),
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubTriangulation {
    pub centroid: Point,
    pub triangles: Vec<SubTriangle>,
}

impl SubTriangulation {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area).sum()
    }
}

/// Centroid fan of the ring `coords`; `element` is used in diagnostics.
pub fn subtriangulate(coords: &[Point], element: usize) -> Result<SubTriangulation> {
    let n = coords.len();
    if n < 3 {
        return Err(Error::Geometry(format!("element {element} has {n} vertices")));
    }
    let centroid = vertex_centroid(coords);
    let scale = signed_area(coords).abs().max(f64::MIN_POSITIVE);
    let mut triangles = Vec::with_capacity(n);
    for k in 0..n {
        let area = signed_area(&[centroid, coords[k], coords[(k + 1) % n]]);
        if !(area > 1e-12 * scale) {
            return Err(Error::Geometry(format!(
                "element {element}: sub-triangle {k} has non-positive area {area:e}"
            )));
        }
        triangles.push(SubTriangle {
            vertices: (k, (k + 1) % n),
            area,
        });
    }
    Ok(SubTriangulation { centroid, triangles })
}

/// Barycentric coordinates of `x` in `(a, b, c)` and their constant gradients.
fn barycentric(a: &Point, b: &Point, c: &Point, x: &Point) -> ([f64; 3], [Vector2<f64>; 3]) {
    let twice = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let grad = |p: &Point, q: &Point| Vector2::new(p.y - q.y, q.x - p.x) / twice;
    // gradient of the coordinate attached to the corner opposite edge p->q
    let g = [grad(b, c), grad(c, a), grad(a, b)];
    let l1 = g[1].dot(&(x - c));
    let l2 = g[2].dot(&(x - a));
    let l0 = 1.0 - l1 - l2;
    ([l0, l1, l2], g)
}

/// Shape values and gradients at `x`, which must lie in sub-triangle `t`.
pub fn shape_eval(
    coords: &[Point],
    sub: &SubTriangulation,
    t: usize,
    x: &Point,
) -> Result<(Vec<f64>, Vec<Vector2<f64>>)> {
    let n = coords.len();
    let tri = sub
        .triangles
        .get(t)
        .ok_or_else(|| Error::Input(format!("sub-triangle {t} does not exist (element has {n})")))?;
    let (ka, kb) = tri.vertices;
    let (lam, grad) = barycentric(&sub.centroid, &coords[ka], &coords[kb], x);
    if lam.iter().any(|&l| l < -1e-10) {
        return Err(Error::Input(format!(
            "point ({}, {}) lies outside sub-triangle {t}",
            x.x, x.y
        )));
    }
    let share = 1.0 / n as f64;
    let mut phi = vec![lam[0] * share; n];
    let mut dphi = vec![grad[0] * share; n];
    phi[ka] += lam[1];
    phi[kb] += lam[2];
    dphi[ka] += grad[1];
    dphi[kb] += grad[2];
    Ok((phi, dphi))
}

/// Points per sub-triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    OnePoint,
    /// Degree-2 rule at the interior points (1/6, 1/6), (2/3, 1/6), (1/6, 2/3).
    #[default]
    ThreePoint,
}

impl QuadratureRule {
    pub fn points_per_triangle(self) -> usize {
        match self {
            QuadratureRule::OnePoint => 1,
            QuadratureRule::ThreePoint => 3,
        }
    }

    /// Reference coordinates `(s, t)` and weights on the unit right triangle.
    fn reference(self) -> &'static [(f64, f64, f64)] {
        const ONE: [(f64, f64, f64); 1] = [(1.0 / 3.0, 1.0 / 3.0, 0.5)];
        const THREE: [(f64, f64, f64); 3] = [
            (1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0),
            (2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0),
            (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0),
        ];
        match self {
            QuadratureRule::OnePoint => &ONE,
            QuadratureRule::ThreePoint => &THREE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoint {
    pub position: Point,
    pub weight: f64,
    /// Determinant of the reference-to-sub-triangle map (twice its area).
    pub jacobian: f64,
    pub sub_triangle: usize,
    pub shape: Vec<f64>,
    pub grad: Vec<Vector2<f64>>,
    /// Compatible strain operator, rows `(xx, yy, xy)` with engineering
    /// shear, columns `(u_x, u_y)` interleaved per vertex.
    pub b: Matrix3xX<f64>,
}

impl QuadPoint {
    /// `w |J|`, the area this point represents.
    pub fn volume(&self) -> f64 {
        self.weight * self.jacobian
    }
}

/// Builds the 3 × 2n compatible operator from shape gradients.
pub fn strain_operator(grad: &[Vector2<f64>]) -> Matrix3xX<f64> {
    let mut b = Matrix3xX::zeros(2 * grad.len());
    for (i, g) in grad.iter().enumerate() {
        b[(0, 2 * i)] = g.x;
        b[(1, 2 * i + 1)] = g.y;
        b[(2, 2 * i)] = g.y;
        b[(2, 2 * i + 1)] = g.x;
    }
    b
}

/// Quadrature points of the whole element, ordered by sub-triangle.
pub fn quadrature(coords: &[Point], element: usize, rule: QuadratureRule) -> Result<Vec<QuadPoint>> {
    let sub = subtriangulate(coords, element)?;
    let mut out = Vec::with_capacity(sub.triangles.len() * rule.points_per_triangle());
    for (t, tri) in sub.triangles.iter().enumerate() {
        let (a, b, c) = (sub.centroid, coords[tri.vertices.0], coords[tri.vertices.1]);
        for &(s, r, w) in rule.reference() {
            let position = Point::from(a.coords + (b - a) * s + (c - a) * r);
            let (shape, grad) = shape_eval(coords, &sub, t, &position)?;
            let b = strain_operator(&grad);
            out.push(QuadPoint {
                position,
                weight: w,
                jacobian: 2.0 * tri.area,
                sub_triangle: t,
                shape,
                grad,
                b,
            });
        }
    }
    Ok(out)
}
