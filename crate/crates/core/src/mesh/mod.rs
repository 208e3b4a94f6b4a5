//! Polygonal meshes with variable-arity elements.
//!
//! Elements are counterclockwise vertex rings. Hanging nodes produced by
//! polytree refinement are plain ring vertices of the coarse neighbour, so
//! every interior edge is shared by exactly two rings with opposite
//! orientation and no constraint equations are needed downstream.

use std::collections::{BTreeMap, HashMap};

use crate::grid::PointGrid;
use crate::{Error, Point, Result};

mod generate;
mod io;
mod refine;

pub use generate::{generate_quarter_plate_hole, generate_structured, Rect};
pub use io::{load_mesh, read_mesh, save_mesh, write_mesh};
pub use refine::{refine_polytree, RefinementPlan};

/// Relative tolerance for collinearity and on-segment tests.
pub(crate) const GEOM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    nodes: Vec<Point>,
    elements: Vec<Vec<usize>>,
    node_sets: BTreeMap<String, Vec<usize>>,
    edge_sets: BTreeMap<String, Vec<(usize, usize)>>,
}

impl PolyMesh {
    /// Builds a mesh and checks every structural invariant.
    pub fn new(
        nodes: Vec<Point>,
        elements: Vec<Vec<usize>>,
        node_sets: BTreeMap<String, Vec<usize>>,
        edge_sets: BTreeMap<String, Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let mesh = PolyMesh {
            nodes,
            elements,
            node_sets,
            edge_sets,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> &[usize] {
        &self.elements[e]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn node_sets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.node_sets
    }

    pub fn edge_sets(&self) -> &BTreeMap<String, Vec<(usize, usize)>> {
        &self.edge_sets
    }

    pub fn node_set(&self, name: &str) -> Option<&[usize]> {
        self.node_sets.get(name).map(Vec::as_slice)
    }

    pub fn edge_set(&self, name: &str) -> Option<&[(usize, usize)]> {
        self.edge_sets.get(name).map(Vec::as_slice)
    }

    /// Returns a copy with an extra (or replaced) node set.
    pub fn with_node_set(&self, name: &str, nodes: Vec<usize>) -> Result<Self> {
        let mut mesh = self.clone();
        mesh.node_sets.insert(name.to_string(), nodes);
        mesh.validate_sets()?;
        Ok(mesh)
    }

    /// Nodes inside the closed box `[x0, x1] × [y0, y1]`.
    pub fn nodes_in_box(&self, rect: &Rect) -> Vec<usize> {
        let tol = GEOM_TOL * rect.diagonal().max(1.0);
        (0..self.nodes.len())
            .filter(|&i| {
                let p = self.nodes[i];
                p.x >= rect.x0 - tol && p.x <= rect.x1 + tol && p.y >= rect.y0 - tol && p.y <= rect.y1 + tol
            })
            .collect()
    }

    /// Nodes on edges that belong to a single ring, ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut edges = std::collections::HashSet::new();
        for ring in &self.elements {
            for k in 0..ring.len() {
                edges.insert((ring[k], ring[(k + 1) % ring.len()]));
            }
        }
        let mut out: Vec<usize> = edges
            .iter()
            .filter(|&&(a, b)| !edges.contains(&(b, a)))
            .flat_map(|&(a, b)| [a, b])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Node closest to `p`; ties go to the lower index.
    pub fn nearest_node(&self, p: &Point) -> Option<usize> {
        (0..self.nodes.len()).min_by(|&a, &b| {
            let da = (self.nodes[a] - p).norm_squared();
            let db = (self.nodes[b] - p).norm_squared();
            da.total_cmp(&db).then(a.cmp(&b))
        })
    }

    pub fn coords(&self, e: usize) -> Vec<Point> {
        self.elements[e].iter().map(|&i| self.nodes[i]).collect()
    }

    /// Endpoints of local edge `k` of element `e`.
    pub fn edge_nodes(&self, e: usize, k: usize) -> (usize, usize) {
        let ring = &self.elements[e];
        (ring[k], ring[(k + 1) % ring.len()])
    }

    pub fn element_area(&self, e: usize) -> f64 {
        signed_area(&self.coords(e))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    /// Largest vertex-to-vertex distance of element `e`.
    pub fn element_diameter(&self, e: usize) -> f64 {
        diameter(&self.coords(e))
    }

    pub fn min_element_diameter(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| self.element_diameter(e))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.x);
            r.y1 = r.y1.max(p.y);
        }
        r
    }

    /// Checks ring validity, index ranges, edge conformity and set ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for (i, p) in self.nodes.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::invariant("finite coordinates", format!("node {i}")));
            }
        }
        for (e, ring) in self.elements.iter().enumerate() {
            if ring.len() < 3 {
                return Err(Error::invariant(
                    "arity",
                    format!("element {e} has {} vertices", ring.len()),
                ));
            }
            if let Some(&bad) = ring.iter().find(|&&v| v >= n) {
                return Err(Error::invariant(
                    "index range",
                    format!("element {e} references node {bad} but the mesh has {n} nodes"),
                ));
            }
            let mut sorted = ring.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invariant(
                    "simplicity",
                    format!("element {e} repeats a vertex"),
                ));
            }
            let coords = self.coords(e);
            let area = signed_area(&coords);
            if !(area > 0.0) {
                return Err(Error::invariant(
                    "orientation",
                    format!("element {e} has signed area {area:e}; rings must be counterclockwise"),
                ));
            }
            if self_intersects(&coords) {
                return Err(Error::invariant(
                    "simplicity",
                    format!("element {e} ring self-intersects"),
                ));
            }
        }
        self.validate_conformity()?;
        self.validate_sets()
    }

    fn validate_conformity(&self) -> Result<()> {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, ring) in self.elements.iter().enumerate() {
            for k in 0..ring.len() {
                let key = (ring[k], ring[(k + 1) % ring.len()]);
                if let Some(prev) = owner.insert(key, e) {
                    return Err(Error::invariant(
                        "conformity",
                        format!(
                            "directed edge {}->{} appears in elements {prev} and {e} (overlap or orientation clash)",
                            key.0, key.1
                        ),
                    ));
                }
            }
        }
        // An edge without a twin is a boundary edge; it must not pass through
        // another node, otherwise a hanging node is missing from a ring.
        let bbox = self.bounding_box();
        let scale = bbox.diagonal().max(f64::MIN_POSITIVE);
        let grid = PointGrid::new(&self.nodes, scale / (self.nodes.len() as f64).sqrt().max(1.0));
        for (&(a, b), &e) in &owner {
            if owner.contains_key(&(b, a)) {
                continue;
            }
            let (pa, pb) = (self.nodes[a], self.nodes[b]);
            let mid = Point::from((pa.coords + pb.coords) * 0.5);
            let half = (pb - pa).norm() * 0.5;
            let mut hit = None;
            grid.for_each_candidate(&mid, half * (1.0 + 1e-9), |i| {
                if hit.is_none() && i != a && i != b && strictly_on_segment(&self.nodes[i], &pa, &pb) {
                    hit = Some(i);
                }
            });
            if let Some(i) = hit {
                return Err(Error::invariant(
                    "conformity",
                    format!("node {i} lies on edge {a}->{b} of element {e} but is not a vertex of that ring"),
                ));
            }
        }
        Ok(())
    }

    fn validate_sets(&self) -> Result<()> {
        for (name, set) in &self.node_sets {
            if let Some(&bad) = set.iter().find(|&&i| i >= self.nodes.len()) {
                return Err(Error::invariant(
                    "index range",
                    format!("node set '{name}' references node {bad}"),
                ));
            }
        }
        for (name, set) in &self.edge_sets {
            for &(e, k) in set {
                if e >= self.elements.len() || k >= self.elements[e].len() {
                    return Err(Error::invariant(
                        "index range",
                        format!("edge set '{name}' references edge ({e}, {k})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Shoelace signed area; positive for counterclockwise rings.
pub fn signed_area(coords: &[Point]) -> f64 {
    let n = coords.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (p, q) = (coords[i], coords[(i + 1) % n]);
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

/// Area centroid of a simple polygon.
pub fn area_centroid(coords: &[Point]) -> Point {
    let n = coords.len();
    let origin = coords[0];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = coords[i] - origin;
        let q = coords[(i + 1) % n] - origin;
        let cross = p.x * q.y - q.x * p.y;
        a += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    Point::new(origin.x + cx / (3.0 * a), origin.y + cy / (3.0 * a))
}

/// Arithmetic mean of the ring vertices.
pub fn vertex_centroid(coords: &[Point]) -> Point {
    let sum = coords.iter().fold(nalgebra::Vector2::zeros(), |acc, p| acc + p.coords);
    Point::from(sum / coords.len() as f64)
}

pub fn diameter(coords: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            d = d.max((coords[i] - coords[j]).norm());
        }
    }
    d
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// `p` lies on segment `ab`, excluding the endpoints.
pub(crate) fn strictly_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return false;
    }
    if cross(a, b, p).abs() > GEOM_TOL * len2 {
        return false;
    }
    let t = (p - a).dot(&ab) / len2;
    t > GEOM_TOL && t < 1.0 - GEOM_TOL
}

fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: &Point, b: &Point, p: &Point, d: f64| {
        d == 0.0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn self_intersects(coords: &[Point]) -> bool {
    let n = coords.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (coords[i], coords[(i + 1) % n]);
        for j in i + 1..n {
            // skip edges sharing a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (coords[j], coords[(j + 1) % n]);
            if segments_intersect(&a, &b, &c, &d) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PolyMesh {
        PolyMesh::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            vec![vec![0, 1, 2, 3]],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn square_area_and_diameter() {
        let m = unit_square();
        assert_eq!(m.total_area(), 1.0);
        assert!((m.element_diameter(0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clockwise_ring_is_rejected() {
        let err = PolyMesh::new(
            unit_square().nodes().to_vec(),
            vec![vec![0, 3, 2, 1]],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("orientation"), "{err}");
    }

    #[test]
    fn bow_tie_is_rejected() {
        let err = PolyMesh::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(0.5, -1.0),
            ],
            vec![vec![0, 4, 1, 2, 3]],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("simplicity") || err.to_string().contains("orientation"), "{err}");
    }

    #[test]
    fn missing_hanging_node_is_detected() {
        // two unit cells on the left, one 1x2 cell on the right whose left
        // edge skips the node at (1,1)
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(1.0, 2.0),
            Point::new(2.0, 2.0),
        ];
        let elements = vec![vec![0, 1, 4, 3], vec![3, 4, 6, 5], vec![1, 2, 7, 6]];
        let err = PolyMesh::new(nodes.clone(), elements, BTreeMap::new(), BTreeMap::new()).unwrap_err();
        assert!(err.to_string().contains("conformity"), "{err}");

        let fixed = vec![vec![0, 1, 4, 3], vec![3, 4, 6, 5], vec![1, 2, 7, 6, 4]];
        let mesh = PolyMesh::new(nodes, fixed, BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!((mesh.total_area() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn centroids_of_square() {
        let m = unit_square();
        let c = area_centroid(&m.coords(0));
        let v = vertex_centroid(&m.coords(0));
        assert!((c - Point::new(0.5, 0.5)).norm() < 1e-15);
        assert!((v - c).norm() < 1e-15);
    }
}
