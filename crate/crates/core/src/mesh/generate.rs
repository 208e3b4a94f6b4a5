use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use super::{signed_area, PolyMesh};
use crate::{Error, Point, Result};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

const BOUNDARY_NAMES: [&str; 4] = ["bottom", "right", "top", "left"];

/// Structured grid of `nx × ny` quadrilaterals over `domain`, with the cells
/// covered by each `cutout` removed.
///
/// Every cutout must lie inside the domain with its sides on grid lines.
/// Node and edge sets `left`, `right`, `bottom`, `top` collect the domain
/// boundary; `cutout<i>` collects the boundary exposed by cutout `i`.
pub fn generate_structured(domain: Rect, nx: usize, ny: usize, cutouts: &[Rect]) -> Result<PolyMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::Input(format!("grid counts must be positive (nx={nx}, ny={ny})")));
    }
    if !(domain.width() > 0.0 && domain.height() > 0.0) {
        return Err(Error::Input("domain must have positive width and height".into()));
    }
    let dx = domain.width() / nx as f64;
    let dy = domain.height() / ny as f64;

    let grid_index = |v: f64, origin: f64, step: f64| -> Option<usize> {
        let t = (v - origin) / step;
        let r = t.round();
        ((t - r).abs() <= 1e-9 * t.abs().max(1.0) && r >= 0.0).then_some(r as usize)
    };

    // cell ranges [i0, i1) x [j0, j1) of every cutout
    let mut holes = Vec::with_capacity(cutouts.len());
    for (c, r) in cutouts.iter().enumerate() {
        let idx = (
            grid_index(r.x0, domain.x0, dx),
            grid_index(r.x1, domain.x0, dx),
            grid_index(r.y0, domain.y0, dy),
            grid_index(r.y1, domain.y0, dy),
        );
        let (i0, i1, j0, j1) = match idx {
            (Some(a), Some(b), Some(c), Some(d)) if a < b && c < d && b <= nx && d <= ny => (a, b, c, d),
            _ => {
                return Err(Error::Input(format!(
                    "cutout {c} [{}, {}] x [{}, {}] is not aligned to the {nx}x{ny} grid lines of the domain or lies outside it",
                    r.x0, r.x1, r.y0, r.y1
                )))
            }
        };
        holes.push((i0, i1, j0, j1));
    }
    let hole_of = |i: usize, j: usize| -> Option<usize> {
        holes
            .iter()
            .position(|&(i0, i1, j0, j1)| i >= i0 && i < i1 && j >= j0 && j < j1)
    };

    let kept = |i: usize, j: usize| hole_of(i, j).is_none();

    // number only the grid points used by kept cells
    let mut node_id = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let gid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let used = [(i.wrapping_sub(1), j.wrapping_sub(1)), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j)]
                .iter()
                .any(|&(ci, cj)| ci < nx && cj < ny && kept(ci, cj));
            if used {
                node_id[gid(i, j)] = nodes.len();
                let x = if i == nx { domain.x1 } else { domain.x0 + i as f64 * dx };
                let y = if j == ny { domain.y1 } else { domain.y0 + j as f64 * dy };
                nodes.push(Point::new(x, y));
            }
        }
    }

    let mut elements = Vec::new();
    let mut edge_sets: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    for j in 0..ny {
        for i in 0..nx {
            if !kept(i, j) {
                continue;
            }
            let e = elements.len();
            elements.push(vec![
                node_id[gid(i, j)],
                node_id[gid(i + 1, j)],
                node_id[gid(i + 1, j + 1)],
                node_id[gid(i, j + 1)],
            ]);
            // local edges: 0 bottom, 1 right, 2 top, 3 left
            let outside = [
                (j == 0, j > 0 && !kept(i, j - 1), (i, j.wrapping_sub(1))),
                (i + 1 == nx, i + 1 < nx && !kept(i + 1, j), (i + 1, j)),
                (j + 1 == ny, j + 1 < ny && !kept(i, j + 1), (i, j + 1)),
                (i == 0, i > 0 && !kept(i - 1, j), (i.wrapping_sub(1), j)),
            ];
            for (k, &(on_domain, on_hole, (ni, nj))) in outside.iter().enumerate() {
                if on_domain {
                    edge_sets.entry(BOUNDARY_NAMES[k].to_string()).or_default().push((e, k));
                } else if on_hole {
                    let c = hole_of(ni, nj).expect("neighbour cell is in a cutout");
                    edge_sets.entry(format!("cutout{c}")).or_default().push((e, k));
                }
            }
        }
    }

    let mut node_sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (name, edges) in &edge_sets {
        let mut set: Vec<usize> = edges
            .iter()
            .flat_map(|&(e, k)| {
                let ring = &elements[e];
                [ring[k], ring[(k + 1) % 4]]
            })
            .collect();
        set.sort_unstable();
        set.dedup();
        node_sets.insert(name.clone(), set);
    }

    PolyMesh::new(nodes, elements, node_sets, edge_sets)
}

/// Mapped quadrilateral mesh of the quarter plate `[0, L/2] × [0, H/2]` with
/// a quarter hole of radius `a` at the origin.
///
/// Tangential lines are rays from the origin; the outer corner `(L/2, H/2)`
/// is always a node so both straight outer edges are represented exactly.
/// Radial node spacing is uniform between the arc and the outer path.
///
/// Sets: `arc`, `bottom` (y = 0), `left` (x = 0), `right` (x = L/2),
/// `top` (y = H/2).
pub fn generate_quarter_plate_hole(a: f64, half_length: f64, half_height: f64, n_r: usize, n_t: usize) -> Result<PolyMesh> {
    if !(a > 0.0 && a < half_length.min(half_height)) {
        return Err(Error::Input(format!(
            "hole radius {a} must satisfy 0 < a < min({half_length}, {half_height})"
        )));
    }
    if n_r < 2 || n_t < 2 {
        return Err(Error::Input(format!("radial and tangential counts must be at least 2 (got {n_r}, {n_t})")));
    }
    let corner_angle = half_height.atan2(half_length);
    let k = ((n_t as f64 * corner_angle / FRAC_PI_2).round() as usize).clamp(1, n_t - 1);
    let angle = |i: usize| -> f64 {
        if i <= k {
            corner_angle * i as f64 / k as f64
        } else {
            corner_angle + (FRAC_PI_2 - corner_angle) * (i - k) as f64 / (n_t - k) as f64
        }
    };
    let outer = |i: usize| -> Point {
        if i == k {
            return Point::new(half_length, half_height);
        }
        if i == 0 {
            return Point::new(half_length, 0.0);
        }
        if i == n_t {
            return Point::new(0.0, half_height);
        }
        let phi = angle(i);
        let (s, c) = phi.sin_cos();
        if i < k {
            Point::new(half_length, half_length * s / c)
        } else {
            Point::new(half_height * c / s, half_height)
        }
    };
    let inner = |i: usize| -> Point {
        if i == 0 {
            return Point::new(a, 0.0);
        }
        if i == n_t {
            return Point::new(0.0, a);
        }
        let (s, c) = angle(i).sin_cos();
        Point::new(a * c, a * s)
    };

    let id = |i: usize, j: usize| i * (n_r + 1) + j;
    let mut nodes = Vec::with_capacity((n_t + 1) * (n_r + 1));
    for i in 0..=n_t {
        let (p, q) = (inner(i), outer(i));
        for j in 0..=n_r {
            let t = j as f64 / n_r as f64;
            let mut pt = Point::from(p.coords * (1.0 - t) + q.coords * t);
            if j == n_r {
                pt = q;
            }
            if i == 0 {
                pt.y = 0.0;
            }
            if i == n_t {
                pt.x = 0.0;
            }
            nodes.push(pt);
        }
    }

    let mut elements = Vec::with_capacity(n_t * n_r);
    let mut edge_sets: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n_t {
        for j in 0..n_r {
            let e = elements.len();
            let ring = vec![id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)];
            let area = signed_area(&ring.iter().map(|&v| nodes[v]).collect::<Vec<_>>());
            if !(area > 0.0) {
                return Err(Error::Geometry(format!(
                    "degenerate mapping: cell ({i}, {j}) has non-positive area {area:e}"
                )));
            }
            elements.push(ring);
            // local edges: 0 radial at angle i, 1 outer-side, 2 radial at i+1, 3 arc-side
            if i == 0 {
                edge_sets.entry("bottom".into()).or_default().push((e, 0));
            }
            if i + 1 == n_t {
                edge_sets.entry("left".into()).or_default().push((e, 2));
            }
            if j == 0 {
                edge_sets.entry("arc".into()).or_default().push((e, 3));
            }
            if j + 1 == n_r {
                let name = if i < k { "right" } else { "top" };
                edge_sets.entry(name.into()).or_default().push((e, 1));
            }
        }
    }

    let mut node_sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    node_sets.insert("bottom".into(), (0..=n_r).map(|j| id(0, j)).collect());
    node_sets.insert("left".into(), (0..=n_r).map(|j| id(n_t, j)).collect());
    node_sets.insert("arc".into(), (0..=n_t).map(|i| id(i, 0)).collect());
    node_sets.insert("right".into(), (0..=k).map(|i| id(i, n_r)).collect());
    node_sets.insert("top".into(), (k..=n_t).map(|i| id(i, n_r)).collect());

    PolyMesh::new(nodes, elements, node_sets, edge_sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 1, 1, &[]).unwrap();
        assert_eq!(m.num_elements(), 1);
        assert_eq!(m.num_nodes(), 4);
        assert_eq!(m.total_area(), 1.0);
    }

    #[test]
    fn two_by_two_grid() {
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 2, 2, &[]).unwrap();
        assert_eq!(m.num_elements(), 4);
        assert_eq!(m.num_nodes(), 9);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        assert_eq!(m.node_set("left").unwrap().len(), 3);
        assert_eq!(m.edge_set("top").unwrap().len(), 2);
    }

    #[test]
    fn notch_cutout_removes_one_cell() {
        // 10 x 2 cells minus the bottom cell [4, 5] x [0, 1]
        let m = generate_structured(
            Rect::new(0.0, 0.0, 10.0, 2.0),
            10,
            2,
            &[Rect::new(4.0, 0.0, 5.0, 1.0)],
        )
        .unwrap();
        assert_eq!(m.num_elements(), 19);
        assert!((m.total_area() - 19.0).abs() < 1e-12);
        // the notch exposes three edges: two flanks and the tip
        assert_eq!(m.edge_set("cutout0").unwrap().len(), 3);
        // bottom line loses the notch edge
        assert_eq!(m.edge_set("bottom").unwrap().len(), 9);
    }

    #[test]
    fn misaligned_cutout_is_named() {
        let err = generate_structured(
            Rect::new(0.0, 0.0, 10.0, 2.0),
            10,
            2,
            &[Rect::new(0.0, 0.0, 1.0, 1.0), Rect::new(4.5, 0.0, 5.5, 1.0)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("cutout 1"), "{err}");
    }

    #[test]
    fn quarter_plate_coarse() {
        let m = generate_quarter_plate_hole(0.4, 2.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.num_elements(), 4);
        for e in 0..4 {
            assert!(m.element_area(e) > 0.0);
        }
        for &i in m.node_set("arc").unwrap() {
            assert!((m.nodes()[i].coords.norm() - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_plate_area_converges_to_analytic() {
        let m = generate_quarter_plate_hole(0.4, 2.0, 1.0, 16, 16).unwrap();
        assert_eq!(m.num_elements(), 256);
        let exact = 2.0 * 1.0 - std::f64::consts::PI * 0.16 / 4.0;
        assert!(((m.total_area() - exact) / exact).abs() < 5e-3);
        // the outer corner is a node
        assert!(m.nodes().iter().any(|p| (p - Point::new(2.0, 1.0)).norm() < 1e-14));
    }

    #[test]
    fn hole_too_large_is_rejected() {
        assert!(generate_quarter_plate_hole(1.0, 2.0, 1.0, 4, 4).is_err());
        assert!(generate_quarter_plate_hole(1.2, 2.0, 1.0, 4, 4).is_err());
    }
}
