use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{area_centroid, vertex_centroid, PolyMesh, Rect, GEOM_TOL};
use crate::{Error, Point, Result};

/// Cells to split and how many times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementPlan {
    pub targets: Vec<usize>,
    pub levels: Vec<usize>,
    /// Keep edge-neighbours within one level of each other.
    pub balance: bool,
}

impl RefinementPlan {
    pub fn new(targets: Vec<usize>, levels: Vec<usize>, balance: bool) -> Self {
        RefinementPlan { targets, levels, balance }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), true)
    }

    /// Every target refined `level` times.
    pub fn uniform(targets: Vec<usize>, level: usize, balance: bool) -> Self {
        let levels = vec![level; targets.len()];
        Self::new(targets, levels, balance)
    }

    /// All cells whose vertex centroid lies in `rect`.
    pub fn in_box(mesh: &PolyMesh, rect: &Rect, level: usize, balance: bool) -> Self {
        let targets = (0..mesh.num_elements())
            .filter(|&e| rect.contains(&vertex_centroid(&mesh.coords(e))))
            .collect();
        Self::uniform(targets, level, balance)
    }

    fn check(&self, mesh: &PolyMesh) -> Result<()> {
        if self.targets.len() != self.levels.len() {
            return Err(Error::Input(format!(
                "refinement plan has {} targets but {} levels",
                self.targets.len(),
                self.levels.len()
            )));
        }
        for (&t, &l) in self.targets.iter().zip(&self.levels) {
            if t >= mesh.num_elements() {
                return Err(Error::Input(format!(
                    "refinement target {t} does not exist (mesh has {} elements)",
                    mesh.num_elements()
                )));
            }
            if l == 0 {
                return Err(Error::Input(format!("refinement level for target {t} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Splits every targeted cell into one child per corner by joining its edge
/// midpoints to its centroid. Midpoints become ring vertices of unrefined
/// neighbours, so the result stays conforming at the ring level.
///
/// Node sets gain a midpoint when both ends of the split edge belong to the
/// set; edge sets follow the split halves.
pub fn refine_polytree(mesh: &PolyMesh, plan: &RefinementPlan) -> Result<PolyMesh> {
    plan.check(mesh)?;
    if plan.targets.is_empty() {
        return Ok(mesh.clone());
    }
    let mut work = Work::new(mesh, plan.balance);
    for (&t, &l) in plan.targets.iter().zip(&plan.levels) {
        work.refine_to(t, l)?;
    }
    work.finish()
}

struct Work {
    nodes: Vec<Point>,
    elements: Vec<Option<Vec<usize>>>,
    level: Vec<usize>,
    children: Vec<Vec<usize>>,
    owner: HashMap<(usize, usize), usize>,
    node_sets: BTreeMap<String, BTreeSet<usize>>,
    edge_sets: BTreeMap<String, BTreeSet<(usize, usize)>>,
    balance: bool,
}

impl Work {
    fn new(mesh: &PolyMesh, balance: bool) -> Self {
        let mut owner = HashMap::new();
        for (e, ring) in mesh.elements().iter().enumerate() {
            for k in 0..ring.len() {
                owner.insert((ring[k], ring[(k + 1) % ring.len()]), e);
            }
        }
        let edge_sets = mesh
            .edge_sets()
            .iter()
            .map(|(name, set)| (name.clone(), set.iter().map(|&(e, k)| mesh.edge_nodes(e, k)).collect()))
            .collect();
        Work {
            nodes: mesh.nodes().to_vec(),
            elements: mesh.elements().iter().cloned().map(Some).collect(),
            level: vec![0; mesh.num_elements()],
            children: vec![Vec::new(); mesh.num_elements()],
            owner,
            node_sets: mesh
                .node_sets()
                .iter()
                .map(|(n, s)| (n.clone(), s.iter().copied().collect()))
                .collect(),
            edge_sets,
            balance,
        }
    }

    fn refine_to(&mut self, e: usize, depth: usize) -> Result<()> {
        if depth == 0 {
            return Ok(());
        }
        if self.elements[e].is_some() {
            self.refine(e)?;
        }
        for c in self.children[e].clone() {
            self.refine_to(c, depth - 1)?;
        }
        Ok(())
    }

    fn ring(&self, e: usize) -> &[usize] {
        self.elements[e].as_deref().expect("live element")
    }

    fn refine(&mut self, e: usize) -> Result<()> {
        if self.balance {
            // coarser edge-neighbours go first; each split changes our ring
            loop {
                let ring = self.ring(e);
                let coarse = (0..ring.len())
                    .filter_map(|k| self.owner.get(&(ring[(k + 1) % ring.len()], ring[k])).copied())
                    .find(|&n| self.level[n] < self.level[e]);
                match coarse {
                    Some(n) => self.refine(n)?,
                    None => break,
                }
            }
        }

        let ring = self.ring(e).to_vec();
        let pts: Vec<Point> = ring.iter().map(|&v| self.nodes[v]).collect();
        let n = ring.len();
        let center = area_centroid(&pts);
        for k in 0..n {
            let (p, q) = (pts[k], pts[(k + 1) % n]);
            let c = (p.x - center.x) * (q.y - center.y) - (p.y - center.y) * (q.x - center.x);
            if !(c > GEOM_TOL * (p - q).norm_squared()) {
                return Err(Error::Geometry(format!(
                    "element {e} is not star-shaped about its centroid ({:.6}, {:.6}); cannot refine",
                    center.x, center.y
                )));
            }
        }

        let corners: Vec<usize> = (0..n)
            .filter(|&k| {
                let (a, b, c) = (pts[(k + n - 1) % n], pts[k], pts[(k + 1) % n]);
                let cr = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                cr.abs() > GEOM_TOL * (b - a).norm() * (c - b).norm()
            })
            .collect();
        if corners.len() < 3 {
            return Err(Error::Geometry(format!("element {e} has fewer than three corners")));
        }

        // midpoint node of every side, reused if already a hanging vertex
        let mut mids = Vec::with_capacity(corners.len());
        for s in 0..corners.len() {
            let (ka, kb) = (corners[s], corners[(s + 1) % corners.len()]);
            let (a, b) = (pts[ka], pts[kb]);
            let m = Point::from((a.coords + b.coords) * 0.5);
            let tol = 1e-9 * (b - a).norm();
            let ring_now = self.ring(e).to_vec();
            let start = ring_now.iter().position(|&v| v == ring[ka]).unwrap();
            let mut hit = None;
            let mut k = start;
            loop {
                let (p, q) = (ring_now[k], ring_now[(k + 1) % ring_now.len()]);
                if (self.nodes[q] - m).norm() <= tol {
                    hit = Some(q);
                    break;
                }
                if super::strictly_on_segment(&m, &self.nodes[p], &self.nodes[q]) {
                    let id = self.nodes.len();
                    self.nodes.push(m);
                    self.split_edge(p, q, id);
                    hit = Some(id);
                    break;
                }
                if q == ring[kb] {
                    break;
                }
                k = (k + 1) % ring_now.len();
            }
            let Some(mid) = hit else {
                return Err(Error::Geometry(format!("could not place midpoint on side {s} of element {e}")));
            };
            mids.push(mid);
        }

        let full = self.ring(e).to_vec();
        let c = self.nodes.len();
        self.nodes.push(center);
        let pos = |v: usize| full.iter().position(|&w| w == v).unwrap();
        let nc = corners.len();
        let mut kids = Vec::with_capacity(nc);
        for s in 0..nc {
            let from = pos(mids[(s + nc - 1) % nc]);
            let to = pos(mids[s]);
            let mut child = Vec::new();
            let mut k = from;
            loop {
                child.push(full[k]);
                if k == to {
                    break;
                }
                k = (k + 1) % full.len();
            }
            child.push(c);
            kids.push(child);
        }

        for k in 0..full.len() {
            self.owner.remove(&(full[k], full[(k + 1) % full.len()]));
        }
        self.elements[e] = None;
        let lvl = self.level[e] + 1;
        for child in kids {
            let id = self.elements.len();
            for k in 0..child.len() {
                self.owner.insert((child[k], child[(k + 1) % child.len()]), id);
            }
            self.elements.push(Some(child));
            self.level.push(lvl);
            self.children.push(Vec::new());
            self.children[e].push(id);
        }
        Ok(())
    }

    /// Inserts node `m` on the segment `p`–`q` in every ring and set that uses it.
    fn split_edge(&mut self, p: usize, q: usize, m: usize) {
        for (a, b) in [(p, q), (q, p)] {
            if let Some(owner) = self.owner.remove(&(a, b)) {
                let ring = self.elements[owner].as_mut().unwrap();
                let k = ring.iter().position(|&v| v == a).unwrap();
                ring.insert(k + 1, m);
                self.owner.insert((a, m), owner);
                self.owner.insert((m, b), owner);
            }
            for set in self.edge_sets.values_mut() {
                if set.remove(&(a, b)) {
                    set.insert((a, m));
                    set.insert((m, b));
                }
            }
        }
        for set in self.node_sets.values_mut() {
            if set.contains(&p) && set.contains(&q) {
                set.insert(m);
            }
        }
    }

    fn finish(self) -> Result<PolyMesh> {
        let mut new_id = vec![usize::MAX; self.elements.len()];
        let mut elements = Vec::new();
        for (e, ring) in self.elements.iter().enumerate() {
            if let Some(r) = ring {
                new_id[e] = elements.len();
                elements.push(r.clone());
            }
        }
        let mut edge_sets = BTreeMap::new();
        for (name, set) in &self.edge_sets {
            let mut list: Vec<(usize, usize)> = set
                .iter()
                .map(|&(a, b)| {
                    let e = self.owner[&(a, b)];
                    let ring = self.elements[e].as_ref().unwrap();
                    (new_id[e], ring.iter().position(|&v| v == a).unwrap())
                })
                .collect();
            list.sort_unstable();
            edge_sets.insert(name.clone(), list);
        }
        let node_sets = self
            .node_sets
            .into_iter()
            .map(|(n, s)| (n, s.into_iter().collect()))
            .collect();
        PolyMesh::new(self.nodes, elements, node_sets, edge_sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured;

    fn grid(n: usize) -> PolyMesh {
        generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), n, n, &[]).unwrap()
    }

    #[test]
    fn one_cell_of_two_by_two() {
        let m = grid(2);
        let r = refine_polytree(&m, &RefinementPlan::uniform(vec![0], 1, true)).unwrap();
        assert_eq!(r.num_elements(), 7);
        let mut arities: Vec<usize> = r.elements().iter().map(Vec::len).collect();
        arities.sort_unstable();
        assert_eq!(arities, vec![4, 4, 4, 4, 4, 5, 5]);
        assert!((r.total_area() - 1.0).abs() < 1e-12);
        // the hanging node at (0.5, 0) sits on the bottom boundary
        let bottom = r.node_set("bottom").unwrap();
        assert!(bottom.iter().any(|&i| (r.nodes()[i] - Point::new(0.25, 0.0)).norm() < 1e-15));
        assert_eq!(r.edge_set("bottom").unwrap().len(), 3);
    }

    #[test]
    fn uniform_refinement_quadruples() {
        let m = grid(2);
        let r = refine_polytree(&m, &RefinementPlan::uniform(vec![0, 1, 2, 3], 1, true)).unwrap();
        assert_eq!(r.num_elements(), 16);
        assert!(r.elements().iter().all(|ring| ring.len() == 4));
        assert_eq!(r.num_nodes(), 25);
    }

    #[test]
    fn empty_plan_is_identity() {
        let m = grid(3);
        assert_eq!(refine_polytree(&m, &RefinementPlan::empty()).unwrap(), m);
    }

    #[test]
    fn two_levels_with_balance() {
        let m = grid(4);
        let r = refine_polytree(&m, &RefinementPlan::uniform(vec![5], 2, true)).unwrap();
        assert!((r.total_area() - 1.0).abs() < 1e-12);
        // no ring may carry more than one hanging vertex per side when balanced
        assert!(r.elements().iter().all(|ring| ring.len() <= 8));
        let unbalanced = refine_polytree(&m, &RefinementPlan::uniform(vec![5], 2, false)).unwrap();
        assert!(unbalanced.num_elements() < r.num_elements());
        assert!(unbalanced.elements().iter().any(|ring| ring.len() > 5));
    }

    #[test]
    fn missing_target_rejected() {
        assert!(refine_polytree(&grid(1), &RefinementPlan::uniform(vec![3], 1, true)).is_err());
        assert!(refine_polytree(&grid(1), &RefinementPlan::uniform(vec![0], 0, true)).is_err());
    }

    #[test]
    fn non_star_cell_rejected() {
        // a thin "C" shaped hexagon-ish ring whose centroid falls outside
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 0.2),
            Point::new(0.2, 0.2),
            Point::new(0.2, 2.8),
            Point::new(3.0, 2.8),
            Point::new(3.0, 3.0),
            Point::new(0.0, 3.0),
        ];
        let m = PolyMesh::new(nodes, vec![(0..8).collect()], BTreeMap::new(), BTreeMap::new()).unwrap();
        let err = refine_polytree(&m, &RefinementPlan::uniform(vec![0], 1, true)).unwrap_err();
        assert!(err.to_string().contains("star-shaped"), "{err}");
    }
}
