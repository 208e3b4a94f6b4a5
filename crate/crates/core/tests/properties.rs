//! Property tests for the structural invariants of each module.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DVector, Vector3};
use proptest::prelude::*;

use polyfrac::basis::{quadrature, subtriangulate, QuadratureRule};
use polyfrac::bench::KirschField;
use polyfrac::material::{update_history, Criterion, MaterialModel, PlaneCondition, PointHistory};
use polyfrac::mesh::{generate_structured, read_mesh, refine_polytree, signed_area, write_mesh, PolyMesh, Rect, RefinementPlan};
use polyfrac::nonlocal::{build_table, KernelSpec};
use polyfrac::solver::{Constraint, Discretization, DofMap};
use polyfrac::Point;

/// Convex polygon with vertices on an ellipse, counter-clockwise.
fn polygon() -> impl Strategy<Value = Vec<Point>> {
    (3usize..9, 0.5f64..2.0, 0.5f64..2.0, -5.0f64..5.0, -5.0f64..5.0, any::<u64>()).prop_map(|(n, ax, ay, cx, cy, seed)| {
        // jittered angles keep a minimum gap between neighbours
        let mut s = seed;
        (0..n)
            .map(|k| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let jitter = ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.6;
                let t = 2.0 * PI * (k as f64 + 0.5 + jitter) / n as f64;
                Point::new(cx + ax * t.cos(), cy + ay * t.sin())
            })
            .collect()
    })
}

fn single(coords: &[Point]) -> PolyMesh {
    PolyMesh::new(coords.to_vec(), vec![(0..coords.len()).collect()], BTreeMap::new(), BTreeMap::new()).unwrap()
}

fn rule() -> impl Strategy<Value = QuadratureRule> {
    prop_oneof![Just(QuadratureRule::OnePoint), Just(QuadratureRule::ThreePoint)]
}

fn model() -> impl Strategy<Value = MaterialModel> {
    (
        prop_oneof![Just(PlaneCondition::Stress), Just(PlaneCondition::Strain)],
        prop_oneof![Just(Criterion::Mazars), (1.0f64..20.0).prop_map(|k| Criterion::ModifiedVonMises { k })],
        0.0f64..0.45,
        0.1f64..1.0,
        10.0f64..1000.0,
        1e-5f64..1e-3,
    )
        .prop_map(|(plane, criterion, nu, alpha, beta, kappa0)| {
            MaterialModel::new(30e3, nu, plane, criterion, alpha, beta, kappa0).unwrap()
        })
}

fn strain() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| Vector3::new(a, b, c) * 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fan_covers_the_polygon(coords in polygon()) {
        let sub = subtriangulate(&coords, 0).unwrap();
        prop_assert_eq!(sub.triangles.len(), coords.len());
        prop_assert!(sub.triangles.iter().all(|t| t.area > 0.0));
        let area = signed_area(&coords);
        prop_assert!((sub.area() - area).abs() <= 1e-12 * area);
    }

    #[test]
    fn shape_functions_are_consistent(coords in polygon(), rule in rule()) {
        for qp in quadrature(&coords, 0, rule).unwrap() {
            prop_assert!(qp.volume() > 0.0);
            prop_assert!((qp.shape.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let g = qp.grad.iter().fold(nalgebra::Vector2::zeros(), |a, b| a + b);
            prop_assert!(g.norm() < 1e-10);
        }
    }

    #[test]
    fn projection_reproduces_affine_fields(coords in polygon(), rule in rule(),
                                          u in prop::array::uniform6(-1.0f64..1.0)) {
        let mesh = single(&coords);
        let d: Vec<f64> = coords
            .iter()
            .flat_map(|p| [u[0] + u[1] * p.x + u[2] * p.y, u[3] + u[4] * p.x + u[5] * p.y])
            .collect();
        let exact = Vector3::new(u[1], u[5], u[2] + u[4]);
        let disc = Discretization::new(mesh, rule, 1.0).unwrap();
        for e in disc.strains(&d) {
            prop_assert!((e - exact).norm() < 1e-11);
        }
        let de = DVector::from_vec(d.clone());
        for qp in quadrature(&coords, 0, rule).unwrap() {
            prop_assert!((&qp.b * &de - exact).norm() < 1e-11);
        }
    }

    #[test]
    fn refinement_preserves_invariants(nx in 1usize..5, ny in 1usize..5, picks in prop::collection::vec(any::<bool>(), 16),
                                       level in 1usize..3, balance in any::<bool>()) {
        let base = generate_structured(Rect::new(0.0, 0.0, nx as f64, ny as f64), nx, ny, &[]).unwrap();
        let targets: Vec<usize> = (0..base.num_elements()).filter(|&e| picks[e % picks.len()]).collect();
        let plan = RefinementPlan::uniform(targets.clone(), level, balance);
        let fine = refine_polytree(&base, &plan).unwrap();
        fine.validate().unwrap();
        prop_assert!((fine.total_area() - base.total_area()).abs() <= 1e-12 * base.total_area());
        if !targets.is_empty() {
            prop_assert!(fine.num_elements() > base.num_elements());
        }
        let mut text = Vec::new();
        write_mesh(&fine, &mut text).unwrap();
        prop_assert_eq!(read_mesh(&text[..], "roundtrip").unwrap(), fine);
    }

    #[test]
    fn equivalent_strain_is_homogeneous(m in model(), e in strain(), lambda in 0.01f64..100.0) {
        let (a, da) = m.equivalent_strain(&e);
        let (b, db) = m.equivalent_strain(&(e * lambda));
        prop_assert!((b - lambda * a).abs() <= 1e-12 * (lambda * a).abs().max(1e-12 * lambda * e.norm()));
        prop_assert!((db - da).norm() <= 1e-9 * da.norm().max(1e-12));
    }

    #[test]
    fn damage_is_bounded_and_monotone(m in model(), k1 in 0.0f64..200.0, k2 in 0.0f64..200.0) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let (wl, wh) = (m.damage(lo * m.kappa0), m.damage(hi * m.kappa0));
        prop_assert!((0.0..1.0).contains(&wl) && (0.0..1.0).contains(&wh));
        prop_assert!(wl <= wh);
        prop_assert!(m.damage_derivative(hi * m.kappa0) >= 0.0);
    }

    #[test]
    fn history_never_decreases(k0 in 1e-5f64..1e-3, path in prop::collection::vec(0.0f64..5e-3, 1..30)) {
        let mut h = PointHistory::new(k0);
        for e in path {
            let next = update_history(h, e);
            prop_assert!(next.kappa >= h.kappa);
            prop_assert_eq!(next.loading, e >= h.kappa);
            h = next;
        }
    }

    #[test]
    fn nonlocal_table_invariants(pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.1f64..2.0), 1..120),
                                 radius in 0.2f64..4.0) {
        let positions: Vec<Point> = pts.iter().map(|p| Point::new(p.0, p.1)).collect();
        let volumes: Vec<f64> = pts.iter().map(|p| p.2).collect();
        let table = build_table(&positions, &volumes, &KernelSpec::truncated(radius).unwrap()).unwrap();
        for i in 0..positions.len() {
            prop_assert!(table.sum(i) > 0.0);
            let row: Vec<(usize, f64)> = table.row(i).collect();
            prop_assert!(row.iter().any(|&(j, _)| j == i));
            prop_assert!(row.iter().all(|&(j, _)| (positions[j] - positions[i]).norm() <= radius));
            prop_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            let s: f64 = row.iter().map(|&(_, a)| a / table.sum(i)).sum();
            prop_assert!((s - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn dofs_partition(n_nodes in 1usize..30, picks in prop::collection::vec((0usize..60, any::<bool>()), 0..20)) {
        let n = 2 * n_nodes;
        let mut seen = std::collections::BTreeSet::new();
        let cons: Vec<Constraint> = picks
            .iter()
            .filter(|(dof, _)| *dof < n && seen.insert(*dof))
            .map(|&(dof, driven)| if driven {
                Constraint::driven(dof / 2, dof % 2, 1.0)
            } else {
                Constraint::fixed(dof / 2, dof % 2, 0.5)
            })
            .collect();
        let map = DofMap::new(n, cons.clone()).unwrap();
        let mut all: Vec<usize> = map.free().to_vec();
        all.extend(map.constraints().iter().map(|c| c.dof));
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for (k, &i) in map.free().iter().enumerate() {
            prop_assert_eq!(map.free_index(i), Some(k));
        }
        for c in &cons {
            prop_assert_eq!(map.free_index(c.dof), None);
        }
    }

    #[test]
    fn kirsch_hole_is_traction_free(phi in 0.0f64..(2.0 * PI), a in 0.1f64..2.0, sigma in -50.0f64..50.0) {
        let f = KirschField { sigma, a, e: 2.1e5, nu: 0.3, plane: PlaneCondition::Stress };
        let s = f.polar_stress(a, phi);
        prop_assert!(s[0].abs() <= 1e-12 * sigma.abs().max(1.0));
        prop_assert!(s[2].abs() <= 1e-12 * sigma.abs().max(1.0));
    }
}
