use crate::material::MaterialModel;
use crate::solver::{solve_sparse, Discretization, DofMap, Factorization};
use crate::{Error, Result};

/// Linear-elastic displacements for prescribed values at `control` and
/// external nodal forces `f_ext`.
///
/// Constrained dofs are eliminated; the reduced system is symmetric positive
/// definite and solved by sparse Cholesky.
pub fn solve_elastic(
    disc: &Discretization,
    model: &MaterialModel,
    dofs: &DofMap,
    f_ext: &[f64],
    control: f64,
) -> Result<Vec<f64>> {
    if f_ext.len() != disc.num_dofs() || dofs.num_dofs() != disc.num_dofs() {
        return Err(Error::Input("load vector or dof map does not match the mesh".into()));
    }
    let c = model.elastic_matrix();
    let mut d = vec![0.0; disc.num_dofs()];
    dofs.prescribe(&mut d, control);
    let mut rhs: Vec<f64> = dofs.free().iter().map(|&i| f_ext[i]).collect();
    let mut reduced = Vec::new();
    for (i, j, v) in disc.elastic_triplets(&c) {
        match (dofs.free_index(i), dofs.free_index(j)) {
            (Some(a), Some(b)) => reduced.push((a, b, v)),
            (Some(a), None) => rhs[a] -= v * d[j],
            _ => {}
        }
    }
    let x = solve_sparse(dofs.free().len(), &reduced, &rhs, Factorization::Cholesky)?;
    for (k, &i) in dofs.free().iter().enumerate() {
        d[i] = x[k];
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::QuadratureRule;
    use crate::material::{Criterion, PlaneCondition};
    use crate::mesh::{generate_structured, Rect};
    use crate::solver::Constraint;

    fn model(nu: f64) -> MaterialModel {
        MaterialModel::new(1.0, nu, PlaneCondition::Stress, Criterion::Mazars, 0.9, 100.0, 1e-4).unwrap()
    }

    #[test]
    fn unloaded_is_zero() {
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 2, 2, &[]).unwrap();
        let bottom = m.node_set("bottom").unwrap().to_vec();
        let cons = bottom.iter().flat_map(|&n| [Constraint::fixed(n, 0, 0.0), Constraint::fixed(n, 1, 0.0)]).collect();
        let dofs = DofMap::new(2 * m.num_nodes(), cons).unwrap();
        let disc = Discretization::new(m, QuadratureRule::ThreePoint, 1.0).unwrap();
        let d = solve_elastic(&disc, &model(0.3), &dofs, &vec![0.0; disc.num_dofs()], 0.0).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniaxial_stretch() {
        // E = 1, nu = 0, traction 0.01 on the right edge: u_x = 0.01 x
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 3, 3, &[]).unwrap();
        let mut cons: Vec<Constraint> = m.node_set("left").unwrap().iter().map(|&n| Constraint::fixed(n, 0, 0.0)).collect();
        cons.push(Constraint::fixed(0, 1, 0.0));
        let dofs = DofMap::new(2 * m.num_nodes(), cons).unwrap();
        let right = m.edge_set("right").unwrap().to_vec();
        let disc = Discretization::new(m, QuadratureRule::ThreePoint, 1.0).unwrap();
        let f = disc.traction_load(&right, |_| nalgebra::Vector2::new(0.01, 0.0));
        let d = solve_elastic(&disc, &model(0.0), &dofs, &f, 0.0).unwrap();
        for (i, p) in disc.mesh().nodes().iter().enumerate() {
            assert!((d[2 * i] - 0.01 * p.x).abs() < 1e-13);
            assert!(d[2 * i + 1].abs() < 1e-13);
        }
    }

    #[test]
    fn floating_body_rejected() {
        let m = generate_structured(Rect::new(0.0, 0.0, 1.0, 1.0), 1, 1, &[]).unwrap();
        let dofs = DofMap::new(8, vec![Constraint::fixed(0, 0, 0.0)]).unwrap();
        let disc = Discretization::new(m, QuadratureRule::ThreePoint, 1.0).unwrap();
        let err = solve_elastic(&disc, &model(0.3), &dofs, &[0.0; 8], 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularSystem(_)), "{err}");
    }
}
