//! Bar under displacement control. A weakened band in the middle localises
//! the damage; the reaction is printed per step next to the homogeneous
//! closed-form response.

use polyfrac::basis::QuadratureRule;
use polyfrac::material::{Criterion, MaterialModel, PlaneCondition};
use polyfrac::mesh::{generate_structured, Rect};
use polyfrac::nonlocal::KernelSpec;
use polyfrac::solver::{Constraint, Discretization, DofMap, Schedule, Solver};

fn main() -> polyfrac::Result<()> {
    let (l, h, t) = (100.0, 10.0, 10.0);
    let mesh = generate_structured(Rect::new(0.0, 0.0, l, h), 40, 4, &[Rect::new(47.5, 0.0, 52.5, 2.5)])?;
    let mut cons = Vec::new();
    for &v in mesh.node_set("left").unwrap() {
        cons.push(Constraint::fixed(v, 0, 0.0));
    }
    cons.push(Constraint::fixed(mesh.nearest_node(&polyfrac::Point::new(0.0, 0.0)).unwrap(), 1, 0.0));
    for &v in mesh.node_set("right").unwrap() {
        cons.push(Constraint::driven(v, 0, 1.0));
    }
    let dofs = DofMap::new(2 * mesh.num_nodes(), cons)?;
    let disc = Discretization::new(mesh, QuadratureRule::ThreePoint, t)?;
    let model = MaterialModel::new(30e3, 0.2, PlaneCondition::Stress, Criterion::ModifiedVonMises { k: 10.0 }, 0.95, 400.0, 1e-4)?;
    let solver = Solver::new(disc, model, &KernelSpec::truncated(6.0)?, dofs)?;

    let outcome = solver.run(&Schedule::uniform(40, 0.0025), 0);
    println!("step  delta    reaction   homogeneous  iters  max omega");
    for r in &outcome.state.records {
        let e = r.control / l;
        let homogeneous = (1.0 - model.damage(e.max(model.kappa0))) * model.e * h * t * e;
        println!(
            "{:>4}  {:.4}  {:>9.2}  {:>11.2}  {:>5}  {:.4}",
            r.step, r.control, r.reaction, homogeneous, r.iterations, r.max_omega
        );
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
