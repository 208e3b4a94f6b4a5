//! Single material point: equivalent strains of both criteria along a few
//! strain paths and the exponential softening law.

use nalgebra::Vector3;
use polyfrac::material::{update_history, Criterion, MaterialModel, PlaneCondition, PointHistory};

fn main() -> polyfrac::Result<()> {
    let mazars = MaterialModel::new(20e3, 0.2, PlaneCondition::Stress, Criterion::Mazars, 0.98, 300.0, 9e-5)?;
    let von_mises = MaterialModel {
        criterion: Criterion::ModifiedVonMises { k: 10.0 },
        ..mazars
    };
    let paths = [
        ("uniaxial tension", Vector3::new(1e-4, -2e-5, 0.0)),
        ("uniaxial compression", Vector3::new(-1e-4, 2e-5, 0.0)),
        ("pure shear", Vector3::new(0.0, 0.0, 2e-4)),
        ("biaxial tension", Vector3::new(1e-4, 1e-4, 0.0)),
    ];
    println!("{:<22} {:>12} {:>12}", "path", "mazars", "von mises");
    for (name, e) in paths {
        println!("{name:<22} {:>12.4e} {:>12.4e}", mazars.equivalent_strain(&e).0, von_mises.equivalent_strain(&e).0);
    }

    println!("\nkappa/kappa0  omega     domega/dkappa");
    for f in [0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 50.0] {
        let k = f * mazars.kappa0;
        println!("{f:>11.1}  {:.6}  {:.4e}", mazars.damage(k), mazars.damage_derivative(k));
    }

    // loading, unloading and reloading
    let mut h = PointHistory::new(mazars.kappa0);
    for eps_bar in [5e-5, 2e-4, 1e-4, 3e-4] {
        h = update_history(h, eps_bar);
        println!("eps_bar {eps_bar:.1e}: kappa {:.1e}, loading {}, omega {:.4}", h.kappa, h.loading, mazars.damage(h.kappa));
    }
    Ok(())
}
