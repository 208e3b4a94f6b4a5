use nalgebra::{Matrix3, Vector2, Vector3};
use rayon::prelude::*;

use crate::basis::quadrature;
use crate::solver::Discretization;
use crate::{Error, Point, Result};

/// Relative `(L2, energy)` errors of the displacement field `d` against exact
/// displacement and strain evaluators.
///
/// Numerical strains are the assumed strains; the energy seminorm uses `c`.
pub fn error_norms(
    disc: &Discretization,
    d: &[f64],
    c: &Matrix3<f64>,
    exact_u: impl Fn(&Point) -> Vector2<f64> + Sync,
    exact_eps: impl Fn(&Point) -> Vector3<f64> + Sync,
) -> Result<(f64, f64)> {
    if d.len() != disc.num_dofs() {
        return Err(Error::Input("displacement vector does not match the mesh".into()));
    }
    let mesh = disc.mesh();
    let parts: Vec<[f64; 4]> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let el = &disc.elements()[e];
            let gps = quadrature(&mesh.coords(e), e, disc.rule())?;
            let de = disc.gather(e, d);
            let mut acc = [0.0; 4];
            for (l, q) in gps.iter().enumerate() {
                let mut uh = Vector2::zeros();
                for (k, &v) in mesh.element(e).iter().enumerate() {
                    uh += q.shape[k] * Vector2::new(d[2 * v], d[2 * v + 1]);
                }
                let u = exact_u(&q.position);
                let eps = exact_eps(&q.position);
                let de_eps = &el.projection.b_tilde[l] * &de - eps;
                let w = q.volume();
                acc[0] += (uh - u).norm_squared() * w;
                acc[1] += u.norm_squared() * w;
                acc[2] += de_eps.dot(&(c * de_eps)) * w;
                acc[3] += eps.dot(&(c * eps)) * w;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut s = [0.0; 4];
    for p in &parts {
        for k in 0..4 {
            s[k] += p[k];
        }
    }
    if !(s[1] > 0.0) || !(s[3] > 0.0) {
        return Err(Error::Input("exact field has zero norm; relative errors are undefined".into()));
    }
    Ok(((s[0] / s[1]).sqrt(), (s[2] / s[3]).sqrt()))
}
