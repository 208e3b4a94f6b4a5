use nalgebra::{Vector2, Vector3};

use crate::material::PlaneCondition;
use crate::{Error, Point, Result};

/// Infinite plate with a circular hole of radius `a` under remote uniaxial
/// tension `sigma` along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirschField {
    pub sigma: f64,
    pub a: f64,
    pub e: f64,
    pub nu: f64,
    pub plane: PlaneCondition,
}

impl KirschField {
    /// `(σ_rr, σ_φφ, σ_rφ)`; defined for every `r > 0`.
    pub fn polar_stress(&self, r: f64, phi: f64) -> [f64; 3] {
        let (s, a) = (self.sigma, self.a);
        let q2 = a * a / (r * r);
        let q4 = q2 * q2;
        let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
        [
            0.5 * s * (1.0 - q2 + (1.0 - 4.0 * q2 + 3.0 * q4) * c2),
            0.5 * s * (1.0 + q2 - (1.0 + 3.0 * q4) * c2),
            -0.5 * s * (1.0 + 2.0 * q2 - 3.0 * q4) * s2,
        ]
    }

    /// Cartesian `(σ_xx, σ_yy, σ_xy)`.
    pub fn stress(&self, p: &Point) -> Vector3<f64> {
        let r = p.coords.norm();
        let phi = p.y.atan2(p.x);
        let [rr, pp, rp] = self.polar_stress(r, phi);
        let (s, c) = phi.sin_cos();
        Vector3::new(
            rr * c * c + pp * s * s - 2.0 * rp * s * c,
            rr * s * s + pp * c * c + 2.0 * rp * s * c,
            (rr - pp) * s * c + rp * (c * c - s * s),
        )
    }

    fn kolosov(&self) -> f64 {
        match self.plane {
            PlaneCondition::Strain => 3.0 - 4.0 * self.nu,
            PlaneCondition::Stress => (3.0 - self.nu) / (1.0 + self.nu),
        }
    }

    pub fn displacement(&self, p: &Point) -> Vector2<f64> {
        let r = p.coords.norm();
        let t = p.y.atan2(p.x);
        let (a, k) = (self.a, self.kolosov());
        let mu = self.e / (2.0 * (1.0 + self.nu));
        let f = self.sigma * a / (8.0 * mu);
        let (ra, ar, ar3) = (r / a, a / r, (a / r).powi(3));
        Vector2::new(
            f * (ra * (k + 1.0) * t.cos() + 2.0 * ar * ((1.0 + k) * t.cos() + (3.0 * t).cos()) - 2.0 * ar3 * (3.0 * t).cos()),
            f * (ra * (k - 3.0) * t.sin() + 2.0 * ar * ((1.0 - k) * t.sin() + (3.0 * t).sin()) - 2.0 * ar3 * (3.0 * t).sin()),
        )
    }

    /// Engineering strain `C⁻¹ σ`.
    pub fn strain(&self, p: &Point) -> Vector3<f64> {
        let s = self.stress(p);
        let (e, nu) = (self.e, self.nu);
        match self.plane {
            PlaneCondition::Stress => Vector3::new(
                (s[0] - nu * s[1]) / e,
                (s[1] - nu * s[0]) / e,
                2.0 * (1.0 + nu) * s[2] / e,
            ),
            PlaneCondition::Strain => {
                let f = (1.0 + nu) / e;
                Vector3::new(
                    f * ((1.0 - nu) * s[0] - nu * s[1]),
                    f * ((1.0 - nu) * s[1] - nu * s[0]),
                    2.0 * f * s[2],
                )
            }
        }
    }
}

/// Polar stresses and Cartesian displacement at `(r, φ)`, `r ≥ a`.
pub fn kirsch_exact(field: &KirschField, r: f64, phi: f64) -> Result<([f64; 3], Vector2<f64>)> {
    if !(r >= field.a) {
        return Err(Error::Input(format!("radius {r} lies inside the hole (a = {})", field.a)));
    }
    let p = Point::new(r * phi.cos(), r * phi.sin());
    Ok((field.polar_stress(r, phi), field.displacement(&p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn field(plane: PlaneCondition) -> KirschField {
        KirschField {
            sigma: 10.0,
            a: 0.4,
            e: 210e3,
            nu: 0.33,
            plane,
        }
    }

    #[test]
    fn hole_is_traction_free_and_scf_is_three() {
        let f = field(PlaneCondition::Stress);
        for k in 0..32 {
            let phi = k as f64 * 0.2;
            let (s, _) = kirsch_exact(&f, 0.4, phi).unwrap();
            assert!(s[0].abs() < 1e-12 * 10.0 && s[2].abs() < 1e-12 * 10.0);
        }
        let (s, _) = kirsch_exact(&f, 0.4, FRAC_PI_2).unwrap();
        assert!((s[1] - 30.0).abs() < 1e-12 * 10.0);
        assert!(kirsch_exact(&f, 0.3, 0.0).is_err());
    }

    #[test]
    fn far_field_is_uniaxial() {
        let f = field(PlaneCondition::Stress);
        let (s, _) = kirsch_exact(&f, 40.0, 0.0).unwrap();
        assert!((s[0] - 10.0).abs() < 1e-3 * 10.0);
    }

    #[test]
    fn displacement_gradient_reproduces_stress() {
        // central differences of u, mapped through C, against the stresses
        for plane in [PlaneCondition::Stress, PlaneCondition::Strain] {
            let f = field(plane);
            let m = crate::material::MaterialModel {
                e: f.e,
                nu: f.nu,
                plane,
                criterion: crate::material::Criterion::Mazars,
                alpha: 0.9,
                beta: 1.0,
                kappa0: 1.0,
            };
            let c = m.elastic_matrix();
            for &(x, y) in &[(0.5, 0.1), (1.2, 0.7), (0.1, 0.45), (1.9, 0.95)] {
                let p = Point::new(x, y);
                let h = 1e-5;
                let du_dx = (f.displacement(&Point::new(x + h, y)) - f.displacement(&Point::new(x - h, y))) / (2.0 * h);
                let du_dy = (f.displacement(&Point::new(x, y + h)) - f.displacement(&Point::new(x, y - h))) / (2.0 * h);
                let eps = Vector3::new(du_dx.x, du_dy.y, du_dx.y + du_dy.x);
                let s = c * eps;
                let exact = f.stress(&p);
                assert!((s - exact).norm() < 1e-6 * 10.0, "{plane:?} at {p}: {s} vs {exact}");
                assert!((f.strain(&p) - eps).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetry_planes_have_zero_normal_displacement() {
        let f = field(PlaneCondition::Stress);
        assert!(f.displacement(&Point::new(0.0, 0.7)).x.abs() < 1e-18);
        assert!(f.displacement(&Point::new(1.3, 0.0)).y.abs() < 1e-18);
    }
}
