//! Isotropic damage at a material point.
//!
//! Strains are engineering vectors `(ε_xx, ε_yy, γ_xy)`; the tensor shear
//! component is `γ_xy / 2`. The out-of-plane strain is zero in plane strain
//! and `-ν/(1-ν) (ε_xx + ε_yy)` in plane stress.

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneCondition {
    Stress,
    Strain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Mazars,
    /// `k` is the compressive-to-tensile strength ratio.
    ModifiedVonMises { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    pub e: f64,
    pub nu: f64,
    pub plane: PlaneCondition,
    pub criterion: Criterion,
    /// Residual-damage parameter of the exponential law.
    pub alpha: f64,
    /// Softening rate.
    pub beta: f64,
    pub kappa0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointHistory {
    pub kappa: f64,
    pub loading: bool,
}

impl PointHistory {
    pub fn new(kappa0: f64) -> Self {
        PointHistory {
            kappa: kappa0,
            loading: false,
        }
    }
}

/// `κ = max(κ_old, ε̄)`; the point is loading when `ε̄ ≥ κ_old`.
pub fn update_history(history: PointHistory, eps_bar: f64) -> PointHistory {
    PointHistory {
        kappa: history.kappa.max(eps_bar),
        loading: eps_bar >= history.kappa,
    }
}

fn positive(x: f64) -> f64 {
    0.5 * (x.abs() + x)
}

impl MaterialModel {
    /// Checks parameter ranges and returns the model.
    pub fn new(
        e: f64,
        nu: f64,
        plane: PlaneCondition,
        criterion: Criterion,
        alpha: f64,
        beta: f64,
        kappa0: f64,
    ) -> Result<Self> {
        let m = MaterialModel {
            e,
            nu,
            plane,
            criterion,
            alpha,
            beta,
            kappa0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.e > 0.0 && self.e.is_finite()) {
            bad.push(format!("E must be positive (got {})", self.e));
        }
        if !(0.0..0.5).contains(&self.nu) {
            bad.push(format!("nu must be in [0, 0.5) (got {})", self.nu));
        }
        if let Criterion::ModifiedVonMises { k } = self.criterion {
            if !(k > 0.0) {
                bad.push(format!("k must be positive (got {k})"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            bad.push(format!("alpha must be in (0, 1] (got {})", self.alpha));
        }
        if !(self.beta > 0.0) {
            bad.push(format!("beta must be positive (got {})", self.beta));
        }
        if !(self.kappa0 > 0.0) {
            bad.push(format!("kappa0 must be positive (got {})", self.kappa0));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Input(bad.join("; ")))
        }
    }

    pub fn elastic_matrix(&self) -> Matrix3<f64> {
        let (e, nu) = (self.e, self.nu);
        match self.plane {
            PlaneCondition::Stress => {
                let f = e / (1.0 - nu * nu);
                Matrix3::new(f, f * nu, 0.0, f * nu, f, 0.0, 0.0, 0.0, f * 0.5 * (1.0 - nu))
            }
            PlaneCondition::Strain => {
                let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
                Matrix3::new(
                    f * (1.0 - nu),
                    f * nu,
                    0.0,
                    f * nu,
                    f * (1.0 - nu),
                    0.0,
                    0.0,
                    0.0,
                    f * 0.5 * (1.0 - 2.0 * nu),
                )
            }
        }
    }

    /// `σ = (1 - ω) C ε`.
    pub fn stress(&self, eps: &Vector3<f64>, omega: f64) -> Result<Vector3<f64>> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::Input(format!("damage {omega} outside [0, 1]")));
        }
        Ok(self.elastic_matrix() * eps * (1.0 - omega))
    }

    /// `∂ε_zz / ∂ε_xx = ∂ε_zz / ∂ε_yy`.
    pub fn out_of_plane_factor(&self) -> f64 {
        match self.plane {
            PlaneCondition::Stress => -self.nu / (1.0 - self.nu),
            PlaneCondition::Strain => 0.0,
        }
    }

    pub fn eps_zz(&self, eps: &Vector3<f64>) -> f64 {
        self.out_of_plane_factor() * (eps[0] + eps[1])
    }

    /// In-plane principal strains (major, minor) and `ε_zz`.
    pub fn principal_strains(&self, eps: &Vector3<f64>) -> [f64; 3] {
        let a = 0.5 * (eps[0] + eps[1]);
        let b = (0.25 * (eps[0] - eps[1]).powi(2) + 0.25 * eps[2] * eps[2]).sqrt();
        [a + b, a - b, self.eps_zz(eps)]
    }

    /// Equivalent strain and its gradient with respect to `(ε_xx, ε_yy, γ_xy)`.
    pub fn equivalent_strain(&self, eps: &Vector3<f64>) -> (f64, Vector3<f64>) {
        match self.criterion {
            Criterion::Mazars => self.mazars(eps),
            Criterion::ModifiedVonMises { k } => self.von_mises(eps, k),
        }
    }

    fn mazars(&self, eps: &Vector3<f64>) -> (f64, Vector3<f64>) {
        let c = self.out_of_plane_factor();
        let p = self.principal_strains(eps);
        let b = 0.5 * (p[0] - p[1]);
        let da = Vector3::new(0.5, 0.5, 0.0);
        // at b = 0 the two in-plane contributions cancel in any direction
        let db = if b > 0.0 {
            Vector3::new(eps[0] - eps[1], eps[1] - eps[0], eps[2]) / (4.0 * b)
        } else {
            Vector3::zeros()
        };
        let grads = [da + db, da - db, Vector3::new(c, c, 0.0)];
        let pos = p.map(positive);
        let eq = pos.iter().map(|x| x * x).sum::<f64>().sqrt();
        if eq == 0.0 {
            return (0.0, Vector3::zeros());
        }
        let eta = (0..3).fold(Vector3::zeros(), |acc, i| acc + grads[i] * pos[i]) / eq;
        (eq, eta)
    }

    fn von_mises(&self, eps: &Vector3<f64>, k: f64) -> (f64, Vector3<f64>) {
        let nu = self.nu;
        let c = self.out_of_plane_factor();
        let ezz = self.eps_zz(eps);
        let i1 = eps[0] + eps[1] + ezz;
        let di1 = Vector3::new(1.0 + c, 1.0 + c, 0.0);
        let tr2 = eps[0] * eps[0] + eps[1] * eps[1] + ezz * ezz + 0.5 * eps[2] * eps[2];
        let dtr2 = Vector3::new(2.0 * eps[0] + 2.0 * c * ezz, 2.0 * eps[1] + 2.0 * c * ezz, eps[2]);
        let j2 = (3.0 * tr2 - i1 * i1) / 6.0;
        let dj2 = (dtr2 * 3.0 - di1 * (2.0 * i1)) / 6.0;

        let ca = (k - 1.0) / (2.0 * k * (1.0 - 2.0 * nu));
        let cb = 1.0 / (2.0 * k);
        let cc = ((k - 1.0) / (1.0 - 2.0 * nu)).powi(2);
        let cd = 12.0 * k / (1.0 + nu).powi(2);
        let root = (cc * i1 * i1 + cd * j2).max(0.0).sqrt();
        let eq = ca * i1 + cb * root;
        let eta = if root > 0.0 {
            di1 * ca + (di1 * (2.0 * cc * i1) + dj2 * cd) * (cb / (2.0 * root))
        } else {
            di1 * ca
        };
        (eq, eta)
    }

    /// `ω(κ)`.
    pub fn damage(&self, kappa: f64) -> f64 {
        if kappa <= self.kappa0 {
            return 0.0;
        }
        let soft = 1.0 - self.alpha + self.alpha * (-self.beta * (kappa - self.kappa0)).exp();
        1.0 - self.kappa0 / kappa * soft
    }

    /// `dω/dκ`.
    pub fn damage_derivative(&self, kappa: f64) -> f64 {
        if kappa <= self.kappa0 {
            return 0.0;
        }
        let ex = (-self.beta * (kappa - self.kappa0)).exp();
        self.kappa0 / (kappa * kappa) * (1.0 - self.alpha + self.alpha * ex)
            + self.kappa0 / kappa * self.alpha * self.beta * ex
    }
}
