//! Assumed strain: the element-wise least-squares projection of the
//! compatible strains onto linear polynomials `S(x) = [1, ξ, ζ]`.
//!
//! With `M = Σ S Sᵀ w|J|` over the element's quadrature points, the projected
//! operator is
//!
//! ```text
//! B̃(x) = Σ_j S(x)ᵀ M⁻¹ S(x_j) B(x_j) w_j |J_j|  =  Σ_k S_k(x) G_k
//! ```
//!
//! so the three `G_k` are computed once and `B̃` at any point is a cheap
//! combination of them.

use nalgebra::{DVector, Matrix3, Matrix3xX, SymmetricEigen, Vector3};

use crate::basis::QuadPoint;
use crate::{Error, Point, Result};

/// Element-local monomial coordinates `ξ = (x - x_c)/h`, `ζ = (y - y_c)/h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub center: Point,
    pub scale: f64,
}

impl LocalFrame {
    pub fn monomials(&self, x: &Point) -> Vector3<f64> {
        Vector3::new(
            1.0,
            (x.x - self.center.x) / self.scale,
            (x.y - self.center.y) / self.scale,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrainProjection {
    pub frame: LocalFrame,
    /// Moment matrix `M`.
    pub moment: Matrix3<f64>,
    moment_inv: Matrix3<f64>,
    coeffs: [Matrix3xX<f64>; 3],
    /// `B̃` at each of the quadrature points the projection was built from.
    pub b_tilde: Vec<Matrix3xX<f64>>,
}

/// Eigenvalue ratio of `M` below which the projection is rejected.
const CONDITION_FLOOR: f64 = 1e-12;

/// Projects the compatible operators carried by `gps` onto linear strains.
pub fn build_projection(element: usize, frame: LocalFrame, gps: &[QuadPoint]) -> Result<StrainProjection> {
    let Some(first) = gps.first() else {
        return Err(Error::SingularProjection {
            element,
            detail: "no quadrature points".into(),
        });
    };
    let cols = first.b.ncols();
    let mut moment = Matrix3::zeros();
    for q in gps {
        let s = frame.monomials(&q.position);
        moment += s * s.transpose() * q.volume();
    }
    let eig = SymmetricEigen::new(moment).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if !(hi > 0.0 && lo > CONDITION_FLOOR * hi) {
        return Err(Error::SingularProjection {
            element,
            detail: format!("moment matrix eigenvalues span [{lo:e}, {hi:e}]"),
        });
    }
    let moment_inv = moment.try_inverse().ok_or_else(|| Error::SingularProjection {
        element,
        detail: "moment matrix is not invertible".into(),
    })?;

    let mut coeffs = [Matrix3xX::zeros(cols), Matrix3xX::zeros(cols), Matrix3xX::zeros(cols)];
    for q in gps {
        let a = moment_inv * frame.monomials(&q.position) * q.volume();
        for (k, g) in coeffs.iter_mut().enumerate() {
            *g += &q.b * a[k];
        }
    }
    let mut p = StrainProjection {
        frame,
        moment,
        moment_inv,
        coeffs,
        b_tilde: Vec::new(),
    };
    p.b_tilde = gps.iter().map(|q| p.operator_at(&q.position)).collect();
    Ok(p)
}

impl StrainProjection {
    /// `B̃(x)`.
    pub fn operator_at(&self, x: &Point) -> Matrix3xX<f64> {
        let s = self.frame.monomials(x);
        &self.coeffs[0] * s[0] + &self.coeffs[1] * s[1] + &self.coeffs[2] * s[2]
    }

    pub fn moment_inverse(&self) -> &Matrix3<f64> {
        &self.moment_inv
    }

    /// `ε̃(x) = B̃(x) d` for the element's nodal displacements `d`.
    pub fn assumed_strain_at(&self, d: &DVector<f64>, x: &Point) -> Vector3<f64> {
        self.operator_at(x) * d
    }
}
