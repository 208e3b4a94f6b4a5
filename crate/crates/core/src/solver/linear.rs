use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    /// General sparse LU; needed once the nonlocal block makes `K` unsymmetric.
    Lu,
    /// Sparse Cholesky for symmetric positive definite systems.
    Cholesky,
}

/// Solves the `n × n` system given by (possibly repeated) triplets.
pub fn solve_sparse(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64], kind: Factorization) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let trips: Vec<Triplet<usize, usize, f64>> = triplets.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| Error::SingularSystem(format!("could not assemble sparse matrix: {e:?}")))?;
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = match kind {
        Factorization::Lu => {
            let lu = a
                .sp_lu()
                .map_err(|e| Error::SingularSystem(format!("LU factorization failed: {e:?}")))?;
            lu.solve(&b)
        }
        Factorization::Cholesky => {
            let llt = a.sp_cholesky(Side::Lower).map_err(|e| {
                Error::SingularSystem(format!(
                    "Cholesky factorization failed ({e:?}); the constraints may not remove all rigid-body modes"
                ))
            })?;
            llt.solve(&b)
        }
    };
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem("solution contains non-finite values".into()));
    }
    Ok(out)
}

/// Fixes faer's internal threading for the rest of the process.
pub fn set_deterministic(on: bool) {
    faer::set_global_parallelism(if on { Par::Seq } else { Par::rayon(0) });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_unsymmetric_system() {
        // [[2, 1], [0, 3]] x = [3, 3]
        let t = [(0, 0, 1.0), (0, 0, 1.0), (0, 1, 1.0), (1, 1, 3.0)];
        let x = solve_sparse(2, &t, &[3.0, 3.0], Factorization::Lu).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_spd_rejected() {
        let t = [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)];
        assert!(solve_sparse(2, &t, &[1.0, 1.0], Factorization::Cholesky).is_err());
    }
}
