//! Integral-type nonlocal averaging over the quadrature-point cloud.
//!
//! For every point `i` the table stores its neighbours `j` with
//! `‖x_i - x_j‖ < R`, the coefficients `a_ij = α0(‖x_i - x_j‖) w_j|J_j|` and
//! their sum `a_i`. Averages are `ε̄_i = Σ_j a_ij ε_j / a_i`. Neighbours are
//! kept sorted by index and summed in that order.

use std::io::Write;

use rayon::prelude::*;

use crate::grid::PointGrid;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gauss,
    TruncatedQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Interaction radius; the search radius for both kinds.
    pub radius: f64,
    /// Internal length of the Gauss kernel.
    pub lc: f64,
}

impl KernelSpec {
    pub fn truncated(radius: f64) -> Result<Self> {
        Self::new(KernelKind::TruncatedQuadratic, radius, radius)
    }

    pub fn gauss(lc: f64, radius: f64) -> Result<Self> {
        Self::new(KernelKind::Gauss, radius, lc)
    }

    pub fn new(kind: KernelKind, radius: f64, lc: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("interaction radius must be positive (got {radius})")));
        }
        if kind == KernelKind::Gauss && !(lc > 0.0 && lc.is_finite()) {
            return Err(Error::Input(format!("internal length must be positive (got {lc})")));
        }
        Ok(KernelSpec { kind, radius, lc })
    }

    /// `α0(r)`; zero at and beyond `R` for both kinds.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        match self.kind {
            KernelKind::Gauss => (-r * r / (2.0 * self.lc * self.lc)).exp(),
            KernelKind::TruncatedQuadratic => {
                let t = 1.0 - r * r / (self.radius * self.radius);
                t * t
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalTable {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    coeffs: Vec<f64>,
    sums: Vec<f64>,
    rev_offsets: Vec<usize>,
    rev: Vec<usize>,
}

/// Builds the interaction table for points at `positions` carrying the
/// integration volumes `volumes`.
pub fn build_table(positions: &[Point], volumes: &[f64], spec: &KernelSpec) -> Result<NonlocalTable> {
    if positions.len() != volumes.len() {
        return Err(Error::Input(format!(
            "{} positions but {} volumes",
            positions.len(),
            volumes.len()
        )));
    }
    let n = positions.len();
    let r2 = spec.radius * spec.radius;
    let grid = PointGrid::new(positions, spec.radius);
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = positions[i];
            let mut row = Vec::new();
            grid.for_each_candidate(&p, spec.radius, |j| {
                let d = positions[j] - p;
                let d2 = d.x * d.x + d.y * d.y;
                if d2 < r2 {
                    row.push((j, spec.eval(d2.sqrt()) * volumes[j]));
                }
            });
            row.sort_unstable_by_key(|&(j, _)| j);
            row
        })
        .collect();
    Ok(NonlocalTable::from_rows(rows))
}

impl NonlocalTable {
    /// Table from explicit sorted rows of `(j, a_ij)`.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        let mut coeffs = Vec::new();
        let mut sums = Vec::with_capacity(n);
        let mut counts = vec![0usize; n];
        for row in &rows {
            let mut s = 0.0;
            for &(j, a) in row {
                neighbors.push(j);
                coeffs.push(a);
                s += a;
                counts[j] += 1;
            }
            assert!(s > 0.0, "every point must see itself");
            sums.push(s);
            offsets.push(neighbors.len());
        }
        let mut rev_offsets = Vec::with_capacity(n + 1);
        rev_offsets.push(0);
        for c in &counts {
            rev_offsets.push(rev_offsets.last().unwrap() + c);
        }
        let mut fill = rev_offsets[..n].to_vec();
        let mut rev = vec![0; neighbors.len()];
        for (i, row) in rows.iter().enumerate() {
            for &(j, _) in row {
                rev[fill[j]] = i;
                fill[j] += 1;
            }
        }
        NonlocalTable {
            offsets,
            neighbors,
            coeffs,
            sums,
            rev_offsets,
            rev,
        }
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn num_pairs(&self) -> usize {
        self.neighbors.len()
    }

    /// `(j, a_ij)` for all neighbours of `i`, ascending in `j`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[r.clone()].iter().copied().zip(self.coeffs[r].iter().copied())
    }

    /// `a_i`.
    pub fn sum(&self, i: usize) -> f64 {
        self.sums[i]
    }

    /// Points whose neighbourhood contains `j`.
    pub fn listed_by(&self, j: usize) -> &[usize] {
        &self.rev[self.rev_offsets[j]..self.rev_offsets[j + 1]]
    }

    /// `ε̄_i = Σ_j a_ij v_j / a_i` for every point.
    pub fn average(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.len() {
            return Err(Error::Input(format!(
                "{} values for a table over {} points",
                values.len(),
                self.len()
            )));
        }
        Ok((0..self.len())
            .into_par_iter()
            .map(|i| self.row(i).map(|(j, a)| a * values[j]).sum::<f64>() / self.sums[i])
            .collect())
    }

    /// Text dump: `i a_i n` followed by `n` lines `j a_ij`.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.len() {
            writeln!(out, "{i} {:?} {}", self.sums[i], self.offsets[i + 1] - self.offsets[i])?;
            for (j, a) in self.row(i) {
                writeln!(out, "{j} {a:?}")?;
            }
        }
        Ok(())
    }
}
