//! Uniform bucket grid for fixed-radius queries over 2D point clouds.

use crate::Point;

/// Cap on buckets per axis so a tiny radius on a large domain stays bounded.
const MAX_CELLS_PER_AXIS: usize = 4096;

#[derive(Debug, Clone)]
pub struct PointGrid {
    origin: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl PointGrid {
    /// Buckets `points` into square cells of side at least `cell`.
    pub fn new(points: &[Point], cell: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let mut cell = if cell.is_finite() && cell > 0.0 { cell } else { extent.max(1.0) };
        cell = cell.max(extent / MAX_CELLS_PER_AXIS as f64).max(f64::MIN_POSITIVE);
        let dims = [
            ((hi[0] - lo[0]) / cell).floor() as usize + 1,
            ((hi[1] - lo[1]) / cell).floor() as usize + 1,
        ];

        let mut counts = vec![0usize; dims[0] * dims[1] + 1];
        let keys: Vec<usize> = points
            .iter()
            .map(|p| Self::key_of(lo, cell, dims, p))
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; points.len()];
        for (idx, &k) in keys.iter().enumerate() {
            items[fill[k]] = idx;
            fill[k] += 1;
        }
        PointGrid {
            origin: lo,
            cell,
            dims,
            starts,
            items,
        }
    }

    fn key_of(origin: [f64; 2], cell: f64, dims: [usize; 2], p: &Point) -> usize {
        let i = (((p.x - origin[0]) / cell).floor().max(0.0) as usize).min(dims[0] - 1);
        let j = (((p.y - origin[1]) / cell).floor().max(0.0) as usize).min(dims[1] - 1);
        j * dims[0] + i
    }

    /// Calls `f` for every stored index whose bucket intersects the square of
    /// half-width `radius` around `p`. Callers apply the exact distance test.
    pub fn for_each_candidate(&self, p: &Point, radius: f64, mut f: impl FnMut(usize)) {
        let lo_i = ((p.x - radius - self.origin[0]) / self.cell).floor();
        let hi_i = ((p.x + radius - self.origin[0]) / self.cell).floor();
        let lo_j = ((p.y - radius - self.origin[1]) / self.cell).floor();
        let hi_j = ((p.y + radius - self.origin[1]) / self.cell).floor();
        if hi_i < 0.0 || hi_j < 0.0 {
            return;
        }
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        if lo_i > (self.dims[0] - 1) as f64 || lo_j > (self.dims[1] - 1) as f64 {
            return;
        }
        let (i0, i1) = (clamp(lo_i, self.dims[0]), clamp(hi_i, self.dims[0]));
        let (j0, j1) = (clamp(lo_j, self.dims[1]), clamp(hi_j, self.dims[1]));
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * self.dims[0] + i;
                for &idx in &self.items[self.starts[k]..self.starts[k + 1]] {
                    f(idx);
                }
            }
        }
    }
}
