use std::collections::BTreeMap;

use crate::{Error, Result};

/// A prescribed dof: `u = value + drive · control`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub dof: usize,
    pub value: f64,
    pub drive: f64,
}

impl Constraint {
    /// `component` is 0 for x, 1 for y.
    pub fn fixed(node: usize, component: usize, value: f64) -> Self {
        Constraint {
            dof: 2 * node + component,
            value,
            drive: 0.0,
        }
    }

    pub fn driven(node: usize, component: usize, scale: f64) -> Self {
        Constraint {
            dof: 2 * node + component,
            value: 0.0,
            drive: scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    num_dofs: usize,
    constraints: Vec<Constraint>,
    free: Vec<usize>,
    free_index: Vec<usize>,
}

impl DofMap {
    /// Identical duplicates are merged; conflicting ones are an error.
    pub fn new(num_dofs: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let mut by_dof: BTreeMap<usize, Constraint> = BTreeMap::new();
        for c in constraints {
            if c.dof >= num_dofs {
                return Err(Error::Input(format!("constraint on dof {} but only {num_dofs} dofs", c.dof)));
            }
            if !(c.value.is_finite() && c.drive.is_finite()) {
                return Err(Error::Input(format!("constraint on dof {} is not finite", c.dof)));
            }
            if let Some(prev) = by_dof.insert(c.dof, c) {
                if prev != c {
                    return Err(Error::Input(format!(
                        "conflicting constraints on dof {} (node {}, component {})",
                        c.dof,
                        c.dof / 2,
                        c.dof % 2
                    )));
                }
            }
        }
        let mut free_index = vec![usize::MAX; num_dofs];
        let mut free = Vec::new();
        for (i, slot) in free_index.iter_mut().enumerate() {
            if !by_dof.contains_key(&i) {
                *slot = free.len();
                free.push(i);
            }
        }
        Ok(DofMap {
            num_dofs,
            constraints: by_dof.into_values().collect(),
            free,
            free_index,
        })
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Sorted by dof.
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        let i = self.free_index[dof];
        (i != usize::MAX).then_some(i)
    }

    pub fn is_driven(&self) -> bool {
        self.constraints.iter().any(|c| c.drive != 0.0)
    }

    /// Writes prescribed values for `control` into `d`.
    pub fn prescribe(&self, d: &mut [f64], control: f64) {
        for c in &self.constraints {
            d[c.dof] = c.value + c.drive * control;
        }
    }

    /// `Σ drive · r` over driven dofs: the force conjugate to the control.
    pub fn reaction(&self, residual: &[f64]) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.drive != 0.0)
            .map(|c| c.drive * residual[c.dof])
            .sum()
    }

    pub fn free_norm(&self, v: &[f64]) -> f64 {
        self.free.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
    }
}
