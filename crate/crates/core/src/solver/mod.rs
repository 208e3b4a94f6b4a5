//! Nonlocal damage solver: assembly of `f_int` and the consistent tangent,
//! displacement-controlled Newton steps with increment bisection, and
//! history commit.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rayon::prelude::*;

use crate::material::MaterialModel;
use crate::nonlocal::{build_table, KernelSpec, NonlocalTable};
use crate::{Error, Result};

mod discretization;
mod dofs;
mod linear;

pub use discretization::{Discretization, ElementData};
pub use dofs::{Constraint, DofMap};
pub use linear::{set_deterministic, solve_sparse, Factorization};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Convergence when `‖r‖ ≤ tol_rel · ‖r₀‖`, `r₀` being the residual with
    /// only the prescribed values advanced.
    pub tol_rel: f64,
    /// Or when `‖r‖ ≤ tol_abs · ‖f_int‖` (the current reaction scale).
    pub tol_abs: f64,
    pub max_iter: usize,
    pub bisection_depth: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tol_rel: 1e-4,
            tol_abs: 1e-10,
            max_iter: 25,
            bisection_depth: 4,
        }
    }
}

/// Extra displacement quantities recorded with every step.
#[derive(Debug, Clone, PartialEq)]
pub enum Monitor {
    Displacement { node: usize, component: usize },
    /// `u_b - u_a`, e.g. a crack mouth opening.
    Opening { a: usize, b: usize, component: usize },
}

impl Monitor {
    pub fn value(&self, d: &[f64]) -> f64 {
        match *self {
            Monitor::Displacement { node, component } => d[2 * node + component],
            Monitor::Opening { a, b, component } => d[2 * b + component] - d[2 * a + component],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub control: f64,
    pub reaction: f64,
    /// Linear solves used, at least 1.
    pub iterations: usize,
    pub max_omega: f64,
    pub monitors: Vec<f64>,
}

/// Converged state after the last committed step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub d: Vec<f64>,
    /// Committed history per quadrature point.
    pub kappa: Vec<f64>,
    pub eps_eq: Vec<f64>,
    pub eps_bar: Vec<f64>,
    pub omega: Vec<f64>,
    pub control: f64,
    pub records: Vec<StepRecord>,
}

/// Constitutive state of every quadrature point at one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub strain: Vec<Vector3<f64>>,
    pub eps_eq: Vec<f64>,
    /// `∂ε_eq/∂ε`.
    pub eta: Vec<Vector3<f64>>,
    pub eps_bar: Vec<f64>,
    /// Trial history `max(κ_committed, ε̄)`.
    pub kappa: Vec<f64>,
    pub loading: Vec<bool>,
    pub omega: Vec<f64>,
    pub domega: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub increments: Vec<f64>,
}

impl Schedule {
    pub fn uniform(steps: usize, increment: f64) -> Self {
        Schedule {
            increments: vec![increment; steps],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub control: f64,
    pub d: Vec<f64>,
    pub omega: Vec<f64>,
    pub eps_bar: Vec<f64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub state: SimState,
    pub snapshots: Vec<Snapshot>,
    /// Set when a step failed; `state` is then the last committed one.
    pub failure: Option<Error>,
}

pub struct Solver {
    pub disc: Discretization,
    pub model: MaterialModel,
    pub table: NonlocalTable,
    pub dofs: DofMap,
    /// Fixed external nodal forces.
    pub f_ext: Vec<f64>,
    pub settings: NewtonSettings,
    pub monitors: Vec<Monitor>,
    /// Quadrature points that never damage (e.g. under load plates).
    pub elastic_points: Vec<bool>,
    c: Matrix3<f64>,
}

impl Solver {
    pub fn new(disc: Discretization, model: MaterialModel, kernel: &KernelSpec, dofs: DofMap) -> Result<Self> {
        model.validate()?;
        if dofs.num_dofs() != disc.num_dofs() {
            return Err(Error::Input(format!(
                "dof map has {} dofs, mesh has {}",
                dofs.num_dofs(),
                disc.num_dofs()
            )));
        }
        let table = build_table(disc.gp_positions(), disc.gp_volumes(), kernel)?;
        let f_ext = vec![0.0; disc.num_dofs()];
        let n = disc.num_gps();
        Ok(Solver {
            c: model.elastic_matrix(),
            disc,
            model,
            table,
            dofs,
            f_ext,
            settings: NewtonSettings::default(),
            monitors: Vec::new(),
            elastic_points: vec![false; n],
        })
    }

    pub fn elastic_matrix(&self) -> &Matrix3<f64> {
        &self.c
    }

    pub fn initial_state(&self) -> SimState {
        let n = self.disc.num_gps();
        SimState {
            d: vec![0.0; self.disc.num_dofs()],
            kappa: vec![self.model.kappa0; n],
            eps_eq: vec![0.0; n],
            eps_bar: vec![0.0; n],
            omega: vec![0.0; n],
            control: 0.0,
            records: Vec::new(),
        }
    }

    /// Strains, nonlocal equivalent strains and trial damage at `d` given
    /// the committed history `kappa`.
    pub fn evaluate(&self, d: &[f64], kappa: &[f64]) -> Evaluation {
        let strain = self.disc.strains(d);
        let (eps_eq, eta): (Vec<f64>, Vec<Vector3<f64>>) =
            strain.par_iter().map(|e| self.model.equivalent_strain(e)).unzip();
        let eps_bar = self.table.average(&eps_eq).expect("table covers every point");
        let n = strain.len();
        let mut ev = Evaluation {
            strain,
            eps_eq,
            eta,
            eps_bar,
            kappa: vec![0.0; n],
            loading: vec![false; n],
            omega: vec![0.0; n],
            domega: vec![0.0; n],
        };
        for g in 0..n {
            if self.elastic_points.get(g).copied().unwrap_or(false) {
                ev.kappa[g] = kappa[g];
                continue;
            }
            let h = crate::material::update_history(
                crate::material::PointHistory {
                    kappa: kappa[g],
                    loading: false,
                },
                ev.eps_bar[g],
            );
            ev.kappa[g] = h.kappa;
            ev.loading[g] = h.loading;
            ev.omega[g] = self.model.damage(h.kappa);
            ev.domega[g] = self.model.damage_derivative(h.kappa);
        }
        ev
    }

    /// `f_int = Σ (1 - ω) B̃ᵀ C ε̃ w|J| t` over all dofs.
    pub fn internal_force(&self, ev: &Evaluation) -> Vec<f64> {
        let t = self.disc.thickness();
        let vol = self.disc.gp_volumes();
        let per: Vec<DVector<f64>> = self
            .disc
            .elements()
            .par_iter()
            .map(|el| {
                let mut fe = DVector::zeros(el.dofs.len());
                for g in el.gps() {
                    let s = self.c * ev.strain[g] * ((1.0 - ev.omega[g]) * vol[g] * t);
                    fe.gemv_tr(1.0, self.disc.b_tilde(g), &s, 1.0);
                }
                fe
            })
            .collect();
        let mut f = vec![0.0; self.disc.num_dofs()];
        for (el, fe) in self.disc.elements().iter().zip(&per) {
            for (a, &i) in el.dofs.iter().enumerate() {
                f[i] += fe[a];
            }
        }
        f
    }

    /// Consistent tangent `K_l - K_n` as triplets over all dofs.
    ///
    /// For a loading point `i` in element `o` and neighbours `j` in element
    /// `q`, the nonlocal block is
    /// `ω'_i w_i|J_i| t / a_i · (B̃_iᵀ C ε̃_i) (Σ_{j ∈ q} a_ij η_jᵀ B̃_j)`.
    pub fn tangent_triplets(&self, ev: &Evaluation) -> Vec<(usize, usize, f64)> {
        let t = self.disc.thickness();
        let vol = self.disc.gp_volumes();
        let active = |g: usize| ev.loading[g] && ev.domega[g] > 0.0;
        // B̃_jᵀ η_j for every point some active point listens to
        let needed: Vec<bool> = (0..self.disc.num_gps())
            .map(|j| self.table.listed_by(j).iter().any(|&i| active(i)))
            .collect();
        let u: Vec<Option<DVector<f64>>> = (0..self.disc.num_gps())
            .into_par_iter()
            .map(|j| needed[j].then(|| self.disc.b_tilde(j).transpose() * ev.eta[j]))
            .collect();

        let blocks: Vec<Vec<(usize, DMatrix<f64>)>> = (0..self.disc.elements().len())
            .into_par_iter()
            .map(|o| {
                let el = &self.disc.elements()[o];
                let kl = self.disc.element_stiffness(o, &self.c, |g| 1.0 - ev.omega[g]);
                let mut out = vec![(o, kl)];
                let mut slot: HashMap<usize, usize> = HashMap::new();
                slot.insert(o, 0);
                for i in el.gps().filter(|&i| active(i)) {
                    let ci = ev.domega[i] * vol[i] * t / self.table.sum(i);
                    let gi = self.disc.b_tilde(i).transpose() * (self.c * ev.strain[i]);
                    let mut h: Vec<(usize, DVector<f64>)> = Vec::new();
                    let mut hslot: HashMap<usize, usize> = HashMap::new();
                    for (j, a) in self.table.row(i) {
                        let q = self.disc.gp_element(j);
                        let uj = u[j].as_ref().expect("needed");
                        let k = *hslot.entry(q).or_insert_with(|| {
                            h.push((q, DVector::zeros(uj.len())));
                            h.len() - 1
                        });
                        h[k].1.axpy(a, uj, 1.0);
                    }
                    for (q, hq) in h {
                        let k = *slot.entry(q).or_insert_with(|| {
                            let nq = self.disc.elements()[q].dofs.len();
                            out.push((q, DMatrix::zeros(el.dofs.len(), nq)));
                            out.len() - 1
                        });
                        out[k].1.ger(-ci, &gi, &hq, 1.0);
                    }
                }
                out
            })
            .collect();

        let mut trips = Vec::new();
        for (o, list) in blocks.iter().enumerate() {
            let rows = &self.disc.elements()[o].dofs;
            for (q, k) in list {
                let cols = &self.disc.elements()[*q].dofs;
                for (a, &r) in rows.iter().enumerate() {
                    for (b, &c) in cols.iter().enumerate() {
                        trips.push((r, c, k[(a, b)]));
                    }
                }
            }
        }
        trips
    }

    /// Advances the control by `increment`, bisecting on failure.
    pub fn solve_step(&self, state: &SimState, increment: f64) -> Result<SimState> {
        self.advance(state, increment, 0)
    }

    fn advance(&self, state: &SimState, increment: f64, depth: usize) -> Result<SimState> {
        match self.attempt(state, increment) {
            Ok(s) => Ok(s),
            Err(_) if depth < self.settings.bisection_depth => {
                let half = self.advance(state, 0.5 * increment, depth + 1)?;
                self.advance(&half, 0.5 * increment, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    fn attempt(&self, state: &SimState, increment: f64) -> Result<SimState> {
        let control = state.control + increment;
        let mut d = state.d.clone();
        self.dofs.prescribe(&mut d, control);
        let free = self.dofs.free();
        let mut first = None;
        let mut solves = 0;
        if increment != 0.0 {
            // tangent predictor about the committed state; starting Newton from
            // the boundary jump alone concentrates strain next to driven nodes
            let ev = self.evaluate(&d, &state.kappa);
            let r: Vec<f64> = self.internal_force(&ev).iter().zip(&self.f_ext).map(|(a, b)| a - b).collect();
            first = Some(self.dofs.free_norm(&r));
            let ev0 = self.evaluate(&state.d, &state.kappa);
            let mut rhs: Vec<f64> = self.internal_force(&ev0).iter().zip(&self.f_ext).map(|(a, b)| b - a).collect();
            let mut trips = Vec::new();
            for (i, j, v) in self.tangent_triplets(&ev0) {
                match (self.dofs.free_index(i), self.dofs.free_index(j)) {
                    (Some(a), Some(b)) => trips.push((a, b, v)),
                    (Some(_), None) => rhs[i] -= v * (d[j] - state.d[j]),
                    _ => {}
                }
            }
            let rhs: Vec<f64> = free.iter().map(|&i| rhs[i]).collect();
            let delta = solve_sparse(free.len(), &trips, &rhs, Factorization::Lu)
                .map_err(|e| Error::Convergence { control, detail: e.to_string() })?;
            for (k, &i) in free.iter().enumerate() {
                d[i] = state.d[i] + delta[k];
            }
            solves = 1;
        }
        loop {
            let ev = self.evaluate(&d, &state.kappa);
            let f = self.internal_force(&ev);
            let r: Vec<f64> = f.iter().zip(&self.f_ext).map(|(a, b)| a - b).collect();
            let norm = self.dofs.free_norm(&r);
            if !norm.is_finite() {
                return Err(Error::Convergence {
                    control,
                    detail: "residual is not finite".into(),
                });
            }
            let scale = f.iter().map(|v| v * v).sum::<f64>().sqrt().max(
                self.f_ext.iter().map(|v| v * v).sum::<f64>().sqrt(),
            );
            let r1 = *first.get_or_insert(norm);
            if (solves > 0 && norm <= self.settings.tol_rel * r1) || norm <= self.settings.tol_abs * scale {
                let max_omega = ev.omega.iter().copied().fold(0.0, f64::max);
                let mut records = state.records.clone();
                records.push(StepRecord {
                    step: records.len() + 1,
                    control,
                    reaction: self.dofs.reaction(&r),
                    iterations: solves.max(1),
                    max_omega,
                    monitors: self.monitors.iter().map(|m| m.value(&d)).collect(),
                });
                return Ok(SimState {
                    d,
                    kappa: ev.kappa,
                    eps_eq: ev.eps_eq,
                    eps_bar: ev.eps_bar,
                    omega: ev.omega,
                    control,
                    records,
                });
            }
            if solves >= self.settings.max_iter {
                return Err(Error::Convergence {
                    control,
                    detail: format!(
                        "no convergence after {solves} iterations (residual {norm:e}, first {r1:e})"
                    ),
                });
            }
            let trips: Vec<(usize, usize, f64)> = self
                .tangent_triplets(&ev)
                .into_iter()
                .filter_map(|(i, j, v)| Some((self.dofs.free_index(i)?, self.dofs.free_index(j)?, v)))
                .collect();
            let rhs: Vec<f64> = free.iter().map(|&i| -r[i]).collect();
            let delta = solve_sparse(free.len(), &trips, &rhs, Factorization::Lu)
                .map_err(|e| Error::Convergence { control, detail: e.to_string() })?;
            for (k, &i) in free.iter().enumerate() {
                d[i] += delta[k];
            }
            solves += 1;
        }
    }

    /// Runs the whole schedule; a failing step ends the run with the last
    /// committed state kept.
    pub fn run(&self, schedule: &Schedule, snapshot_every: usize) -> RunOutcome {
        let mut state = self.initial_state();
        let mut snapshots = Vec::new();
        let snap = |s: &SimState| Snapshot {
            step: s.records.len(),
            control: s.control,
            d: s.d.clone(),
            omega: s.omega.clone(),
            eps_bar: s.eps_bar.clone(),
        };
        for (k, &inc) in schedule.increments.iter().enumerate() {
            match self.solve_step(&state, inc) {
                Ok(next) => state = next,
                Err(e) => {
                    if snapshot_every > 0 {
                        snapshots.push(snap(&state));
                    }
                    return RunOutcome {
                        state,
                        snapshots,
                        failure: Some(e),
                    };
                }
            }
            let last = k + 1 == schedule.increments.len();
            if snapshot_every > 0 && ((k + 1) % snapshot_every == 0 || last) {
                snapshots.push(snap(&state));
            }
        }
        RunOutcome {
            state,
            snapshots,
            failure: None,
        }
    }
}
