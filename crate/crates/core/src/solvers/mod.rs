//! Solution paths: quasi-static Newton (energetic or incremental
//! dissipative), Lagrangian dynamics and constrained Hamiltonian dynamics.

pub mod audit;
mod dynamic;
pub mod newton;
mod quasistatic;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use audit::{energy_audit, EnergyReport};
pub use dynamic::{solve_dynamic_hamiltonian, solve_dynamic_lagrangian, DofRole};
pub use quasistatic::solve_quasistatic;

use crate::error::{Error, Result};
use crate::femcore::{FieldState, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Midpoint,
    BackwardEuler,
}

impl Integrator {
    /// Fraction of the step at which forces are evaluated.
    pub fn theta(self) -> f64 {
        match self {
            Integrator::Midpoint => 0.5,
            Integrator::BackwardEuler => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Dirichlet,
    HamiltonPrinciple,
    HamiltonEquations,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Defaults to midpoint for energetic and backward Euler for
    /// dissipative runs.
    #[serde(default)]
    pub integrator: Option<Integrator>,
    #[serde(default = "default_formulation")]
    pub formulation: Formulation,
    #[serde(default)]
    pub dissipative: bool,
}

fn default_tol() -> f64 {
    1e-9
}

fn default_max_iter() -> usize {
    25
}

fn default_formulation() -> Formulation {
    Formulation::Dirichlet
}

impl SolverConfig {
    pub fn new(formulation: Formulation, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            newton_tol: default_tol(),
            max_iter: default_max_iter(),
            dt,
            t_end,
            integrator: None,
            formulation,
            dissipative: false,
        }
    }

    pub fn integrator(&self) -> Integrator {
        self.integrator.unwrap_or(if self.dissipative { Integrator::BackwardEuler } else { Integrator::Midpoint })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput("solver dt must be positive".into()));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidInput("solver newton_tol must be positive".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput("solver t_end must be non-negative".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("solver max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        let n = self.t_end / self.dt;
        (n - 1e-9 * n.max(1.0)).ceil().max(0.0) as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        (step as f64 * self.dt).min(self.t_end)
    }
}

/// A discretized problem together with its initial state. Initial rates,
/// when present, seed the dynamic solvers.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: Model,
    pub initial: FieldState,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    /// Cumulative dissipated energy.
    pub dissipated: f64,
    /// Cumulative work of time-dependent loads.
    pub external_work: f64,
    /// Max-norm of the potential rate `D_t y`.
    pub potential_rate: f64,
    /// Max-norm of the placement rate on free-space nodes.
    pub free_space_rate: f64,
    /// Max-norm of momenta conjugate to algebraic dofs.
    pub constraint_residual: f64,
    pub newton_iterations: usize,
    pub residual_norm: f64,
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub state: FieldState,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub frames: Vec<Frame>,
}

impl Trajectory {
    pub fn last(&self) -> &Frame {
        self.frames.last().expect("trajectory has at least the initial frame")
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.state.time).collect()
    }
}

pub fn solve(scenario: &Scenario, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    match cfg.formulation {
        Formulation::Dirichlet => solve_quasistatic(scenario, cfg),
        Formulation::HamiltonPrinciple => solve_dynamic_lagrangian(scenario, cfg),
        Formulation::HamiltonEquations => solve_dynamic_hamiltonian(scenario, cfg),
    }
}

/// `x^T A x`
pub(crate) fn quad_form(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(a * x))
}

/// Largest nodal distance between two states over all fields.
pub fn max_nodal_deviation(a: &FieldState, b: &FieldState) -> f64 {
    let fa = &a.fields;
    let fb = &b.fields;
    let mut m = 0.0_f64;
    for n in 0..fa.potential.len() {
        m = m.max((fa.potential[n] - fb.potential[n]).abs());
        m = m.max((fa.placement[n] - fb.placement[n]).max_abs());
        m = m.max((fa.order[n].trans - fb.order[n].trans).max_abs());
        m = m.max((fa.order[n].cis - fb.order[n].cis).max_abs());
    }
    m
}
