//! Instrumented linear and nonlinear conjugate gradient solvers.
//!
//! Both solvers record the energy of every iterate in a [`SolverTrace`] and
//! ask a [`Stopper`] after each iteration whether to stop. A stopper may
//! stop at an earlier iterate than the current one (lookahead criteria), so
//! the solvers keep a window of recent iterates.

mod cg;
mod ncg;

use std::collections::VecDeque;

use thiserror::Error;

use crate::energy::EnergyError;

pub use cg::{cg_run, pcg_transform_consistency, CgOptions, Preconditioner};
pub use ncg::{ncg_run, NcgOptions, Objective, QuadraticObjective};

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("loss of positive definiteness at iteration {iteration}: pᵀAp = {curvature}")]
    NotPositiveDefinite { iteration: usize, curvature: f64 },
    #[error("non-finite quantity at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("iteration cap {cap} reached without stopping (energy {energy:e}, gradient max-norm {grad_inf:e})")]
    IterationCap { cap: usize, energy: f64, grad_inf: f64 },
    #[error("line search failed at iteration {iteration}: energy {energy} did not decrease")]
    LineSearch { iteration: usize, energy: f64 },
    #[error("estimate needs energies up to index {needed}, trace ends at {available}")]
    TraceTooShort { needed: usize, available: usize },
    #[error("iterate {0} was not retained")]
    MissingIterate(usize),
    #[error("preconditioner entry {index} is {value}, expected a positive number")]
    BadPreconditioner { index: usize, value: f64 },
    #[error("vector has length {got}, system has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Everything the stopping criteria may look at.
#[derive(Clone, Debug, Default)]
pub struct SolverTrace {
    /// `E(u^0), E(u^1), …`.
    pub energies: Vec<f64>,
    /// `‖u^ℓ - u^{ℓ-1}‖_a²` for linear CG; entry 0 is a zero placeholder.
    /// Empty for nonlinear CG.
    pub update_norms_sq: Vec<f64>,
    /// Max-norm of the residual (linear) or energy gradient (nonlinear).
    pub grad_inf: Vec<f64>,
    /// Euclidean norm of the same vector.
    pub grad_norm: Vec<f64>,
    /// Dimension of the system.
    pub dim: usize,
    iterates: VecDeque<(usize, Vec<f64>)>,
}

impl SolverTrace {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    /// Index of the latest iterate.
    pub fn n(&self) -> usize {
        self.energies.len().saturating_sub(1)
    }

    pub fn energy(&self, k: usize) -> Option<f64> {
        self.energies.get(k).copied()
    }

    /// Iterate `k`, if it is still held in the window.
    pub fn iterate(&self, k: usize) -> Option<&[f64]> {
        self.iterates.iter().find(|(i, _)| *i == k).map(|(_, x)| x.as_slice())
    }

    pub fn retained(&self) -> impl Iterator<Item = usize> + '_ {
        self.iterates.iter().map(|(i, _)| *i)
    }

    pub(crate) fn record(&mut self, energy: f64, grad: &[f64], x: &[f64]) {
        self.energies.push(energy);
        self.grad_inf.push(grad.iter().fold(0.0, |m, g| m.max(g.abs())));
        self.grad_norm.push(crate::energy::dot(grad, grad).sqrt());
        let k = self.energies.len() - 1;
        self.iterates.push_back((k, x.to_vec()));
    }

    pub(crate) fn trim(&mut self, oldest: usize) {
        while self.iterates.len() > 1 && self.iterates.front().is_some_and(|(i, _)| *i < oldest) {
            self.iterates.pop_front();
        }
    }

    /// Takes iterate `k` out of the window.
    pub(crate) fn take(&mut self, k: usize) -> Result<Vec<f64>, SolverError> {
        let pos = self
            .iterates
            .iter()
            .position(|(i, _)| *i == k)
            .ok_or(SolverError::MissingIterate(k))?;
        Ok(self.iterates.remove(pos).expect("position is valid").1)
    }

    pub(crate) fn clear_iterates(&mut self) {
        self.iterates.clear();
    }
}

/// `ξ_n^d = 2 (E(u^n) - E(u^{n+d}))`, the Hestenes–Stiefel lower bound on
/// the squared energy-norm error of `u^n`.
pub fn hs_estimate(trace: &SolverTrace, n: usize, d: usize) -> Result<f64, SolverError> {
    let hi = n + d;
    match (trace.energy(n), trace.energy(hi)) {
        (Some(a), Some(b)) => Ok(2.0 * (a - b)),
        _ => Err(SolverError::TraceTooShort {
            needed: hi,
            available: trace.n(),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Continue,
    /// Stop and return iterate `n` (which may precede the latest one).
    Stop(usize),
}

/// Called by the solvers after every iteration, including iteration 0.
pub trait Stopper {
    fn decide(&mut self, trace: &SolverTrace) -> Decision;

    /// Oldest iterate index the stopper may still return; older iterates
    /// are dropped from the window.
    fn min_retained(&self, current: usize) -> usize {
        current
    }
}

/// Stops after a fixed number of iterations.
#[derive(Clone, Copy, Debug)]
pub struct FixedIterations(pub usize);

impl Stopper for FixedIterations {
    fn decide(&mut self, trace: &SolverTrace) -> Decision {
        if trace.n() >= self.0 {
            Decision::Stop(trace.n())
        } else {
            Decision::Continue
        }
    }
}

/// Stops once the residual norm has dropped by the factor `rtol` relative to
/// the initial one.
#[derive(Clone, Copy, Debug)]
pub struct RelativeResidual(pub f64);

impl Stopper for RelativeResidual {
    fn decide(&mut self, trace: &SolverTrace) -> Decision {
        let r0 = trace.grad_norm[0];
        let r = *trace.grad_norm.last().expect("trace is non-empty");
        if r <= self.0 * r0 {
            Decision::Stop(trace.n())
        } else {
            Decision::Continue
        }
    }
}

/// Max-norm of a vector.
pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
