//! Alternating minimisation of the dynamic-label dictionary-learning
//! objective, plus the fixed-label variant used for ablations.
//!
//! One outer iteration runs, in order: a Gauss-Seidel sweep over the codes
//! `S`, a blockwise pass over the dictionary `D`, a blockwise pass over the
//! classifier `B`, and the closed-form soft-label solve for `F`. Every step
//! is an exact (or guarded) block minimiser, so the objective never rises.

mod fixed;
mod objective;
mod params;
mod prior;
mod state;
mod updates;

pub use fixed::{fit_fixed_label, fit_fixed_label_from, update_b_fixed, update_s_fixed};
pub use objective::{
    fixed_objective_terms, fixed_objective_value, objective_terms, objective_value, ObjectiveTerms,
};
pub use params::HyperParams;
pub use prior::{LabelPrior, UNLABELED_PRIOR};
pub use state::{init_state, AtomKind, LabelMode, ModelState, SolverWarning};
pub use updates::{update_b, update_d, update_f, update_s, update_s_entry};

use crate::error::{invalid, DldlError, Result};
use crate::hypergraph::Laplacian;
use crate::matrix::FeatureMatrix;

/// Slack allowed for rounding when checking that the objective did not rise.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// Training data, label prior, Laplacian and hyperparameters, checked for
/// mutual consistency.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub features: &'a FeatureMatrix,
    pub prior: &'a LabelPrior,
    pub laplacian: &'a Laplacian,
    pub params: &'a HyperParams,
}

impl<'a> Problem<'a> {
    pub fn new(
        features: &'a FeatureMatrix,
        prior: &'a LabelPrior,
        laplacian: &'a Laplacian,
        params: &'a HyperParams,
    ) -> Result<Self> {
        params.validate()?;
        let n = features.n_samples();
        if prior.n_samples() != n {
            return Err(invalid(format!("prior covers {} samples, features have {n}", prior.n_samples())));
        }
        if laplacian.size() != n {
            return Err(invalid(format!("Laplacian is {0}x{0}, features have {n} samples", laplacian.size())));
        }
        Ok(Self { features, prior, laplacian, params })
    }
}

/// True when `current` exceeds `previous` by more than the rounding slack.
pub fn rose(previous: f64, current: f64) -> bool {
    current > previous + MONOTONE_SLACK * (1.0 + previous.abs())
}

/// Relative decrease `(prev - cur) / max(prev, 1e-12)`.
fn relative_decrease(previous: f64, current: f64) -> f64 {
    (previous - current) / previous.max(1e-12)
}

/// Shared outer loop: applies `step` until the relative decrease drops
/// below `rel_tol` or `max_iter` iterations have run.
pub(crate) fn run_outer_loop(
    problem: &Problem<'_>,
    state: &mut ModelState,
    objective: impl Fn(&Problem<'_>, &ModelState) -> Result<f64>,
    mut step: impl FnMut(&Problem<'_>, &mut ModelState) -> Result<()>,
    observer: &mut dyn FnMut(usize, f64),
) -> Result<()> {
    let hp = problem.params;
    let mut previous = objective(problem, state)?;
    state.initial_loss = Some(previous);
    state.loss_history.clear();
    for iteration in 1..=hp.max_iter {
        step(problem, state)?;
        let current = objective(problem, state)?;
        if rose(previous, current) {
            return Err(DldlError::ObjectiveIncrease {
                stage: "outer iteration",
                iteration,
                previous,
                current,
            });
        }
        state.loss_history.push(current);
        observer(iteration, current);
        log::debug!("iteration {iteration}: objective {current:.12e}");
        if relative_decrease(previous, current) < hp.rel_tol {
            break;
        }
        previous = current;
    }
    Ok(())
}

/// Initialises with [`init_state`] and runs the alternating solver.
pub fn fit(problem: &Problem<'_>) -> Result<ModelState> {
    fit_observed(problem, |_, _| {})
}

/// Like [`fit`], calling `observer(iteration, objective)` after every
/// completed outer iteration.
pub fn fit_observed(problem: &Problem<'_>, mut observer: impl FnMut(usize, f64)) -> Result<ModelState> {
    let state = init_state(problem)?;
    fit_from_observed(problem, state, &mut observer)
}

/// Runs the alternating solver from a caller-supplied starting point.
pub fn fit_from(problem: &Problem<'_>, state: ModelState) -> Result<ModelState> {
    fit_from_observed(problem, state, &mut |_, _| {})
}

fn fit_from_observed(
    problem: &Problem<'_>,
    mut state: ModelState,
    observer: &mut dyn FnMut(usize, f64),
) -> Result<ModelState> {
    objective::check_shapes(problem, &state)?;
    state.mode = LabelMode::Dynamic;
    run_outer_loop(
        problem,
        &mut state,
        objective_value,
        |p, st| {
            update_s(p, st)?;
            update_d(p.features, st)?;
            update_b(st)?;
            update_f(p, st)
        },
        observer,
    )?;
    Ok(state)
}
