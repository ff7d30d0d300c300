//! Fixed-label variant: the soft labels are replaced by the one-hot labels
//! of the labeled subset, and the label-consistency term only sees those
//! samples.

use super::objective::{check_shapes, fixed_objective_value, labeled_targets, select_columns};
use super::state::{init_state, AtomKind, LabelMode, ModelState, SolverWarning};
use super::updates::{blockwise_columns, update_d, CodeSweep, ColumnStep};
use super::{run_outer_loop, Problem};
use crate::error::{invalid, Result};
use nalgebra::DMatrix;

/// Code sweep for the fixed-label objective: the classifier term applies to
/// labeled columns only, with their one-hot labels as targets.
pub fn update_s_fixed(problem: &Problem<'_>, state: &mut ModelState) -> Result<()> {
    check_shapes(problem, state)?;
    let hp = problem.params;
    let prior = problem.prior;
    let n = prior.n_samples();
    let c = prior.n_classes();
    let labels = prior.labels();
    let target = DMatrix::from_fn(c, n, |r, j| if labels[j] == Some(r) { 1.0 } else { 0.0 });
    let weight: Vec<f64> = labels.iter().map(|l| if l.is_some() { hp.beta } else { 0.0 }).collect();
    let sweep = CodeSweep::new(
        problem.features.as_dmatrix(),
        state.d.as_dmatrix(),
        state.b.as_dmatrix(),
        &target,
        weight,
        problem.laplacian.as_dmatrix(),
        hp.delta_w,
        hp.alpha,
    );
    for atom in sweep.sweep(state.s.as_dmatrix_mut()) {
        state.warn(SolverWarning::DegenerateCode { atom });
    }
    state.s.ensure_finite("update_s_fixed")
}

/// Blockwise classifier update against the one-hot labels of the labeled
/// samples and their codes.
pub fn update_b_fixed(problem: &Problem<'_>, state: &mut ModelState) -> Result<()> {
    let (e, idx) = labeled_targets(problem);
    let s_l = select_columns(state.s.as_dmatrix(), &idx);
    let steps = blockwise_columns(&e, &s_l, state.b.as_dmatrix_mut());
    for (atom, step) in steps {
        if step == ColumnStep::Dead {
            state.warn(SolverWarning::DeadAtom { kind: AtomKind::Classifier, atom });
        }
    }
    state.b.ensure_finite("update_b_fixed")
}

pub fn fit_fixed_label(problem: &Problem<'_>) -> Result<ModelState> {
    if problem.prior.n_labeled() == 0 {
        return Err(invalid("fixed-label training needs at least one labeled sample"));
    }
    let state = init_state(problem)?;
    fit_fixed_label_from(problem, state)
}

pub fn fit_fixed_label_from(problem: &Problem<'_>, mut state: ModelState) -> Result<ModelState> {
    if problem.prior.n_labeled() == 0 {
        return Err(invalid("fixed-label training needs at least one labeled sample"));
    }
    check_shapes(problem, &state)?;
    state.mode = LabelMode::Fixed;
    run_outer_loop(
        problem,
        &mut state,
        fixed_objective_value,
        |p, st| {
            update_s_fixed(p, st)?;
            update_d(p.features, st)?;
            update_b_fixed(p, st)
        },
        &mut |_, _| {},
    )?;
    Ok(state)
}
