use nalgebra::DMatrix;

use super::{ModelState, Problem};
use crate::error::{invalid, Result};
use crate::matrix::trace_quadratic_raw;

/// Individual terms of the training objective.
///
/// `label_smoothness` is `tr(Delta F^T F)` with unit weight, the weighting
/// under which the closed-form soft-label update is the exact minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObjectiveTerms {
    /// `||X - D S||_F^2`
    pub reconstruction: f64,
    /// `2 alpha ||S||_1`
    pub sparsity: f64,
    /// `delta tr(Delta S^T S)`
    pub code_smoothness: f64,
    /// `beta ||F - B S||_F^2` (or `beta ||E - B S_l||_F^2` for fixed labels)
    pub label_fit: f64,
    /// `beta ||F - O||_F^2`
    pub prior_fit: f64,
    /// `tr(Delta F^T F)`
    pub label_smoothness: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.reconstruction
            + self.sparsity
            + self.code_smoothness
            + self.label_fit
            + self.prior_fit
            + self.label_smoothness
    }
}

pub(crate) fn check_shapes(problem: &Problem<'_>, state: &ModelState) -> Result<()> {
    let dim = problem.features.dim();
    let n = problem.features.n_samples();
    let c = problem.prior.n_classes();
    let k = state.d.cols();
    let ok = state.d.rows() == dim
        && state.s.shape() == (k, n)
        && state.b.shape() == (c, k)
        && state.f.shape() == (c, n);
    if ok {
        Ok(())
    } else {
        Err(invalid(format!(
            "model shapes D {:?}, S {:?}, B {:?}, F {:?} do not fit data (dim {dim}, N {n}, C {c})",
            state.d.shape(),
            state.s.shape(),
            state.b.shape(),
            state.f.shape()
        )))
    }
}

fn common_terms(problem: &Problem<'_>, state: &ModelState) -> ObjectiveTerms {
    let hp = problem.params;
    let x = problem.features.as_dmatrix();
    let d = state.d.as_dmatrix();
    let s = state.s.as_dmatrix();
    let lap = problem.laplacian.as_dmatrix();
    ObjectiveTerms {
        reconstruction: (x - d * s).norm_squared(),
        sparsity: 2.0 * hp.alpha * s.lp_norm(1),
        code_smoothness: if hp.delta_w == 0.0 { 0.0 } else { hp.delta_w * trace_quadratic_raw(lap, s) },
        ..Default::default()
    }
}

/// Term-by-term value of the dynamic-label objective.
pub fn objective_terms(problem: &Problem<'_>, state: &ModelState) -> Result<ObjectiveTerms> {
    check_shapes(problem, state)?;
    let hp = problem.params;
    let s = state.s.as_dmatrix();
    let b = state.b.as_dmatrix();
    let f = state.f.as_dmatrix();
    let o = problem.prior.o().as_dmatrix();
    let lap = problem.laplacian.as_dmatrix();
    Ok(ObjectiveTerms {
        label_fit: hp.beta * (f - b * s).norm_squared(),
        prior_fit: hp.beta * (f - o).norm_squared(),
        label_smoothness: trace_quadratic_raw(lap, f),
        ..common_terms(problem, state)
    })
}

/// `||X - DS||^2 + 2 alpha ||S||_1 + delta tr(Delta S^T S)
///  + beta ||F - BS||^2 + beta ||F - O||^2 + tr(Delta F^T F)`
pub fn objective_value(problem: &Problem<'_>, state: &ModelState) -> Result<f64> {
    objective_terms(problem, state).map(|t| t.total())
}

/// One-hot targets of the labeled samples (`C x N_l`) and their indices.
pub(crate) fn labeled_targets(problem: &Problem<'_>) -> (DMatrix<f64>, Vec<usize>) {
    let idx = problem.prior.labeled_indices();
    let c = problem.prior.n_classes();
    let labels = problem.prior.labels();
    let e = DMatrix::from_fn(c, idx.len(), |r, j| if labels[idx[j]] == Some(r) { 1.0 } else { 0.0 });
    (e, idx)
}

pub(crate) fn select_columns(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), idx.len(), |r, j| m[(r, idx[j])])
}

/// Terms of the fixed-label objective
/// `||X - DS||^2 + 2 alpha ||S||_1 + beta ||E - B S_l||^2 + delta tr(Delta S^T S)`.
pub fn fixed_objective_terms(problem: &Problem<'_>, state: &ModelState) -> Result<ObjectiveTerms> {
    check_shapes(problem, state)?;
    let (e, idx) = labeled_targets(problem);
    let s_l = select_columns(state.s.as_dmatrix(), &idx);
    Ok(ObjectiveTerms {
        label_fit: problem.params.beta * (e - state.b.as_dmatrix() * s_l).norm_squared(),
        ..common_terms(problem, state)
    })
}

pub fn fixed_objective_value(problem: &Problem<'_>, state: &ModelState) -> Result<f64> {
    fixed_objective_terms(problem, state).map(|t| t.total())
}
