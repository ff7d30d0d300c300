//! Classification with a trained model.
//!
//! Unseen samples are lasso-encoded against the learned dictionary and
//! classified by `argmax(B s)`. Training samples are classified
//! transductively by `argmax` over their soft labels. Ties always go to the
//! smallest class index.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::matrix::{shrink, FeatureMatrix, Matrix};
use crate::solver::{LabelMode, ModelState};

/// Test-time encoding stops once no code moves by more than this fraction
/// of the largest code.
pub const ENCODE_REL_TOL: f64 = 1e-8;
pub const ENCODE_MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    /// Sample index each decision refers to.
    pub indices: Vec<usize>,
    pub decisions: Vec<usize>,
    /// Classifier responses, `C x M`.
    pub scores: DMatrix<f64>,
    /// Fraction correct, when ground truth was supplied.
    pub accuracy: Option<f64>,
    pub warning: Option<String>,
}

impl PredictionReport {
    fn from_scores(indices: Vec<usize>, scores: DMatrix<f64>) -> Self {
        let decisions = (0..scores.ncols()).map(|m| argmax(scores.column(m).iter().copied())).collect();
        Self {
            indices,
            decisions,
            scores,
            accuracy: None,
            warning: None,
        }
    }

    /// Scores the decisions against `truth[indices[m]]`.
    pub fn with_truth(mut self, truth: &[usize]) -> Result<Self> {
        let expected: Vec<usize> = self
            .indices
            .iter()
            .map(|&i| truth.get(i).copied().ok_or_else(|| invalid(format!("no ground truth for sample {i}"))))
            .collect::<Result<_>>()?;
        self.accuracy = Some(evaluate(&self.decisions, &expected)?);
        Ok(self)
    }
}

/// Index of the largest value, first one on ties; 0 for an empty input.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// `argmin_s ||y - D s||^2 + 2 alpha ||s||_1` by cyclic coordinate descent.
pub fn encode_with_dictionary(d: &Matrix, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    if y.len() != d.rows() {
        return Err(invalid(format!("sample has dimension {}, dictionary expects {}", y.len(), d.rows())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sample contains non-finite values"));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    let d = d.as_dmatrix();
    let k = d.ncols();
    let gram = d.transpose() * d;
    let p = d.transpose() * y;
    let mut s = DVector::zeros(k);
    for _ in 0..ENCODE_MAX_SWEEPS {
        // objective decrease flattens quadratically near the optimum, so the
        // sweep stops on the size of the step instead
        let mut moved: f64 = 0.0;
        for i in 0..k {
            let a = gram[(i, i)];
            let next = if a > 0.0 {
                let j = p[i] - gram.column(i).dot(&s) + a * s[i];
                shrink(j, alpha) / a
            } else {
                0.0
            };
            moved = moved.max((next - s[i]).abs());
            s[i] = next;
        }
        if moved <= ENCODE_REL_TOL * s.amax().max(1e-12) {
            break;
        }
    }
    Ok(s)
}

pub fn encode(model: &ModelState, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    encode_with_dictionary(&model.d, y, alpha)
}

/// Encode-then-classify for every column of `features`.
pub fn predict_inductive(model: &ModelState, features: &FeatureMatrix, alpha: f64) -> Result<PredictionReport> {
    if features.dim() != model.dim() {
        return Err(invalid(format!(
            "features have dimension {}, model expects {}",
            features.dim(),
            model.dim()
        )));
    }
    let m = features.n_samples();
    let mut codes = DMatrix::zeros(model.dict_size(), m);
    for i in 0..m {
        codes.set_column(i, &encode(model, &features.sample(i), alpha)?);
    }
    let scores = model.b.as_dmatrix() * codes;
    let mut report = PredictionReport::from_scores((0..m).collect(), scores);
    if model.b.max_abs() == 0.0 {
        let msg = "classifier is all zero; every decision defaults to class 0".to_string();
        log::warn!("{msg}");
        report.warning = Some(msg);
    }
    Ok(report)
}

/// Classifies the training samples stored in the model. Dynamic models use
/// `argmax F`; fixed-label models (which have no soft labels) use
/// `argmax B S`. With `unlabeled_only`, labeled training samples are left out.
pub fn predict_transductive(model: &ModelState, unlabeled_only: bool) -> Result<PredictionReport> {
    let n = model.n_samples();
    if model.labels.len() != n {
        return Err(invalid(format!("model stores {} labels for {n} samples", model.labels.len())));
    }
    let indices: Vec<usize> = (0..n).filter(|&i| !unlabeled_only || model.labels[i].is_none()).collect();
    let source = match model.mode {
        LabelMode::Dynamic => model.f.as_dmatrix().clone(),
        LabelMode::Fixed => model.b.as_dmatrix() * model.s.as_dmatrix(),
    };
    let scores = DMatrix::from_fn(source.nrows(), indices.len(), |c, j| source[(c, indices[j])]);
    Ok(PredictionReport::from_scores(indices, scores))
}

/// Fraction of positions where `decisions` and `truth` agree.
pub fn evaluate(decisions: &[usize], truth: &[usize]) -> Result<f64> {
    if decisions.len() != truth.len() {
        return Err(invalid(format!(
            "{} decisions but {} ground-truth labels",
            decisions.len(),
            truth.len()
        )));
    }
    if decisions.is_empty() {
        return Err(invalid("cannot evaluate an empty prediction set"));
    }
    let correct = decisions.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / decisions.len() as f64)
}
