//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! The page works on 2-D point clouds: it can draw the kNN hyperedges around
//! a point, flip which points are labeled, and train with dynamic or fixed
//! labels to colour every point by its predicted class. The logic lives in
//! plain Rust functions so it is tested natively; the `#[wasm_bindgen]`
//! layer only converts errors.

use dldl::hypergraph::{build_knn_hypergraph, compute_laplacian};
use dldl::inference::{evaluate, predict_transductive};
use dldl::synthetic::{ring_clusters, ClusterSpec};
use dldl::{fit, fit_fixed_label, FeatureMatrix, HyperParams, Problem};
use wasm_bindgen::prelude::*;

/// A 2-D data set with partially revealed labels.
#[wasm_bindgen]
pub struct Playground {
    features: FeatureMatrix,
    truth: Vec<usize>,
    labels: Vec<Option<usize>>,
    n_classes: usize,
}

/// Result of one training run, for drawing.
#[wasm_bindgen]
pub struct TrainOutcome {
    decisions: Vec<u32>,
    loss: Vec<f64>,
    accuracy: f64,
}

#[wasm_bindgen]
impl TrainOutcome {
    /// Predicted class of every point (labeled ones included).
    #[wasm_bindgen(getter)]
    pub fn decisions(&self) -> Vec<u32> {
        self.decisions.clone()
    }

    /// Objective after each iteration.
    #[wasm_bindgen(getter)]
    pub fn loss(&self) -> Vec<f64> {
        self.loss.clone()
    }

    /// Accuracy on the unlabeled points.
    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }
}

/// Training knobs exposed by the page.
#[derive(Debug, Clone, Copy)]
pub struct TrainSettings {
    pub dict_size: usize,
    pub knn: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub max_iter: usize,
    pub fixed_labels: bool,
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

impl Playground {
    pub fn generate(
        n_classes: usize,
        per_class: usize,
        separation: f64,
        labeled_per_class: usize,
        seed: u32,
    ) -> dldl::Result<Self> {
        let spec = ClusterSpec { n_classes, per_class, dim: 2, separation, std_dev: 1.0, labeled_per_class };
        let data = ring_clusters(&spec, u64::from(seed))?;
        Ok(Self { features: data.features, truth: data.truth, labels: data.labels, n_classes })
    }

    /// Indices in the kNN hyperedge centred on `index`, centre first.
    pub fn hyperedge_members(&self, index: usize, knn: usize) -> dldl::Result<Vec<usize>> {
        if index >= self.truth.len() {
            return Err(dldl::DldlError::InvalidArgument(format!("no point {index}")));
        }
        let g = build_knn_hypergraph(&self.features, knn)?;
        let mut members = g.members(index);
        members.sort_by_key(|&m| m != index);
        Ok(members)
    }

    pub fn run(&self, s: TrainSettings) -> dldl::Result<TrainOutcome> {
        let prior = dldl::data::build_prior(&self.labels, self.n_classes)?;
        let hp = HyperParams {
            alpha: s.alpha,
            beta: s.beta,
            delta_w: s.delta,
            dict_size: s.dict_size,
            knn: s.knn,
            max_iter: s.max_iter,
            ..HyperParams::default()
        };
        let lap = compute_laplacian(&build_knn_hypergraph(&self.features, hp.knn)?)?;
        let problem = Problem::new(&self.features, &prior, &lap, &hp)?;
        let model = if s.fixed_labels { fit_fixed_label(&problem)? } else { fit(&problem)? };

        let all = predict_transductive(&model, false)?;
        let (mut hits, mut total) = (Vec::new(), Vec::new());
        for (&i, &d) in all.indices.iter().zip(&all.decisions) {
            if self.labels[i].is_none() {
                hits.push(d);
                total.push(self.truth[i]);
            }
        }
        let accuracy = if total.is_empty() { 1.0 } else { evaluate(&hits, &total)? };
        Ok(TrainOutcome {
            decisions: all.decisions.iter().map(|&d| d as u32).collect(),
            loss: model.loss_history,
            accuracy,
        })
    }
}

#[wasm_bindgen]
impl Playground {
    /// Points on a ring of Gaussian clusters, `labeled_per_class` of each
    /// class revealed.
    #[wasm_bindgen(constructor)]
    pub fn new(
        n_classes: usize,
        per_class: usize,
        separation: f64,
        labeled_per_class: usize,
        seed: u32,
    ) -> Result<Playground, JsError> {
        Self::generate(n_classes, per_class, separation, labeled_per_class, seed).map_err(js_err)
    }

    #[wasm_bindgen(getter)]
    pub fn count(&self) -> usize {
        self.truth.len()
    }

    #[wasm_bindgen(getter)]
    pub fn classes(&self) -> usize {
        self.n_classes
    }

    /// Interleaved `x0, y0, x1, y1, ...`.
    pub fn points(&self) -> Vec<f64> {
        self.features.as_dmatrix().iter().copied().collect()
    }

    pub fn truth(&self) -> Vec<u32> {
        self.truth.iter().map(|&c| c as u32).collect()
    }

    /// Revealed label per point, -1 when hidden.
    pub fn labels(&self) -> Vec<i32> {
        self.labels.iter().map(|l| l.map_or(-1, |c| c as i32)).collect()
    }

    /// Reveals or hides the true label of a point; returns the new state.
    pub fn toggle_label(&mut self, index: usize) -> i32 {
        let Some(slot) = self.labels.get_mut(index) else { return -1 };
        *slot = match slot {
            Some(_) => None,
            None => Some(self.truth[index]),
        };
        slot.map_or(-1, |c| c as i32)
    }

    pub fn hyperedge(&self, index: usize, knn: usize) -> Result<Vec<u32>, JsError> {
        let members = self.hyperedge_members(index, knn).map_err(js_err)?;
        Ok(members.into_iter().map(|m| m as u32).collect())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn train(
        &self,
        dict_size: usize,
        knn: usize,
        alpha: f64,
        beta: f64,
        delta: f64,
        max_iter: usize,
        fixed_labels: bool,
    ) -> Result<TrainOutcome, JsError> {
        let settings = TrainSettings { dict_size, knn, alpha, beta, delta, max_iter, fixed_labels };
        self.run(settings).map_err(js_err)
    }
}
