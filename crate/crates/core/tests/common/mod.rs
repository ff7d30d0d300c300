//! Shared builders for the integration tests.
#![allow(dead_code)]

use dldl::hypergraph::{build_knn_hypergraph, compute_laplacian};
use dldl::solver::init_state;
use dldl::{FeatureMatrix, HyperParams, LabelPrior, Laplacian, Matrix, ModelState, Problem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WEIGHTS: [f64; 3] = [0.0, 0.0625, 1.0];

/// A small owned problem with a non-trivial state to start updates from.
pub struct Instance {
    pub features: FeatureMatrix,
    pub prior: LabelPrior,
    pub laplacian: Laplacian,
    pub params: HyperParams,
    pub state: ModelState,
}

impl Instance {
    pub fn problem(&self) -> Problem<'_> {
        Problem::new(&self.features, &self.prior, &self.laplacian, &self.params).unwrap()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Scales every column with norm above one back onto the unit sphere.
pub fn into_ball(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        if n > 1.0 {
            c /= n;
        }
    }
    m
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, c: usize) -> Vec<Option<usize>> {
    let mut labels: Vec<Option<usize>> =
        (0..n).map(|_| rng.random_bool(0.4).then(|| rng.random_range(0..c))).collect();
    if labels.iter().all(Option::is_none) {
        labels[0] = Some(0);
    }
    labels
}

/// Random instance within dim <= 8, N <= 12, K <= 5, C <= 3, weights drawn
/// from {0, 1/16, 1}; the state has random S, F and in-ball D, B.
pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let dim = r.random_range(2..=8);
    let n = r.random_range(4..=12);
    let k = r.random_range(1..=5);
    let c = r.random_range(1..=3);
    let x = uniform(&mut r, dim, n) * 2.0;
    let features = FeatureMatrix::new(Matrix::from_dmatrix(x).unwrap());
    let prior = LabelPrior::from_labels(&random_labels(&mut r, n, c), c).unwrap();
    let knn = r.random_range(1..n.min(4));
    let laplacian = compute_laplacian(&build_knn_hypergraph(&features, knn).unwrap()).unwrap();
    let params = HyperParams {
        alpha: WEIGHTS[r.random_range(0..3)],
        beta: WEIGHTS[r.random_range(0..3)],
        delta_w: WEIGHTS[r.random_range(0..3)],
        dict_size: k,
        knn,
        max_iter: 30,
        rel_tol: 1e-9,
        seed,
    };
    let mut state = {
        let problem = Problem::new(&features, &prior, &laplacian, &params).unwrap();
        init_state(&problem).unwrap()
    };
    state.s = Matrix::from_dmatrix(uniform(&mut r, k, n)).unwrap();
    state.b = Matrix::from_dmatrix(into_ball(uniform(&mut r, c, k))).unwrap();
    state.f = Matrix::from_dmatrix(uniform(&mut r, c, n)).unwrap();
    Instance { features, prior, laplacian, params, state }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_column_norm(m: &Matrix) -> f64 {
    m.as_dmatrix().column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}
