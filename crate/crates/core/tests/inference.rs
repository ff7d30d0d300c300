mod common;

use common::*;
use dldl::inference::{argmax, encode, encode_with_dictionary, evaluate, predict_inductive, predict_transductive};
use dldl::matrix::soft_threshold;
use dldl::synthetic::{gaussian_clusters, ClusterSpec};
use dldl::{build_knn_hypergraph, compute_laplacian, fit, HyperParams, Matrix, Problem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn lasso_value(d: &DMatrix<f64>, y: &DVector<f64>, s: &DVector<f64>, alpha: f64) -> f64 {
    (y - d * s).norm_squared() + 2.0 * alpha * s.lp_norm(1)
}

/// Long-horizon proximal gradient (ISTA) from zero, keeping the best value.
fn proximal_gradient_oracle(d: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> f64 {
    let step = 1.0 / (2.0 * (d.transpose() * d).norm());
    let mut s = DVector::zeros(d.ncols());
    let mut best = lasso_value(d, y, &s, alpha);
    for _ in 0..200_000 {
        let smooth = &s - (d.transpose() * (d * &s - y) * 2.0) * step;
        s = smooth.map(|v| soft_threshold(v, 2.0 * alpha * step).unwrap());
        best = best.min(lasso_value(d, y, &s, alpha));
    }
    best
}

#[test]
fn encoding_matches_high_precision_oracle() {
    for seed in 0..10 {
        let mut r = rng(seed);
        let d = into_ball(uniform(&mut r, 4, 3));
        let y = DVector::from_fn(4, |_, _| r.random_range(-2.0..2.0));
        let alpha = [0.0, 0.0625, 0.5][seed as usize % 3];
        let dm = Matrix::from_dmatrix(d.clone()).unwrap();
        let s = encode_with_dictionary(&dm, &y, alpha).unwrap();
        let got = lasso_value(&d, &y, &s, alpha);
        let oracle = proximal_gradient_oracle(&d, &y, alpha);
        assert!(got <= oracle + 1e-6, "seed {seed}: {got} vs {oracle}");
    }
}

#[test]
fn zero_alpha_gives_least_squares() {
    for seed in 0..10 {
        let mut r = rng(seed);
        let d = uniform(&mut r, 6, 3);
        let y = DVector::from_fn(6, |_, _| r.random_range(-1.0..1.0));
        let s = encode_with_dictionary(&Matrix::from_dmatrix(d.clone()).unwrap(), &y, 0.0).unwrap();
        let ls = (d.transpose() * &d).cholesky().unwrap().solve(&(d.transpose() * &y));
        assert!((s - ls).amax() <= 1e-6);
    }
}

#[test]
fn sparsity_grows_with_alpha() {
    let nnz = |s: &DVector<f64>| s.iter().filter(|v| v.abs() > 1e-10).count();
    let mut monotone = 0;
    for seed in 0..100 {
        let mut r = rng(seed);
        let d = into_ball(uniform(&mut r, 5, 6));
        let y = DVector::from_fn(5, |_, _| r.random_range(-1.0..1.0));
        let dm = Matrix::from_dmatrix(d).unwrap();
        let a1 = r.random_range(0.0..0.3);
        let a2 = a1 + r.random_range(0.01..0.5);
        let s1 = encode_with_dictionary(&dm, &y, a1).unwrap();
        let s2 = encode_with_dictionary(&dm, &y, a2).unwrap();
        if nnz(&s1) >= nnz(&s2) {
            monotone += 1;
        }
    }
    assert!(monotone >= 95, "{monotone}/100");
}

#[test]
fn inductive_decisions_match_recomputation() {
    let spec = ClusterSpec { per_class: 20, labeled_per_class: 3, ..ClusterSpec::default() };
    let data = gaussian_clusters(&spec, 4).unwrap();
    let prior = dldl::data::build_prior(&data.labels, spec.n_classes).unwrap();
    let hp = HyperParams { dict_size: 20, max_iter: 20, ..HyperParams::default() };
    let lap = compute_laplacian(&build_knn_hypergraph(&data.features, hp.knn).unwrap()).unwrap();
    let model = fit(&Problem::new(&data.features, &prior, &lap, &hp).unwrap()).unwrap();

    let report = predict_inductive(&model, &data.features, hp.alpha).unwrap();
    let b = model.b.as_dmatrix();
    for n in 0..data.features.n_samples() {
        let s = encode(&model, &data.features.sample(n), hp.alpha).unwrap();
        let scores = b * s;
        assert_eq!(report.decisions[n], argmax(scores.iter().copied()));
        // positive rescaling never changes a decision
        assert_eq!(report.decisions[n], argmax(scores.iter().map(|v| 7.5 * v)));
    }

    let trans = predict_transductive(&model, true).unwrap();
    let truth: Vec<usize> = trans.indices.iter().map(|&i| data.truth[i]).collect();
    assert!(evaluate(&trans.decisions, &truth).unwrap() > 0.25);
}

#[test]
fn large_beta_without_smoothing_recovers_labels() {
    let spec = ClusterSpec { per_class: 6, labeled_per_class: 2, n_classes: 3, dim: 4, ..ClusterSpec::default() };
    let data = gaussian_clusters(&spec, 2).unwrap();
    let prior = dldl::data::build_prior(&data.labels, 3).unwrap();
    let n = data.features.n_samples();
    let lap = dldl::Laplacian::zeros(n).unwrap();
    let hp = HyperParams { beta: 1024.0, dict_size: 4, ..HyperParams::default() };
    let p = Problem::new(&data.features, &prior, &lap, &hp).unwrap();
    let mut st = dldl::solver::init_state(&p).unwrap();
    dldl::solver::update_f(&p, &mut st).unwrap();
    assert!(max_abs_diff(st.f.as_dmatrix(), &(prior.o().as_dmatrix() * 0.5)) <= 1e-12);
    let all = predict_transductive(&st, false).unwrap();
    for &i in &prior.labeled_indices() {
        assert_eq!(Some(all.decisions[i]), data.labels[i]);
    }
}
