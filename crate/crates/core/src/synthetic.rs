//! Seeded Gaussian-cluster benchmark data.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub n_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    /// Distance between any two cluster centres, in units of `std_dev`.
    pub separation: f64,
    pub std_dev: f64,
    pub labeled_per_class: usize,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            n_classes: 4,
            per_class: 50,
            dim: 20,
            separation: 4.0,
            std_dev: 1.0,
            labeled_per_class: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub features: FeatureMatrix,
    /// True class of every sample.
    pub truth: Vec<usize>,
    /// Revealed labels (`None` = unlabeled).
    pub labels: Vec<Option<usize>>,
}

/// Isotropic Gaussian clusters whose centres sit on scaled coordinate axes,
/// so every pair is exactly `separation * std_dev` apart. Samples are
/// grouped by class; which ones are labeled is drawn per class.
pub fn gaussian_clusters(spec: &ClusterSpec, seed: u64) -> Result<SyntheticData> {
    if spec.dim < spec.n_classes {
        return Err(invalid(format!(
            "dimension {} cannot hold {} equidistant centres on the axes",
            spec.dim, spec.n_classes
        )));
    }
    let offset = spec.separation * spec.std_dev / std::f64::consts::SQRT_2;
    sample_clusters(spec, seed, |class, x| x[class] += offset)
}

/// Like [`gaussian_clusters`] but with the centres evenly spaced on a circle
/// in the first two coordinates, neighbouring centres `separation *
/// std_dev` apart. Works for any class count, which suits 2-D pictures.
pub fn ring_clusters(spec: &ClusterSpec, seed: u64) -> Result<SyntheticData> {
    if spec.dim < 2 {
        return Err(invalid("ring layout needs at least two dimensions"));
    }
    let c = spec.n_classes as f64;
    let radius = if spec.n_classes > 1 {
        spec.separation * spec.std_dev / (2.0 * (std::f64::consts::PI / c).sin())
    } else {
        0.0
    };
    sample_clusters(spec, seed, |class, x| {
        let angle = std::f64::consts::TAU * class as f64 / c;
        x[0] += radius * angle.cos();
        x[1] += radius * angle.sin();
    })
}

fn sample_clusters(spec: &ClusterSpec, seed: u64, shift: impl Fn(usize, &mut [f64])) -> Result<SyntheticData> {
    if spec.n_classes < 1 || spec.per_class < 1 {
        return Err(invalid("need at least one class and one sample per class"));
    }
    if spec.labeled_per_class > spec.per_class {
        return Err(invalid("more labeled samples than samples per class"));
    }
    let normal = Normal::new(0.0, spec.std_dev).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut samples = Vec::with_capacity(spec.n_classes * spec.per_class);
    let mut truth = Vec::with_capacity(samples.capacity());
    let mut labels = Vec::with_capacity(samples.capacity());
    for class in 0..spec.n_classes {
        let mut revealed: Vec<bool> = (0..spec.per_class).map(|i| i < spec.labeled_per_class).collect();
        revealed.shuffle(&mut rng);
        for &is_labeled in &revealed {
            let mut x: Vec<f64> = (0..spec.dim).map(|_| normal.sample(&mut rng)).collect();
            shift(class, &mut x);
            samples.push(x);
            truth.push(class);
            labels.push(is_labeled.then_some(class));
        }
    }
    Ok(SyntheticData {
        features: FeatureMatrix::from_samples(&samples)?,
        truth,
        labels,
    })
}
