use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::matrix::Matrix;

/// Fill value for every class entry of an unlabeled sample's prior column.
pub const UNLABELED_PRIOR: f64 = 0.5;

/// Initial label matrix `O` (`C x N`) together with which samples carry a
/// ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelPrior {
    o: Matrix,
    labels: Vec<Option<usize>>,
    n_classes: usize,
}

impl LabelPrior {
    /// One-hot columns for labeled samples, `0.5` everywhere for the rest.
    pub fn from_labels(labels: &[Option<usize>], n_classes: usize) -> Result<Self> {
        if n_classes < 1 {
            return Err(invalid("need at least one class"));
        }
        if labels.is_empty() {
            return Err(invalid("need at least one sample"));
        }
        if let Some(c) = labels.iter().flatten().find(|&&c| c >= n_classes) {
            return Err(invalid(format!("label {c} out of range for {n_classes} classes")));
        }
        let o = DMatrix::from_fn(n_classes, labels.len(), |c, n| match labels[n] {
            Some(l) if l == c => 1.0,
            Some(_) => 0.0,
            None => UNLABELED_PRIOR,
        });
        Ok(Self {
            o: Matrix::from_dmatrix(o)?,
            labels: labels.to_vec(),
            n_classes,
        })
    }

    pub fn o(&self) -> &Matrix {
        &self.o
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn labeled_mask(&self) -> Vec<bool> {
        self.labels.iter().map(Option::is_some).collect()
    }

    pub fn is_labeled(&self, n: usize) -> bool {
        self.labels[n].is_some()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_labeled(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    /// Indices of labeled samples, ascending.
    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&n| self.labels[n].is_some()).collect()
    }

    /// Indices of unlabeled samples, ascending.
    pub fn unlabeled_indices(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&n| self.labels[n].is_none()).collect()
    }
}
