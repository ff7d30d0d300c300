//! Semi-supervised dictionary learning with dynamic soft labels.
//!
//! Training data `X` (`dim x N`) is factorised as `X ~ D S` with a
//! unit-ball-constrained dictionary `D` and sparse codes `S`. A kNN
//! hypergraph over the samples supplies a normalized Laplacian that smooths
//! both the codes and a soft-label matrix `F`, which is co-optimised with a
//! linear classifier `B` on the codes and anchored to the few known labels.
//!
//! The pieces, bottom up:
//! - [`matrix`]: dense matrix wrapper and scalar/linear primitives
//! - [`hypergraph`]: kNN hypergraph and its Laplacian
//! - [`solver`]: the alternating minimiser (and a fixed-label variant)
//! - [`inference`]: inductive and transductive classification
//! - [`data`], [`model_io`]: text formats
//! - [`oracles`]: slow reference computations used by the tests

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod hypergraph;
pub mod inference;
pub mod matrix;
pub mod model_io;
pub mod oracles;
pub mod solver;
pub mod synthetic;

pub use error::{DldlError, Result};
pub use hypergraph::{build_knn_hypergraph, compute_laplacian, Hypergraph, Laplacian};
pub use matrix::{FeatureMatrix, Matrix};
pub use solver::{fit, fit_fixed_label, fit_from, fit_observed, HyperParams, LabelMode, LabelPrior, ModelState, Problem};
