use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Problem;
use crate::error::Result;
use crate::matrix::{unit_normalize_column, Matrix};

/// Which label term the model was trained with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// Soft labels `F` co-optimized with the dictionary.
    Dynamic,
    /// Fixed one-hot labels on the labeled subset only; `F` is left at the
    /// prior and unused.
    Fixed,
}

impl LabelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelMode::Dynamic => "dynamic",
            LabelMode::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Dictionary,
    Classifier,
}

/// Non-fatal conditions encountered while fitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverWarning {
    /// Coordinate `(k, n)` had zero curvature and was set to zero.
    DegenerateCode { atom: usize },
    /// Column `k` received no signal and was left unchanged.
    DeadAtom { kind: AtomKind, atom: usize },
    /// `beta = 0`: the soft labels stay at the prior.
    LabelUpdateSkipped,
    /// A training sample was all zeros and its atom was drawn at random.
    ZeroSampleAtom { atom: usize },
}

impl fmt::Display for SolverWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverWarning::DegenerateCode { atom } => {
                write!(f, "atom {atom} has zero curvature for some samples; codes set to 0")
            }
            SolverWarning::DeadAtom { kind, atom } => write!(f, "{kind:?} column {atom} is unused and was kept"),
            SolverWarning::LabelUpdateSkipped => write!(f, "beta = 0: soft labels stay at the prior"),
            SolverWarning::ZeroSampleAtom { atom } => {
                write!(f, "atom {atom} drew an all-zero sample; used a random direction")
            }
        }
    }
}

/// Everything the alternating solver learns.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    /// Dictionary, `dim x K`.
    pub d: Matrix,
    /// Sparse codes of the training samples, `K x N`.
    pub s: Matrix,
    /// Linear classifier on codes, `C x K`.
    pub b: Matrix,
    /// Soft labels of the training samples, `C x N`.
    pub f: Matrix,
    /// Training label assignment (`None` = unlabeled).
    pub labels: Vec<Option<usize>>,
    pub mode: LabelMode,
    /// Objective right after initialisation.
    pub initial_loss: Option<f64>,
    /// Objective after each full outer iteration.
    pub loss_history: Vec<f64>,
    /// Deduplicated, not persisted.
    pub warnings: Vec<SolverWarning>,
}

impl ModelState {
    pub fn dict_size(&self) -> usize {
        self.d.cols()
    }

    pub fn dim(&self) -> usize {
        self.d.rows()
    }

    pub fn n_classes(&self) -> usize {
        self.b.rows()
    }

    pub fn n_samples(&self) -> usize {
        self.s.cols()
    }

    pub(crate) fn warn(&mut self, w: SolverWarning) {
        if !self.warnings.contains(&w) {
            log::debug!("{w}");
            self.warnings.push(w);
        }
    }
}

fn gaussian_unit_column(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        if let Some(u) = unit_normalize_column(&v) {
            return u;
        }
    }
}

/// Seeded initialisation: atoms are distinct training samples (unit-scaled)
/// when `N >= K`, random Gaussian unit vectors otherwise; `S = 0`, `B = 0`,
/// `F = O`.
pub fn init_state(problem: &Problem<'_>) -> Result<ModelState> {
    let hp = problem.params;
    hp.validate()?;
    let x = problem.features.as_dmatrix();
    let (dim, n) = x.shape();
    let k = hp.dict_size;
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut warnings = Vec::new();

    let mut d = DMatrix::zeros(dim, k);
    if n >= k {
        let picks = rand::seq::index::sample(&mut rng, n, k);
        for (atom, sample) in picks.iter().enumerate() {
            let col = match unit_normalize_column(&x.column(sample).into_owned()) {
                Some(c) => c,
                None => {
                    warnings.push(SolverWarning::ZeroSampleAtom { atom });
                    gaussian_unit_column(&mut rng, dim)
                }
            };
            d.set_column(atom, &col);
        }
    } else {
        for atom in 0..k {
            d.set_column(atom, &gaussian_unit_column(&mut rng, dim));
        }
    }

    let c = problem.prior.n_classes();
    Ok(ModelState {
        d: Matrix::from_dmatrix(d)?,
        s: Matrix::zeros(k, n)?,
        b: Matrix::zeros(c, k)?,
        f: problem.prior.o().clone(),
        labels: problem.prior.labels().to_vec(),
        mode: LabelMode::Dynamic,
        initial_loss: None,
        loss_history: Vec::new(),
        warnings,
    })
}
