//! Closed-form block updates of the alternating solver.

use nalgebra::{DMatrix, DVector};

use super::objective::check_shapes;
use super::state::{AtomKind, ModelState, SolverWarning};
use super::Problem;
use crate::error::Result;
use crate::matrix::{shrink, solve_spd_system, Matrix, EPSILON_NORM};

/// Curvatures at or below this are treated as zero.
const CURVATURE_FLOOR: f64 = 1e-300;

/// Precomputed pieces of one Gauss-Seidel pass over the codes.
///
/// Per coordinate `(k, n)` the objective restricted to `s = S_kn` is
/// `A s^2 - 2 J s + 2 alpha |s| + const` with
/// `A = (D^T D + w_n B^T B)_kk + delta Delta_nn` and
/// `J = P_kn - delta sum_{r != n} Delta_nr S_kr - sum_{l != k} (D^T D + w_n B^T B)_kl S_ln`,
/// where `P = D^T X + B^T T diag(w)` and `w_n` is the label weight of sample `n`.
pub(crate) struct CodeSweep<'a> {
    dtd: DMatrix<f64>,
    btb: DMatrix<f64>,
    label_weight: Vec<f64>,
    p: DMatrix<f64>,
    lap: &'a DMatrix<f64>,
    delta_w: f64,
    alpha: f64,
}

impl<'a> CodeSweep<'a> {
    /// `target` is `C x N`; columns with zero weight are ignored.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        x: &DMatrix<f64>,
        d: &DMatrix<f64>,
        b: &DMatrix<f64>,
        target: &DMatrix<f64>,
        label_weight: Vec<f64>,
        lap: &'a DMatrix<f64>,
        delta_w: f64,
        alpha: f64,
    ) -> Self {
        let dt = d.transpose();
        let bt = b.transpose();
        let mut p = &dt * x;
        let bt_t = &bt * target;
        for (n, &w) in label_weight.iter().enumerate() {
            if w != 0.0 {
                let mut col = p.column_mut(n);
                col.axpy(w, &bt_t.column(n), 1.0);
            }
        }
        Self {
            dtd: &dt * d,
            btb: &bt * b,
            label_weight,
            p,
            lap,
            delta_w,
            alpha,
        }
    }

    /// `(J, A)` for coordinate `(k, n)`. `row_k` must equal row `k` of `s`.
    fn coefficients_with_row(&self, s: &DMatrix<f64>, row_k: &[f64], k: usize, n: usize) -> (f64, f64) {
        let w = self.label_weight[n];
        let mut j = self.p[(k, n)];
        let col = s.column(n);
        for l in 0..col.len() {
            if l != k {
                let g = self.dtd[(k, l)] + if w != 0.0 { w * self.btb[(k, l)] } else { 0.0 };
                j -= g * col[l];
            }
        }
        let mut a = self.dtd[(k, k)] + w * self.btb[(k, k)];
        if self.delta_w != 0.0 {
            let lap_n = self.lap.column(n);
            let acc: f64 = lap_n.iter().zip(row_k).map(|(l, v)| l * v).sum::<f64>() - lap_n[n] * row_k[n];
            j -= self.delta_w * acc;
            a += self.delta_w * lap_n[n];
        }
        (j, a)
    }

    /// `(J, A)` for coordinate `(k, n)` given the current codes.
    pub(crate) fn coefficients(&self, s: &DMatrix<f64>, k: usize, n: usize) -> (f64, f64) {
        let row: Vec<f64> = s.row(k).iter().copied().collect();
        self.coefficients_with_row(s, &row, k, n)
    }

    /// Exact minimiser of the objective in coordinate `(k, n)`; `None` when
    /// the curvature vanishes.
    pub(crate) fn minimiser(&self, s: &DMatrix<f64>, k: usize, n: usize) -> Option<f64> {
        let (j, a) = self.coefficients(s, k, n);
        (a > CURVATURE_FLOOR).then(|| shrink(j, self.alpha) / a)
    }

    /// One full pass, `k` outer ascending, `n` inner ascending. Returns the
    /// atoms that hit a zero curvature.
    pub(crate) fn sweep(&self, s: &mut DMatrix<f64>) -> Vec<usize> {
        let (kk, nn) = s.shape();
        let mut degenerate = Vec::new();
        let mut row = vec![0.0; nn];
        for k in 0..kk {
            for (n, v) in row.iter_mut().enumerate() {
                *v = s[(k, n)];
            }
            for n in 0..nn {
                let (j, a) = self.coefficients_with_row(s, &row, k, n);
                let value = if a > CURVATURE_FLOOR {
                    shrink(j, self.alpha) / a
                } else {
                    if degenerate.last() != Some(&k) {
                        degenerate.push(k);
                    }
                    0.0
                };
                s[(k, n)] = value;
                row[n] = value;
            }
        }
        degenerate
    }
}

pub(crate) fn dynamic_code_sweep<'a>(problem: &'a Problem<'_>, state: &ModelState) -> CodeSweep<'a> {
    let hp = problem.params;
    let n = problem.features.n_samples();
    CodeSweep::new(
        problem.features.as_dmatrix(),
        state.d.as_dmatrix(),
        state.b.as_dmatrix(),
        state.f.as_dmatrix(),
        vec![hp.beta; n],
        problem.laplacian.as_dmatrix(),
        hp.delta_w,
        hp.alpha,
    )
}

/// One Gauss-Seidel sweep of exact coordinate minimisation over `S`.
pub fn update_s(problem: &Problem<'_>, state: &mut ModelState) -> Result<()> {
    check_shapes(problem, state)?;
    let sweep = dynamic_code_sweep(problem, state);
    let degenerate = sweep.sweep(state.s.as_dmatrix_mut());
    for atom in degenerate {
        state.warn(SolverWarning::DegenerateCode { atom });
    }
    state.s.ensure_finite("update_s")
}

/// Sets the single code `S_kn` to its exact minimiser with everything else
/// held fixed. `update_s` is this applied to every coordinate in order.
pub fn update_s_entry(problem: &Problem<'_>, state: &mut ModelState, k: usize, n: usize) -> Result<()> {
    check_shapes(problem, state)?;
    let (kk, nn) = state.s.shape();
    if k >= kk || n >= nn {
        return Err(crate::error::invalid(format!("coordinate ({k}, {n}) outside a {kk}x{nn} code matrix")));
    }
    let sweep = dynamic_code_sweep(problem, state);
    let value = match sweep.minimiser(state.s.as_dmatrix(), k, n) {
        Some(v) => v,
        None => {
            state.warn(SolverWarning::DegenerateCode { atom: k });
            0.0
        }
    };
    state.s.as_dmatrix_mut()[(k, n)] = value;
    state.s.ensure_finite("update_s_entry")
}

/// Outcome of updating one column in a blockwise pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColumnStep {
    /// The normalized closed form `r / ||r||`.
    Normalized,
    /// The closed form would not have decreased the objective (only possible
    /// when the current column lies inside the ball); the exact constrained
    /// minimiser `r / q` was used instead.
    Interior,
    /// No signal: the column was kept.
    Dead,
}

/// Blockwise pass minimising `||target - atoms * codes||_F^2` one column at a
/// time subject to `||a_k|| <= 1`, with the freshest other columns.
///
/// Column `k` sees `r = target codes_k^T - sum_{l != k} a_l (codes codes^T)_lk`
/// and curvature `q = ||codes_k||^2`; the subproblem value is
/// `q ||a||^2 - 2 a^T r`.
pub(crate) fn blockwise_columns(
    target: &DMatrix<f64>,
    codes: &DMatrix<f64>,
    atoms: &mut DMatrix<f64>,
) -> Vec<(usize, ColumnStep)> {
    let sst = codes * codes.transpose();
    let tst = target * codes.transpose();
    let kk = atoms.ncols();
    let mut steps = Vec::with_capacity(kk);
    for k in 0..kk {
        let q = sst[(k, k)];
        let mut r: DVector<f64> = tst.column(k).into_owned();
        for l in 0..kk {
            if l != k && sst[(l, k)] != 0.0 {
                r.axpy(-sst[(l, k)], &atoms.column(l), 1.0);
            }
        }
        let r_norm = r.norm();
        if !(q > CURVATURE_FLOOR) || !(r_norm > EPSILON_NORM) {
            steps.push((k, ColumnStep::Dead));
            continue;
        }
        let value = |a: &DVector<f64>| q * a.norm_squared() - 2.0 * a.dot(&r);
        let current = atoms.column(k).into_owned();
        let candidate = &r / r_norm;
        if value(&candidate) <= value(&current) {
            atoms.set_column(k, &candidate);
            steps.push((k, ColumnStep::Normalized));
        } else {
            let mut interior = &r / q;
            let norm = interior.norm();
            if norm > 1.0 {
                interior /= norm;
            }
            atoms.set_column(k, &interior);
            steps.push((k, ColumnStep::Interior));
        }
    }
    steps
}

fn record_steps(state: &mut ModelState, kind: AtomKind, steps: &[(usize, ColumnStep)]) {
    for &(atom, step) in steps {
        if step == ColumnStep::Dead {
            state.warn(SolverWarning::DeadAtom { kind, atom });
        }
    }
}

/// Blockwise update of the dictionary columns.
pub fn update_d(features: &crate::matrix::FeatureMatrix, state: &mut ModelState) -> Result<()> {
    let steps = blockwise_columns(features.as_dmatrix(), state.s.as_dmatrix(), state.d.as_dmatrix_mut());
    record_steps(state, AtomKind::Dictionary, &steps);
    state.d.ensure_finite("update_d")
}

/// Blockwise update of the classifier columns against the soft labels.
pub fn update_b(state: &mut ModelState) -> Result<()> {
    let steps = blockwise_columns(state.f.as_dmatrix(), state.s.as_dmatrix(), state.b.as_dmatrix_mut());
    record_steps(state, AtomKind::Classifier, &steps);
    state.b.ensure_finite("update_b")
}

/// Closed-form soft-label update: solves `F (Delta + 2 beta I) = beta (B S + O)`.
/// With `beta = 0` the labels are left untouched.
pub fn update_f(problem: &Problem<'_>, state: &mut ModelState) -> Result<()> {
    check_shapes(problem, state)?;
    let beta = problem.params.beta;
    if beta == 0.0 {
        state.warn(SolverWarning::LabelUpdateSkipped);
        return Ok(());
    }
    let lap = problem.laplacian.as_dmatrix();
    let n = lap.nrows();
    let system = Matrix::from_dmatrix(lap + DMatrix::identity(n, n) * (2.0 * beta))?;
    let rhs = (state.b.as_dmatrix() * state.s.as_dmatrix() + problem.prior.o().as_dmatrix()) * beta;
    let z = solve_spd_system(&system, &Matrix::from_dmatrix(rhs.transpose())?)?;
    state.f = z.transpose();
    Ok(())
}
