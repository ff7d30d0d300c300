//! Slow reference computations for certifying the solver.
//!
//! Nothing here calls the solver's update code: each oracle either searches
//! numerically or transcribes a definition literally. They are meant for
//! small instances (N <= 20, K <= 6).

use nalgebra::{DMatrix, DVector};

use crate::error::{DldlError, Result};
use crate::hypergraph::Hypergraph;
use crate::matrix::Matrix;

/// Outcome of comparing an implementation against an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, max_abs_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_abs_error,
            tolerance,
            passed: max_abs_error <= tolerance,
        }
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: max error {:.3e} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_abs_error,
            self.tolerance
        )
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of a unimodal function on
/// `[lo, hi]`. `less(a, b)` reports whether `f(a) <= f(b)`; passing the
/// comparison instead of `f` lets callers evaluate `f(a) - f(b)` without the
/// cancellation that would otherwise cap the resolution near `sqrt(eps)`.
fn golden_section(less: impl Fn(f64, f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    for _ in 0..400 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if less(a, b) {
            hi = b;
            b = a;
            a = hi - INV_PHI * (hi - lo);
        } else {
            lo = a;
            a = b;
            b = lo + INV_PHI * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Global minimiser of `q(s) = 0.5 d s^2 - j s + alpha |s|` found by
/// golden-section search on each sign branch, compared with `s = 0`.
pub fn scalar_coordinate_minimizer(d_quad: f64, j_lin: f64, alpha: f64) -> f64 {
    let q = |s: f64| 0.5 * d_quad * s * s - j_lin * s + alpha * s.abs();
    // q(a) - q(b) factored so that nearby points compare accurately
    let less = |a: f64, b: f64| (a - b) * (0.5 * d_quad * (a + b) - j_lin) + alpha * (a.abs() - b.abs()) <= 0.0;
    let bound = (j_lin.abs() + alpha) / d_quad + 1.0;
    let candidates = [golden_section(less, 0.0, bound), golden_section(less, -bound, 0.0), 0.0];
    candidates
        .into_iter()
        .min_by(|a, b| q(*a).total_cmp(&q(*b)))
        .unwrap_or(0.0)
}

/// Smoothness of the rows of `m` (`c x N`) over the hypergraph, as the
/// literal pairwise sum
/// `1/2 sum_c sum_e sum_{u,v} W(e) H(u,e) H(v,e) / delta(e) (m_cu / sqrt(d_u) - m_cv / sqrt(d_v))^2`.
pub fn pairwise_smoothness(g: &Hypergraph, m: &Matrix) -> Result<f64> {
    let n = g.n_vertices();
    if m.cols() != n {
        return Err(DldlError::InvalidArgument(format!("m has {} columns, hypergraph has {n} vertices", m.cols())));
    }
    if g.vertex_degrees().iter().chain(g.edge_degrees()).any(|&d| !(d > 0.0)) {
        return Err(DldlError::DegenerateHypergraph("zero degree".into()));
    }
    let h = g.incidence();
    let dv = g.vertex_degrees();
    let mut total = 0.0;
    for c in 0..m.rows() {
        for e in 0..g.n_edges() {
            let scale = g.edge_weights()[e] / g.edge_degrees()[e];
            for u in 0..n {
                for v in 0..n {
                    let diff = m.get(c, u) / dv[u].sqrt() - m.get(c, v) / dv[v].sqrt();
                    total += scale * h.get(u, e) * h.get(v, e) * diff * diff;
                }
            }
        }
    }
    Ok(0.5 * total)
}

/// Entrywise central differences of `f` at `at` with step `h`.
pub fn finite_difference_gradient(f: impl Fn(&DMatrix<f64>) -> f64, at: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let mut probe = at.clone();
    let mut grad = DMatrix::zeros(at.nrows(), at.ncols());
    for i in 0..at.nrows() {
        for j in 0..at.ncols() {
            let orig = probe[(i, j)];
            probe[(i, j)] = orig + h;
            let up = f(&probe);
            probe[(i, j)] = orig - h;
            let down = f(&probe);
            probe[(i, j)] = orig;
            grad[(i, j)] = (up - down) / (2.0 * h);
        }
    }
    grad
}

/// Minimises `||target - atoms codes||_F^2` over column `k` of `atoms`
/// subject to `||a_k||_2 <= 1`, every other column held fixed, by projected
/// gradient descent. Returns `None` when the column has no curvature
/// (row `k` of `codes` is zero).
pub fn projected_gradient_column_solver(
    target: &DMatrix<f64>,
    codes: &DMatrix<f64>,
    atoms: &DMatrix<f64>,
    k: usize,
) -> Option<DVector<f64>> {
    let code_row = codes.row(k).transpose();
    let curvature = code_row.norm_squared();
    if !(curvature > 1e-300) {
        return None;
    }
    let step = 1.0 / (4.0 * curvature);
    let mut work = atoms.clone();
    let project = |v: DVector<f64>| {
        let norm = v.norm();
        if norm > 1.0 {
            v / norm
        } else {
            v
        }
    };
    let mut a = project(atoms.column(k).into_owned());
    for _ in 0..100_000 {
        work.set_column(k, &a);
        let residual = target - &work * codes;
        let grad = -2.0 * residual * &code_row;
        let next = project(&a - step * grad);
        let moved = (&next - &a).norm();
        a = next;
        if moved <= 1e-14 {
            break;
        }
    }
    Some(a)
}

/// Value of `||target - atoms codes||_F^2` with column `k` replaced by `column`.
pub fn column_objective(
    target: &DMatrix<f64>,
    codes: &DMatrix<f64>,
    atoms: &DMatrix<f64>,
    k: usize,
    column: &DVector<f64>,
) -> f64 {
    let mut a = atoms.clone();
    a.set_column(k, column);
    (target - a * codes).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_minimiser_examples() {
        assert_abs_diff_eq!(scalar_coordinate_minimizer(1.0, 2.0, 0.5), 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(scalar_coordinate_minimizer(2.0, 2.0, 0.5), 0.75, epsilon = 1e-8);
        assert_abs_diff_eq!(scalar_coordinate_minimizer(1.0, 0.3, 0.5), 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(scalar_coordinate_minimizer(3.0, -4.0, 1.0), -1.0, epsilon = 1e-8);
    }

    #[test]
    fn pairwise_zero_cases() {
        let g = Hypergraph::from_incidence(Matrix::identity(3).unwrap(), vec![1.0; 3]).unwrap();
        let m = Matrix::from_row_slice(1, 3, &[1.0, -2.0, 5.0]).unwrap();
        assert_eq!(pairwise_smoothness(&g, &m).unwrap(), 0.0);
        let h = Matrix::from_row_slice(3, 1, &[1.0, 0.5, 0.2]).unwrap();
        let g = Hypergraph::from_incidence(h, vec![2.0]).unwrap();
        assert_eq!(pairwise_smoothness(&g, &Matrix::zeros(2, 3).unwrap()).unwrap(), 0.0);
        assert!(pairwise_smoothness(&g, &Matrix::zeros(2, 2).unwrap()).is_err());
    }

    #[test]
    fn finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = DMatrix::from_fn(3, 4, |_, _| rng.random_range(-1.0..1.0));
        let g = finite_difference_gradient(|x| x.norm_squared(), &m, 1e-4);
        assert_abs_diff_eq!(g, &m * 2.0, epsilon = 1e-6);

        let lap = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let g = finite_difference_gradient(|x| (&lap * x.transpose() * x).trace(), &m, 1e-4);
        assert_abs_diff_eq!(g, &m * (&lap + lap.transpose()), epsilon = 1e-5);

        let g = finite_difference_gradient(|_| 3.0, &m, 1e-4);
        assert_eq!(g, DMatrix::zeros(3, 4));
    }

    #[test]
    fn column_solver_interior_and_boundary() {
        // single atom, optimum (0.3, 0.4) lies inside the ball
        let codes = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let target = DMatrix::from_row_slice(2, 2, &[0.3, 0.3, 0.4, 0.4]);
        let atoms = DMatrix::zeros(2, 1);
        let a = projected_gradient_column_solver(&target, &codes, &atoms, 0).unwrap();
        assert_abs_diff_eq!(a[0], 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(a[1], 0.4, epsilon = 1e-10);

        // scaled target pushes the optimum outside: the answer sits on the sphere
        let a = projected_gradient_column_solver(&(target * 10.0), &codes, &atoms, 0).unwrap();
        assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a[0], 0.6, epsilon = 1e-8);

        let dead = DMatrix::zeros(1, 2);
        assert!(projected_gradient_column_solver(&DMatrix::zeros(2, 2), &dead, &atoms, 0).is_none());
    }

    #[test]
    fn report_pass_flag() {
        assert!(OracleReport::new("a", 1e-9, 1e-8).passed);
        assert!(!OracleReport::new("b", 1e-7, 1e-8).passed);
        assert!(OracleReport::new("c", 1e-9, 1e-8).to_string().starts_with("[PASS]"));
    }
}
