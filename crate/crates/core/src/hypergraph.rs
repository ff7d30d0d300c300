//! kNN hypergraph construction and the normalized hypergraph Laplacian.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{invalid, DldlError, Result};
use crate::matrix::{FeatureMatrix, Matrix};

/// Mean distances below this are treated as "all points coincide".
const SIGMA_FLOOR: f64 = 1e-12;

/// Weighted hypergraph with soft incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    incidence: Matrix,
    edge_weights: Vec<f64>,
    vertex_degrees: Vec<f64>,
    edge_degrees: Vec<f64>,
    /// Distance scale used for the incidence kernel (1 for hand-built graphs).
    sigma: f64,
    /// Neighbours per hyperedge, when built from features.
    knn: Option<usize>,
}

impl Hypergraph {
    /// Builds a hypergraph from an explicit `N x |E|` incidence matrix and
    /// per-edge weights, computing both degree vectors.
    pub fn from_incidence(incidence: Matrix, edge_weights: Vec<f64>) -> Result<Self> {
        let (n, m) = incidence.shape();
        if edge_weights.len() != m {
            return Err(invalid(format!(
                "{} edge weights given for {m} hyperedges",
                edge_weights.len()
            )));
        }
        if edge_weights.iter().any(|&w| !(w > 0.0)) {
            return Err(invalid("hyperedge weights must be positive"));
        }
        if incidence.as_dmatrix().iter().any(|&h| !(0.0..=1.0).contains(&h)) {
            return Err(invalid("incidence entries must lie in [0, 1]"));
        }
        let h = incidence.as_dmatrix();
        let edge_degrees: Vec<f64> = (0..m).map(|e| h.column(e).sum()).collect();
        let vertex_degrees: Vec<f64> = (0..n)
            .map(|v| (0..m).map(|e| edge_weights[e] * h[(v, e)]).sum())
            .collect();
        Ok(Self {
            incidence,
            edge_weights,
            vertex_degrees,
            edge_degrees,
            sigma: 1.0,
            knn: None,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.incidence.rows()
    }

    pub fn n_edges(&self) -> usize {
        self.incidence.cols()
    }

    pub fn incidence(&self) -> &Matrix {
        &self.incidence
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn vertex_degrees(&self) -> &[f64] {
        &self.vertex_degrees
    }

    pub fn edge_degrees(&self) -> &[f64] {
        &self.edge_degrees
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn knn(&self) -> Option<usize> {
        self.knn
    }

    /// Vertices with positive incidence in hyperedge `e`, ascending.
    pub fn members(&self, e: usize) -> Vec<usize> {
        let h = self.incidence.as_dmatrix();
        (0..self.n_vertices()).filter(|&v| h[(v, e)] > 0.0).collect()
    }

    fn check_degrees(&self) -> Result<()> {
        if let Some(v) = self.vertex_degrees.iter().position(|&d| !(d > 0.0)) {
            return Err(DldlError::DegenerateHypergraph(format!("vertex {v} has zero degree")));
        }
        if let Some(e) = self.edge_degrees.iter().position(|&d| !(d > 0.0)) {
            return Err(DldlError::DegenerateHypergraph(format!("hyperedge {e} is empty")));
        }
        Ok(())
    }
}

/// Normalized hypergraph Laplacian `I - Dv^-1/2 H W De^-1 H^T Dv^-1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    delta: Matrix,
}

impl Laplacian {
    /// Wraps a caller-supplied symmetric matrix (e.g. the zero Laplacian in
    /// ablations).
    pub fn from_matrix(delta: Matrix) -> Result<Self> {
        if !delta.is_symmetric(crate::matrix::SYMMETRY_TOL) {
            return Err(invalid("Laplacian must be square and symmetric"));
        }
        Ok(Self { delta })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Ok(Self { delta: Matrix::zeros(n, n)? })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.delta
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        self.delta.as_dmatrix()
    }

    pub fn size(&self) -> usize {
        self.delta.rows()
    }

    /// Eigenvalues in ascending order. `O(N^3)`; only for diagnostics.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.delta.as_dmatrix().clone().symmetric_eigenvalues();
        let mut v: Vec<f64> = eig.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn squared_distance(x: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    x.column(a)
        .iter()
        .zip(x.column(b).iter())
        .map(|(p, q)| (p - q) * (p - q))
        .sum()
}

/// Nearest neighbours of every sample under Euclidean distance, excluding
/// the sample itself. Ties go to the smaller sample index.
pub fn knn_indices(features: &FeatureMatrix, k: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = features.n_samples();
    if n < 2 {
        return Err(invalid(format!("need at least 2 samples for a kNN hypergraph, got {n}")));
    }
    if k < 1 || k > n - 1 {
        return Err(invalid(format!("knn must be in [1, {}], got {k}", n - 1)));
    }
    let x = features.as_dmatrix();
    let mut dist = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let d = squared_distance(x, a, b);
            dist[(a, b)] = d;
            dist[(b, a)] = d;
        }
    }
    Ok((0..n)
        .map(|c| {
            let mut others: Vec<usize> = (0..n).filter(|&v| v != c).collect();
            others.sort_by(|&u, &v| {
                dist[(c, u)]
                    .partial_cmp(&dist[(c, v)])
                    .unwrap_or(Ordering::Equal)
                    .then(u.cmp(&v))
            });
            others.truncate(k);
            others.into_iter().map(|v| (v, dist[(c, v)].sqrt())).collect()
        })
        .collect())
}

/// One hyperedge per sample: the sample itself plus its `k` nearest
/// neighbours, with incidence `exp(-(dist / sigma)^2)` and unit weights.
///
/// `sigma` is the mean neighbour-to-centroid distance over all hyperedges
/// (1 if that mean is below `1e-12`).
pub fn build_knn_hypergraph(features: &FeatureMatrix, k: usize) -> Result<Hypergraph> {
    let neighbours = knn_indices(features, k)?;
    let n = features.n_samples();

    let total: f64 = neighbours.iter().flatten().map(|&(_, d)| d).sum();
    let mean = total / (n * k) as f64;
    let sigma = if mean < SIGMA_FLOOR { 1.0 } else { mean };

    let mut h = DMatrix::zeros(n, n);
    for (centroid, members) in neighbours.iter().enumerate() {
        h[(centroid, centroid)] = 1.0;
        for &(v, d) in members {
            let z = d / sigma;
            h[(v, centroid)] = (-z * z).exp();
        }
    }
    let mut g = Hypergraph::from_incidence(Matrix::from_dmatrix(h)?, vec![1.0; n])?;
    g.sigma = sigma;
    g.knn = Some(k);
    Ok(g)
}

/// Normalized Laplacian of a hypergraph. Fails on any zero vertex or edge
/// degree.
pub fn compute_laplacian(g: &Hypergraph) -> Result<Laplacian> {
    g.check_degrees()?;
    let h = g.incidence.as_dmatrix();
    let n = g.n_vertices();
    let inv_sqrt_dv: Vec<f64> = g.vertex_degrees.iter().map(|d| 1.0 / d.sqrt()).collect();

    // Theta = Dv^-1/2 H W De^-1 H^T Dv^-1/2
    let mut scaled = h.clone();
    for (e, mut col) in scaled.column_iter_mut().enumerate() {
        col *= g.edge_weights[e] / g.edge_degrees[e];
    }
    let mut theta = scaled * h.transpose();
    for u in 0..n {
        for v in 0..n {
            theta[(u, v)] *= inv_sqrt_dv[u] * inv_sqrt_dv[v];
        }
    }
    let mut delta = DMatrix::identity(n, n) - theta;
    // Exact symmetry; the product above is only symmetric up to rounding.
    for u in 0..n {
        for v in (u + 1)..n {
            let avg = 0.5 * (delta[(u, v)] + delta[(v, u)]);
            delta[(u, v)] = avg;
            delta[(v, u)] = avg;
        }
    }
    Ok(Laplacian { delta: Matrix::from_dmatrix(delta)? })
}

/// Laplacian of the degree-2 hypergraph equivalent to a simple graph.
pub fn graph_laplacian_of_edges(edges: &[(usize, usize)], n: usize) -> Result<Laplacian> {
    if n == 0 {
        return Err(invalid("graph must have at least one vertex"));
    }
    if edges.is_empty() {
        return Err(DldlError::DegenerateHypergraph("graph has no edges".into()));
    }
    let mut h = DMatrix::zeros(n, edges.len());
    for (e, &(a, b)) in edges.iter().enumerate() {
        if a >= n || b >= n {
            return Err(invalid(format!("edge ({a}, {b}) out of range for {n} vertices")));
        }
        if a == b {
            return Err(invalid(format!("self-pair ({a}, {b}) is not an edge")));
        }
        h[(a, e)] = 1.0;
        h[(b, e)] = 1.0;
    }
    let g = Hypergraph::from_incidence(Matrix::from_dmatrix(h)?, vec![1.0; edges.len()])?;
    compute_laplacian(&g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Stats {
    fn of(v: &[f64]) -> Self {
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        Self { min, mean, max }
    }
}

/// Plain-text diagnostics for a built hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphSummary {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub knn: Option<usize>,
    pub sigma: f64,
    pub vertex_degree: Stats,
    pub edge_degree: Stats,
    /// Smallest and largest Laplacian eigenvalue, if requested.
    pub eigen_range: Option<(f64, f64)>,
}

impl HypergraphSummary {
    pub fn new(g: &Hypergraph, lap: Option<&Laplacian>) -> Self {
        let eigen_range = lap.map(|l| {
            let ev = l.eigenvalues();
            (ev[0], ev[ev.len() - 1])
        });
        Self {
            n_vertices: g.n_vertices(),
            n_edges: g.n_edges(),
            knn: g.knn,
            sigma: g.sigma,
            vertex_degree: Stats::of(&g.vertex_degrees),
            edge_degree: Stats::of(&g.edge_degrees),
            eigen_range,
        }
    }
}

impl fmt::Display for HypergraphSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices (N): {}", self.n_vertices)?;
        writeln!(f, "hyperedges (|E|): {}", self.n_edges)?;
        match self.knn {
            Some(k) => writeln!(f, "knn (k): {k}")?,
            None => writeln!(f, "knn (k): n/a")?,
        }
        writeln!(f, "sigma: {}", self.sigma)?;
        let Stats { min, mean, max } = self.vertex_degree;
        writeln!(f, "vertex degree min/mean/max: {min:.6} / {mean:.6} / {max:.6}")?;
        let Stats { min, mean, max } = self.edge_degree;
        write!(f, "edge degree min/mean/max: {min:.6} / {mean:.6} / {max:.6}")?;
        if let Some((lo, hi)) = self.eigen_range {
            write!(f, "\nlaplacian eigenvalue min/max: {lo:.6e} / {hi:.6e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::trace_quadratic;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn features(points: &[Vec<f64>]) -> FeatureMatrix {
        FeatureMatrix::from_samples(points).unwrap()
    }

    #[test]
    fn coincident_points() {
        let g = build_knn_hypergraph(&features(&[vec![1.0, 2.0], vec![1.0, 2.0]]), 1).unwrap();
        assert_eq!(g.incidence().as_dmatrix(), &DMatrix::from_element(2, 2, 1.0));
        assert_eq!(g.sigma(), 1.0);
    }

    #[test]
    fn collinear_membership() {
        let g = build_knn_hypergraph(&features(&[vec![0.0], vec![1.0], vec![10.0]]), 1).unwrap();
        assert_eq!(g.members(0), vec![0, 1]);
        assert_eq!(g.members(1), vec![0, 1]);
        assert_eq!(g.members(2), vec![1, 2]);
        for e in 0..3 {
            assert_eq!(g.incidence().get(e, e), 1.0);
        }
        // sigma = mean of neighbour distances {1, 1, 9}
        assert_abs_diff_eq!(g.sigma(), 11.0 / 3.0, epsilon = 1e-15);
        assert_eq!(g.edge_weights(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn membership_matches_exhaustive_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let pts: Vec<Vec<f64>> =
                (0..5).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
            let g = build_knn_hypergraph(&features(&pts), 2).unwrap();
            for c in 0..5 {
                // brute force: rank every other point by distance
                let mut ranked: Vec<(f64, usize)> = (0..5)
                    .filter(|&v| v != c)
                    .map(|v| ((pts[v][0] - pts[c][0]).hypot(pts[v][1] - pts[c][1]), v))
                    .collect();
                ranked.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut expected: Vec<usize> = ranked[..2].iter().map(|&(_, v)| v).collect();
                expected.push(c);
                expected.sort();
                assert_eq!(g.members(c), expected);
            }
        }
    }

    #[test]
    fn knn_range_is_checked() {
        let f = features(&[vec![0.0], vec![1.0], vec![2.0]]);
        assert!(build_knn_hypergraph(&f, 0).is_err());
        assert!(build_knn_hypergraph(&f, 3).is_err());
        assert!(build_knn_hypergraph(&features(&[vec![0.0]]), 1).is_err());
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let f = features(&[vec![0.0], vec![1.0], vec![-1.0], vec![1.0]]);
        let nn = knn_indices(&f, 1).unwrap();
        assert_eq!(nn[0][0].0, 1);
        assert_eq!(nn[1][0].0, 3);
        assert_eq!(nn[3][0].0, 1);
    }

    #[test]
    fn built_hypergraph_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<Vec<f64>> = (0..15).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let g = build_knn_hypergraph(&features(&pts), 4).unwrap();
        assert_eq!(g.n_edges(), 15);
        let h = g.incidence().as_dmatrix();
        for e in 0..15 {
            assert_eq!(g.members(e).len(), 5);
            assert_eq!(g.edge_degrees()[e], h.column(e).sum());
        }
        for v in 0..15 {
            assert!(g.vertex_degrees()[v] > 0.0);
            assert!(h.row(v).iter().any(|&x| x > 0.0));
        }
    }

    #[test]
    fn self_loop_laplacian_is_zero() {
        let g = Hypergraph::from_incidence(Matrix::identity(4).unwrap(), vec![1.0; 4]).unwrap();
        let lap = compute_laplacian(&g).unwrap();
        assert_eq!(lap.matrix().max_abs(), 0.0);
    }

    #[test]
    fn single_binary_edge() {
        let g = Hypergraph::from_incidence(Matrix::from_row_slice(2, 1, &[1.0, 1.0]).unwrap(), vec![1.0]).unwrap();
        assert_eq!(g.edge_degrees(), &[2.0]);
        assert_eq!(g.vertex_degrees(), &[1.0, 1.0]);
        let lap = compute_laplacian(&g).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert_abs_diff_eq!(lap.as_dmatrix(), &expected, epsilon = 1e-15);
        assert_eq!(graph_laplacian_of_edges(&[(0, 1)], 2).unwrap(), lap);
    }

    #[test]
    fn degenerate_graphs_are_rejected() {
        assert!(matches!(graph_laplacian_of_edges(&[], 3), Err(DldlError::DegenerateHypergraph(_))));
        assert!(matches!(graph_laplacian_of_edges(&[(0, 1)], 3), Err(DldlError::DegenerateHypergraph(_))));
        assert!(matches!(graph_laplacian_of_edges(&[(0, 3)], 3), Err(DldlError::InvalidArgument(_))));
        assert!(matches!(graph_laplacian_of_edges(&[(1, 1)], 3), Err(DldlError::InvalidArgument(_))));
        let g = Hypergraph::from_incidence(Matrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap(), vec![1.0; 2])
            .unwrap();
        assert!(compute_laplacian(&g).is_err());
    }

    #[test]
    fn hand_built_validation() {
        let h = Matrix::from_row_slice(2, 1, &[1.0, 1.0]).unwrap();
        assert!(Hypergraph::from_incidence(h.clone(), vec![]).is_err());
        assert!(Hypergraph::from_incidence(h.clone(), vec![0.0]).is_err());
        let h2 = Matrix::from_row_slice(2, 1, &[1.5, 1.0]).unwrap();
        assert!(Hypergraph::from_incidence(h2, vec![1.0]).is_err());
    }

    #[test]
    fn laplacian_of_knn_graph_is_psd_with_unit_diagonal_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let lap = compute_laplacian(&build_knn_hypergraph(&features(&pts), 5).unwrap()).unwrap();
        assert!(lap.matrix().is_symmetric(0.0));
        assert!(lap.eigenvalues()[0] >= -1e-10);
        for v in 0..20 {
            let d = lap.matrix().get(v, v);
            assert!((-1e-10..=1.0 + 1e-10).contains(&d));
        }
        for _ in 0..50 {
            let m = Matrix::from_fn(3, 20, |_, _| rng.random_range(-1.0..1.0)).unwrap();
            let fro2 = m.as_dmatrix().norm_squared();
            assert!(trace_quadratic(lap.matrix(), &m).unwrap() >= -1e-10 * fro2);
        }
    }

    #[test]
    fn summary_mentions_every_field() {
        let f = features(&[vec![0.0], vec![1.0], vec![3.0], vec![4.0], vec![9.0]]);
        let g = build_knn_hypergraph(&f, 2).unwrap();
        let lap = compute_laplacian(&g).unwrap();
        let text = HypergraphSummary::new(&g, Some(&lap)).to_string();
        assert!(text.contains("hyperedges (|E|): 5"));
        assert!(text.contains("knn (k): 2"));
        assert!(text.contains("laplacian eigenvalue"));
        let text = HypergraphSummary::new(&g, None).to_string();
        assert!(!text.contains("eigenvalue"));
    }
}
