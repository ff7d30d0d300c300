use crate::error::{invalid, Result};

/// Hyperparameters of the alternating solver.
///
/// Defaults are the tuned setup for 21-class land-use scenes with 2048-d
/// embeddings: `alpha = beta = 2^-4`, `delta = 2^2`, 200 atoms, 10 neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Weight of the l1 penalty on the codes (the objective carries `2 * alpha`).
    pub alpha: f64,
    /// Weight of the label-consistency and label-prior terms.
    pub beta: f64,
    /// Weight of the hypergraph smoothness term on the codes.
    pub delta_w: f64,
    /// Number of dictionary atoms.
    pub dict_size: usize,
    /// Neighbours per hyperedge.
    pub knn: usize,
    pub max_iter: usize,
    /// Relative objective decrease below which the outer loop stops.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            alpha: 0.0625,
            beta: 0.0625,
            delta_w: 4.0,
            dict_size: 200,
            knn: 10,
            max_iter: 100,
            rel_tol: 1e-6,
            seed: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("delta", self.delta_w)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.dict_size < 1 {
            return Err(invalid("dictionary size must be >= 1"));
        }
        if self.knn < 1 {
            return Err(invalid("knn must be >= 1"));
        }
        if self.max_iter < 1 {
            return Err(invalid("max_iter must be >= 1"));
        }
        if !(self.rel_tol > 0.0) || self.rel_tol.is_nan() {
            return Err(invalid(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let hp = HyperParams::default();
        hp.validate().unwrap();
        assert_eq!(hp.alpha, 2f64.powi(-4));
        assert_eq!(hp.beta, 2f64.powi(-4));
        assert_eq!(hp.delta_w, 4.0);
        assert_eq!((hp.dict_size, hp.knn, hp.max_iter), (200, 10, 100));
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            HyperParams { alpha: -1.0, ..Default::default() },
            HyperParams { beta: f64::NAN, ..Default::default() },
            HyperParams { dict_size: 0, ..Default::default() },
            HyperParams { knn: 0, ..Default::default() },
            HyperParams { max_iter: 0, ..Default::default() },
            HyperParams { rel_tol: 0.0, ..Default::default() },
        ];
        for hp in bad {
            assert!(hp.validate().is_err(), "{hp:?}");
        }
        // infinite tolerance is a legal "run one iteration" setting
        HyperParams { rel_tol: f64::INFINITY, ..Default::default() }.validate().unwrap();
    }
}
