use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TokenFeatures;
use crate::error::{Error, Result};

/// Linear map from `D` feature dimensions to `D'` embedding dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEmbedder {
    weight: DMatrix<f64>,
}

impl LinearEmbedder {
    /// `weight` is `D x D'`.
    pub fn new(weight: DMatrix<f64>) -> Result<Self> {
        if let Some(v) = weight.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("embedder weight {v} is not finite")));
        }
        Ok(Self { weight })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            weight: DMatrix::identity(dim, dim),
        }
    }

    /// Weights drawn uniformly from `[-1, 1)`.
    pub fn random(in_dim: usize, out_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            weight: DMatrix::from_fn(in_dim, out_dim, |_, _| rng.gen_range(-1.0..1.0)),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.ncols()
    }

    pub fn weight(&self) -> &DMatrix<f64> {
        &self.weight
    }
}

/// `N x D'` token embeddings `F W`.
pub fn embed(features: &TokenFeatures, embedder: &LinearEmbedder) -> Result<DMatrix<f64>> {
    if features.dim() != embedder.in_dim() {
        return Err(Error::Shape(format!(
            "features have {} columns, embedder expects {}",
            features.dim(),
            embedder.in_dim()
        )));
    }
    Ok(features.to_matrix() * &embedder.weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feats() -> TokenFeatures {
        let data: Vec<f32> = (0..8).map(|i| i as f32 * 0.25 - 1.0).collect();
        TokenFeatures::new(2, 1, false, data).unwrap()
    }

    #[test]
    fn identity_keeps_features() {
        let f = feats();
        let e = embed(&f, &LinearEmbedder::identity(4)).unwrap();
        assert_eq!(e, f.to_matrix());
    }

    #[test]
    fn zero_weight_gives_zeros() {
        let e = embed(&feats(), &LinearEmbedder::new(DMatrix::zeros(4, 3)).unwrap()).unwrap();
        assert!(e.iter().all(|&v| v == 0.0));
        assert_eq!(e.shape(), (2, 3));
    }

    #[test]
    fn matches_naive_product() {
        let f = feats();
        let w = LinearEmbedder::random(4, 2, 7);
        let e = embed(&f, &w).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += f.row(i)[k] as f64 * w.weight()[(k, j)];
                }
                assert!((e[(i, j)] - acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_mismatch_and_non_finite() {
        assert!(embed(&feats(), &LinearEmbedder::identity(3)).is_err());
        assert!(LinearEmbedder::new(DMatrix::from_element(1, 1, f64::NAN)).is_err());
    }
}
