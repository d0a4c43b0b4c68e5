use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{embed, extract_features, Block, FeatureConfig, LinearEmbedder};
use crate::error::{Error, Result};
use crate::imageproc::ImageBuffer;
use crate::tokenizer::tokenize_grid;

/// Embedding width used by [`verify_embedding_equivalence`].
pub const EQUIVALENCE_OUT_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `max |E - E*| / max |E*|` between the two embeddings.
    pub max_rel_deviation: f64,
    /// Common diagonal value of the position block.
    pub scale: f64,
    /// Off-diagonal mass of the position block over its total mass.
    pub off_diagonal_mass: f64,
}

/// Compares patch embeddings `z L + q` of a random image against the
/// embedding of its region features, for square patches of side `rho` on an
/// `rho^2 x rho^2` image with `rho` bins.
///
/// The feature path uses the weight `[L / 2 ; (Q + colsum(L) / 2) / c]`,
/// undoing the `x * 2 - 1` color rescale and the position scale `c`. The
/// kernel bandwidth is capped at half a pixel pitch so that no mass leaks
/// between patches.
pub fn verify_embedding_equivalence(shape: (usize, usize), rho: usize, seed: u64) -> Result<EquivalenceReport> {
    let (h, w) = shape;
    if rho == 0 || h != rho * rho || w != rho * rho {
        return Err(Error::InvalidParameter(format!(
            "need an image of {0}x{0} for patch size {rho}, got {h}x{w}",
            rho * rho
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let img = ImageBuffer::from_fn(h, w, 3, |_, _, _| rng.gen::<f64>())?;
    let n = rho * rho;
    let m = 3 * n;
    let l = DMatrix::from_fn(m, EQUIVALENCE_OUT_DIM, |_, _| rng.gen_range(-1.0..1.0));
    let q = DMatrix::from_fn(n, EQUIVALENCE_OUT_DIM, |_, _| rng.gen_range(-1.0..1.0));

    // Canonical path: raw patch vectors straight from the pixels.
    let z = DMatrix::from_fn(n, m, |t, k| {
        let (py, px) = (t / rho, t % rho);
        let (c, y, x) = (k / n, (k % n) / rho, k % rho);
        img.get(py * rho + y, px * rho + x, c)
    });
    let reference = &z * &l + &q;

    let partition = tokenize_grid(h, w, rho)?;
    let config = FeatureConfig {
        bins: rho,
        bandwidth: FeatureConfig::default().bandwidth.min(1.0 / h as f64),
        include_gradients: false,
    };
    let features = extract_features(&img, &partition, &config)?;

    let (mut diag, mut off, mut total) = (0.0, 0.0, 0.0);
    for t in 0..n {
        for (k, &v) in features.block(t, Block::Position).unwrap().iter().enumerate() {
            let v = v as f64;
            total += v;
            if k == t {
                diag += v;
            } else {
                off += v;
            }
        }
    }
    let scale = diag / n as f64;
    if !(scale > 0.0) {
        return Err(Error::Degenerate("position block has no diagonal mass".into()));
    }

    let colsum = l.row_sum();
    let mut weight = DMatrix::zeros(m + n, EQUIVALENCE_OUT_DIM);
    weight.view_mut((0, 0), (m, EQUIVALENCE_OUT_DIM)).copy_from(&(&l * 0.5));
    for t in 0..n {
        let row = (q.row(t) + &colsum * 0.5) / scale;
        weight.row_mut(m + t).copy_from(&row);
    }
    let modular = embed(&features, &LinearEmbedder::new(weight)?)?;

    let max_ref = reference.amax();
    let max_dev = (&modular - &reference).amax();
    Ok(EquivalenceReport {
        max_rel_deviation: if max_ref > 0.0 { max_dev / max_ref } else { max_dev },
        scale,
        off_diagonal_mass: off / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_is_equivalent() {
        for seed in 0..3 {
            let r = verify_embedding_equivalence((16, 16), 4, seed).unwrap();
            assert!(r.max_rel_deviation <= 1e-5, "{r:?}");
            assert!(r.off_diagonal_mass <= 1e-6, "{r:?}");
            assert!((r.scale - 16.0).abs() < 1e-3);
        }
    }

    #[test]
    fn trivial_patch_size() {
        let r = verify_embedding_equivalence((1, 1), 1, 0).unwrap();
        assert!(r.max_rel_deviation <= 1e-5);
    }

    #[test]
    fn rejects_non_square_layouts() {
        assert!(verify_embedding_equivalence((16, 12), 4, 0).is_err());
        assert!(verify_embedding_equivalence((15, 15), 4, 0).is_err());
        assert!(verify_embedding_equivalence((0, 0), 0, 0).is_err());
    }
}
