//! Fixed-size features for irregular regions and the linear embedder.
//!
//! Each region becomes `[color | position | gradient]`: a masked, resampled
//! color patch (`3 bins^2`), a kernel histogram of its pixel positions
//! (`bins^2`) and optionally a kernel histogram of its Scharr gradients
//! (`bins^2`).

mod color;
mod embed;
mod equivalence;
mod histogram;

pub use color::color_features;
pub use embed::{embed, LinearEmbedder};
pub use equivalence::{verify_embedding_equivalence, EquivalenceReport, EQUIVALENCE_OUT_DIM};
pub use histogram::{gradient_histogram, pixel_coordinate, positional_histogram};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imageproc::{scharr_gradients, ImageBuffer};
use crate::tokenizer::PartitionLevel;

use color::{check_image, interpolated_patch};
use histogram::{gradient_into, positional_from_tables, Kernel1d};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureConfig {
    /// Bins per spatial direction.
    pub bins: usize,
    /// Kernel standard deviation in normalized `[-1, 1]` units.
    pub bandwidth: f64,
    pub include_gradients: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            bins: 16,
            bandwidth: 0.02,
            include_gradients: true,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::InvalidParameter("bins must be at least 1".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth = {} must be positive",
                self.bandwidth
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        let b2 = self.bins * self.bins;
        if self.include_gradients {
            5 * b2
        } else {
            4 * b2
        }
    }
}

/// Named slice of a feature row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Color,
    Position,
    Gradient,
}

/// Row-major `N x D` feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenFeatures {
    n_tokens: usize,
    bins: usize,
    has_gradients: bool,
    data: Vec<f32>,
}

impl TokenFeatures {
    pub fn new(n_tokens: usize, bins: usize, has_gradients: bool, data: Vec<f32>) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParameter("bins must be at least 1".into()));
        }
        let dim = bins * bins * if has_gradients { 5 } else { 4 };
        if data.len() != n_tokens * dim {
            return Err(Error::Shape(format!(
                "expected {n_tokens} x {dim} = {} values, got {}",
                n_tokens * dim,
                data.len()
            )));
        }
        Ok(Self {
            n_tokens,
            bins,
            has_gradients,
            data,
        })
    }

    /// Infers `bins` from `dim` (`4 b^2` or `5 b^2`).
    pub fn from_dim(n_tokens: usize, dim: usize, has_gradients: bool, data: Vec<f32>) -> Result<Self> {
        let per = if has_gradients { 5 } else { 4 };
        let bins = ((dim / per) as f64).sqrt().round() as usize;
        if bins == 0 || bins * bins * per != dim {
            return Err(Error::Shape(format!("dimension {dim} is not {per} times a square")));
        }
        Self::new(n_tokens, bins, has_gradients, data)
    }

    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn has_gradients(&self) -> bool {
        self.has_gradients
    }

    pub fn dim(&self) -> usize {
        self.bins * self.bins * if self.has_gradients { 5 } else { 4 }
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    /// Column range of `block`, if present.
    pub fn block_range(&self, block: Block) -> Option<std::ops::Range<usize>> {
        let b2 = self.bins * self.bins;
        match block {
            Block::Color => Some(0..3 * b2),
            Block::Position => Some(3 * b2..4 * b2),
            Block::Gradient if self.has_gradients => Some(4 * b2..5 * b2),
            Block::Gradient => None,
        }
    }

    pub fn block(&self, i: usize, block: Block) -> Option<&[f32]> {
        self.block_range(block).map(|r| &self.row(i)[r])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.n_tokens, self.dim(), self.data.iter().map(|&v| v as f64))
    }
}

/// Features for every region of `partition`, rows in label order. `img`
/// should be the unsmoothed image.
pub fn extract_features(
    img: &ImageBuffer,
    partition: &PartitionLevel,
    config: &FeatureConfig,
) -> Result<TokenFeatures> {
    config.validate()?;
    check_image(img, partition)?;
    let grad = if config.include_gradients {
        Some(scharr_gradients(img)?)
    } else {
        None
    };
    let (bins, dim) = (config.bins, config.dim());
    let b2 = bins * bins;
    let kernel = Kernel1d::new(config);
    let rows = kernel.axis_table(partition.height());
    let cols = kernel.axis_table(partition.width());
    let pixels = partition.region_pixels();
    let bboxes = partition.bboxes();
    let labels = partition.labels();

    let features: Vec<Vec<f32>> = (0..partition.n_regions())
        .into_par_iter()
        .map(|r| {
            let mut row = Vec::with_capacity(dim);
            let color = interpolated_patch(img, labels, r as u32, bboxes[r], bins)?;
            row.extend(color.iter().map(|&v| (v * 2.0 - 1.0) as f32));
            let mut hist = vec![0.0; b2];
            positional_from_tables(pixels.of(r), partition.width(), bins, &rows, &cols, &mut hist);
            row.extend(hist.iter().map(|&v| v as f32));
            if let Some(g) = &grad {
                hist.fill(0.0);
                gradient_into(pixels.of(r), g, &kernel, bins, &mut hist);
                row.extend(hist.iter().map(|&v| v as f32));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    TokenFeatures::new(partition.n_regions(), bins, config.include_gradients, features.concat())
}
