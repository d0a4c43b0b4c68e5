//! Raster primitives: loading, contrast normalization, edge-preserving
//! diffusion, Scharr gradients and masked bilinear resampling.
//!
//! Images are stored interleaved (`HWC`, row-major) as `f64`.

mod diffusion;
mod gradient;
mod load;
mod normalize;
mod resample;

pub use diffusion::{anisotropic_diffuse, DiffusionParams};
pub use gradient::{scharr_gradients, GradientField, SCHARR_NORM};
pub use load::{load_image, save_gray_png, save_rgb_png};
pub use normalize::{kumaraswamy_normalize, NormalizationParams};
pub(crate) use resample::resample_with;
pub use resample::{bilinear_resample_masked, BBox};

use crate::error::{Error, Result};

/// A `C`-channel raster with values inside a declared range.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    height: usize,
    width: usize,
    channels: usize,
    range: (f64, f64),
    data: Vec<f64>,
}

impl ImageBuffer {
    /// Builds an image whose values must lie in `[0, 1]`.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_range(height, width, channels, data, (0.0, 1.0))
    }

    pub fn with_range(height: usize, width: usize, channels: usize, data: Vec<f64>, range: (f64, f64)) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::Shape(format!(
                "image dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::Shape(format!(
                "expected {} values for {height}x{width}x{channels}, got {}",
                height * width * channels,
                data.len()
            )));
        }
        let (lo, hi) = range;
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !(**v >= lo && **v <= hi)) {
            return Err(Error::OutOfRange { index, value, lo, hi });
        }
        Ok(Self {
            height,
            width,
            channels,
            range,
            data,
        })
    }

    /// Constant image.
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    /// Builds an image from a per-pixel function returning `channels` values.
    pub fn from_fn<F>(height: usize, width: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn n_pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// All channel values of one pixel.
    #[inline]
    pub fn pixel(&self, index: usize) -> &[f64] {
        &self.data[index * self.channels..(index + 1) * self.channels]
    }

    /// Per-pixel channel mean.
    pub fn luminance(&self) -> Vec<f64> {
        let c = self.channels as f64;
        self.data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / c)
            .collect()
    }

    /// Copy with every pixel where `keep` is false set to zero.
    pub fn masked(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.n_pixels() {
            return Err(Error::Shape(format!(
                "mask has {} entries, image has {} pixels",
                keep.len(),
                self.n_pixels()
            )));
        }
        let mut data = self.data.clone();
        for (px, &k) in data.chunks_exact_mut(self.channels).zip(keep) {
            if !k {
                px.fill(0.0);
            }
        }
        Ok(Self {
            data,
            range: (self.range.0.min(0.0), self.range.1.max(0.0)),
            ..*self
        })
    }

    /// Replaces the data with values produced by an operation that keeps the
    /// declared range.
    pub(crate) fn with_data_unchecked(&self, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        Self { data, ..*self }
    }
}
