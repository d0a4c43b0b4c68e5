use crate::error::{Error, Result};
use crate::imageproc::GradientField;
use crate::tokenizer::PartitionLevel;

use super::FeatureConfig;

/// Gaussian weights of one coordinate over `bins` uniform bin centers on
/// `[-1, 1]`, normalized to sum 1.
#[derive(Clone, Debug)]
pub(crate) struct Kernel1d {
    centers: Vec<f64>,
    inv_two_var: f64,
}

impl Kernel1d {
    pub(crate) fn new(config: &FeatureConfig) -> Self {
        let b = config.bins as f64;
        Self {
            centers: (0..config.bins).map(|k| -1.0 + (2 * k + 1) as f64 / b).collect(),
            inv_two_var: 1.0 / (2.0 * config.bandwidth * config.bandwidth),
        }
    }

    /// Writes the normalized weights of coordinate `c` into `out`.
    pub(crate) fn weights_into(&self, c: f64, out: &mut [f64]) {
        // Shift exponents by the nearest center so the largest weight is 1
        // even for tiny bandwidths.
        let mut min_e = f64::INFINITY;
        for (o, &m) in out.iter_mut().zip(&self.centers) {
            let e = (c - m) * (c - m) * self.inv_two_var;
            *o = e;
            min_e = min_e.min(e);
        }
        let mut sum = 0.0;
        for o in out.iter_mut() {
            *o = (min_e - *o).exp();
            sum += *o;
        }
        for o in out.iter_mut() {
            *o /= sum;
        }
    }

    /// Weights for each of `n` pixel centers along an axis of length `n`.
    pub(crate) fn axis_table(&self, n: usize) -> Vec<f64> {
        let b = self.centers.len();
        let mut table = vec![0.0; n * b];
        for (i, row) in table.chunks_exact_mut(b).enumerate() {
            self.weights_into(pixel_coordinate(i, n), row);
        }
        table
    }
}

/// Center of pixel `i` on an axis of `n` pixels, mapped to `[-1, 1]`.
#[inline]
pub fn pixel_coordinate(i: usize, n: usize) -> f64 {
    -1.0 + (2 * i + 1) as f64 / n as f64
}

pub(crate) fn check_region(partition: &PartitionLevel, region: usize) -> Result<()> {
    if region >= partition.n_regions() {
        return Err(Error::EmptyRegion(region));
    }
    Ok(())
}

/// Positional histogram from precomputed per-row and per-column kernel
/// tables. `pixels` must be sorted by index.
pub(crate) fn positional_from_tables(
    pixels: &[u32],
    width: usize,
    bins: usize,
    row_table: &[f64],
    col_table: &[f64],
    out: &mut [f64],
) {
    let mut row_sum = vec![0.0; bins];
    let mut i = 0;
    while i < pixels.len() {
        let y = pixels[i] as usize / width;
        row_sum.fill(0.0);
        while i < pixels.len() && pixels[i] as usize / width == y {
            let x = pixels[i] as usize % width;
            for (s, k) in row_sum.iter_mut().zip(&col_table[x * bins..(x + 1) * bins]) {
                *s += k;
            }
            i += 1;
        }
        let ky = &row_table[y * bins..(y + 1) * bins];
        for (r, &wy) in ky.iter().enumerate() {
            if wy == 0.0 {
                continue;
            }
            for (o, &s) in out[r * bins..(r + 1) * bins].iter_mut().zip(&row_sum) {
                *o += wy * s;
            }
        }
    }
}

pub(crate) fn gradient_into(pixels: &[u32], grad: &GradientField, kernel: &Kernel1d, bins: usize, out: &mut [f64]) {
    let mut ky = vec![0.0; bins];
    let mut kx = vec![0.0; bins];
    for &p in pixels {
        let (dy, dx) = grad.at(p as usize);
        kernel.weights_into(dy, &mut ky);
        kernel.weights_into(dx, &mut kx);
        for (r, &wy) in ky.iter().enumerate() {
            if wy == 0.0 {
                continue;
            }
            for (o, &wx) in out[r * bins..(r + 1) * bins].iter_mut().zip(&kx) {
                *o += wy * wx;
            }
        }
    }
}

fn region_pixels(partition: &PartitionLevel, region: usize) -> Vec<u32> {
    partition
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l as usize == region)
        .map(|(i, _)| i as u32)
        .collect()
}

/// Joint Gaussian histogram of the pixel-center coordinates of `region`,
/// normalized to `[-1, 1]` over the full image. Every pixel deposits total
/// mass 1, so the histogram sums to the region size. Row-major `bins x bins`
/// with rows indexing the vertical coordinate.
pub fn positional_histogram(partition: &PartitionLevel, region: usize, config: &FeatureConfig) -> Result<Vec<f64>> {
    config.validate()?;
    check_region(partition, region)?;
    let kernel = Kernel1d::new(config);
    let rows = kernel.axis_table(partition.height());
    let cols = kernel.axis_table(partition.width());
    let mut out = vec![0.0; config.bins * config.bins];
    positional_from_tables(
        &region_pixels(partition, region),
        partition.width(),
        config.bins,
        &rows,
        &cols,
        &mut out,
    );
    Ok(out)
}

/// Joint Gaussian histogram of the `(dy, dx)` gradients inside `region`,
/// with the same kernel and normalization as [`positional_histogram`].
pub fn gradient_histogram(
    grad: &GradientField,
    partition: &PartitionLevel,
    region: usize,
    config: &FeatureConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    check_region(partition, region)?;
    if grad.height != partition.height() || grad.width != partition.width() {
        return Err(Error::Shape(format!(
            "gradient field is {}x{}, partition is {}x{}",
            grad.height,
            grad.width,
            partition.height(),
            partition.width()
        )));
    }
    let mut out = vec![0.0; config.bins * config.bins];
    gradient_into(
        &region_pixels(partition, region),
        grad,
        &Kernel1d::new(config),
        config.bins,
        &mut out,
    );
    Ok(out)
}
