use crate::error::{Error, Result};
use crate::imageproc::ImageBuffer;
use crate::tokenizer::PartitionLevel;

/// Share of the luminance variance explained by region means:
/// `1 - sum_S sum_{i in S} (x_i - mean_S)^2 / sum_i (x_i - mean)^2`.
/// A constant image gives 1.
pub fn explained_variation(img: &ImageBuffer, partition: &PartitionLevel) -> Result<f64> {
    if img.height() != partition.height() || img.width() != partition.width() {
        return Err(Error::Shape(format!(
            "image is {}x{}, partition is {}x{}",
            img.height(),
            img.width(),
            partition.height(),
            partition.width()
        )));
    }
    let lum = img.luminance();
    if lum.iter().all(|&v| v == lum[0]) {
        return Ok(1.0);
    }
    let n = lum.len() as f64;
    let mean = lum.iter().sum::<f64>() / n;
    let total: f64 = lum.iter().map(|v| (v - mean) * (v - mean)).sum();
    let k = partition.n_regions();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&l, &v) in partition.labels().iter().zip(&lum) {
        sums[l as usize] += v;
        counts[l as usize] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(&s, &c)| s / c as f64).collect();
    let within: f64 = partition
        .labels()
        .iter()
        .zip(&lum)
        .map(|(&l, &v)| (v - means[l as usize]) * (v - means[l as usize]))
        .sum();
    Ok((1.0 - within / total).clamp(0.0, 1.0))
}
