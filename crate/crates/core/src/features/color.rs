use crate::error::Result;
use crate::imageproc::{resample_with, BBox, ImageBuffer};
use crate::tokenizer::PartitionLevel;

use super::histogram::check_region;
use super::FeatureConfig;

/// Masked `bins x bins` resample of a region's bounding box in `[0, 1]`,
/// channel-major. Gray images are replicated to three channels.
pub(crate) fn interpolated_patch(
    img: &ImageBuffer,
    labels: &[u32],
    region: u32,
    bbox: BBox,
    bins: usize,
) -> Result<Vec<f64>> {
    let crop = resample_with(img, bbox, bins, |i| labels[i] == region)?;
    let ch = img.channels();
    let plane = bins * bins;
    let mut out = vec![0.0; 3 * plane];
    for c in 0..3 {
        let src = if ch == 1 { 0 } else { c };
        for (o, px) in out[c * plane..(c + 1) * plane].iter_mut().zip(crop.chunks_exact(ch)) {
            *o = px[src];
        }
    }
    Ok(out)
}

pub(crate) fn check_image(img: &ImageBuffer, partition: &PartitionLevel) -> Result<()> {
    if img.height() != partition.height() || img.width() != partition.width() {
        return Err(crate::error::Error::Shape(format!(
            "image is {}x{}, partition is {}x{}",
            img.height(),
            img.width(),
            partition.height(),
            partition.width()
        )));
    }
    if img.channels() != 1 && img.channels() != 3 {
        return Err(crate::error::Error::UnsupportedImage(format!(
            "color features need 1 or 3 channels, got {}",
            img.channels()
        )));
    }
    Ok(())
}

/// Color block of one region: its bounding box with outside pixels zeroed,
/// bilinearly resampled to `bins x bins`, mapped to `[-1, 1]` and vectorized
/// channel-major, then row-major.
pub fn color_features(
    img: &ImageBuffer,
    partition: &PartitionLevel,
    region: usize,
    config: &FeatureConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    check_image(img, partition)?;
    check_region(partition, region)?;
    let bbox = partition.bboxes()[region];
    let mut v = interpolated_patch(img, partition.labels(), region as u32, bbox, config.bins)?;
    for x in &mut v {
        *x = *x * 2.0 - 1.0;
    }
    Ok(v)
}
