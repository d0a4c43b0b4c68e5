use super::ImageBuffer;
use crate::error::{Error, Result};

/// Axis-aligned rectangle with inclusive pixel bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BBox {
    pub min_y: usize,
    pub min_x: usize,
    pub max_y: usize,
    pub max_x: usize,
}

impl BBox {
    pub fn point(y: usize, x: usize) -> Self {
        Self {
            min_y: y,
            min_x: x,
            max_y: y,
            max_x: x,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.max_y + 1 - self.min_y
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.max_x + 1 - self.min_x
    }

    #[inline]
    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min_y: self.min_y.min(other.min_y),
            min_x: self.min_x.min(other.min_x),
            max_y: self.max_y.max(other.max_y),
            max_x: self.max_x.max(other.max_x),
        }
    }

    #[inline]
    pub fn include(&mut self, y: usize, x: usize) {
        self.min_y = self.min_y.min(y);
        self.min_x = self.min_x.min(x);
        self.max_y = self.max_y.max(y);
        self.max_x = self.max_x.max(x);
    }
}

/// Source sample positions for half-pixel-centered resizing of `n_in` samples
/// to `n_out`: `(lower index, upper index, upper weight)`.
fn sample_grid(n_in: usize, n_out: usize) -> Vec<(usize, usize, f64)> {
    let scale = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (n_in - 1) as f64);
            let lo = src.floor() as usize;
            let hi = (lo + 1).min(n_in - 1);
            (lo, hi, src - lo as f64)
        })
        .collect()
}

/// Crops `bbox`, zeroes the pixels where `mask` is false and bilinearly
/// resamples the crop to `target x target` (half-pixel centers, clamped
/// borders). A crop that already has the target size is returned verbatim.
pub fn bilinear_resample_masked(img: &ImageBuffer, mask: &[bool], bbox: BBox, target: usize) -> Result<ImageBuffer> {
    if mask.len() != img.n_pixels() {
        return Err(Error::Shape(format!(
            "mask has {} entries, image has {} pixels",
            mask.len(),
            img.n_pixels()
        )));
    }
    let data = resample_with(img, bbox, target, |i| mask[i])?;
    let (lo, hi) = img.range();
    ImageBuffer::with_range(target, target, img.channels(), data, (lo.min(0.0), hi.max(0.0)))
}

/// Interleaved `target x target x C` resample of `bbox`; `keep(pixel index)`
/// decides which source pixels contribute their value (others count as 0).
pub(crate) fn resample_with<F>(img: &ImageBuffer, bbox: BBox, target: usize, keep: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> bool,
{
    if bbox.max_y < bbox.min_y || bbox.max_x < bbox.min_x {
        return Err(Error::InvalidParameter("empty bounding box".into()));
    }
    if bbox.max_y >= img.height() || bbox.max_x >= img.width() {
        return Err(Error::Shape(format!(
            "bounding box {bbox:?} exceeds {}x{} image",
            img.height(),
            img.width()
        )));
    }
    if target == 0 {
        return Err(Error::InvalidParameter("target size must be positive".into()));
    }
    let (bh, bw, ch, iw) = (bbox.height(), bbox.width(), img.channels(), img.width());
    let src = img.data();
    let sample = |y: usize, x: usize, c: usize| {
        let i = (bbox.min_y + y) * iw + bbox.min_x + x;
        if keep(i) {
            src[i * ch + c]
        } else {
            0.0
        }
    };
    let rows = sample_grid(bh, target);
    let cols = sample_grid(bw, target);
    let mut out = Vec::with_capacity(target * target * ch);
    for &(y0, y1, fy) in &rows {
        for &(x0, x1, fx) in &cols {
            for c in 0..ch {
                let top = if fx == 0.0 {
                    sample(y0, x0, c)
                } else {
                    sample(y0, x0, c) * (1.0 - fx) + sample(y0, x1, c) * fx
                };
                let v = if fy == 0.0 {
                    top
                } else {
                    let bottom = if fx == 0.0 {
                        sample(y1, x0, c)
                    } else {
                        sample(y1, x0, c) * (1.0 - fx) + sample(y1, x1, c) * fx
                    };
                    top * (1.0 - fy) + bottom * fy
                };
                out.push(v);
            }
        }
    }
    let (lo, hi) = img.range();
    for v in &mut out {
        *v = v.clamp(lo.min(0.0), hi.max(0.0));
    }
    Ok(out)
}
