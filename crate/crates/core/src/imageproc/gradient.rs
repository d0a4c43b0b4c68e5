use super::ImageBuffer;
use crate::error::{Error, Result};

/// Sum of the positive taps of the 3/10/3 Scharr kernel: the largest
/// response a `[0, 1]` image can produce.
pub const SCHARR_NORM: f64 = 16.0;

/// Per-pixel `(dy, dx)` gradients, each bounded in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub height: usize,
    pub width: usize,
    pub dy: Vec<f64>,
    pub dx: Vec<f64>,
}

impl GradientField {
    #[inline]
    pub fn at(&self, index: usize) -> (f64, f64) {
        (self.dy[index], self.dx[index])
    }
}

/// Normalized Scharr gradients of the channel-mean luminance.
///
/// Borders are mirrored with the edge sample repeated, so a flat border
/// produces no gradient.
pub fn scharr_gradients(img: &ImageBuffer) -> Result<GradientField> {
    let (h, w) = (img.height(), img.width());
    if h < 3 || w < 3 {
        return Err(Error::Shape(format!(
            "Scharr gradients need at least 3x3 pixels, got {h}x{w}"
        )));
    }
    let lum = img.luminance();
    let at = |y: isize, x: isize| {
        let y = y.clamp(0, h as isize - 1) as usize;
        let x = x.clamp(0, w as isize - 1) as usize;
        lum[y * w + x]
    };
    let mut dy = Vec::with_capacity(h * w);
    let mut dx = Vec::with_capacity(h * w);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = 3.0 * (at(y - 1, x + 1) - at(y - 1, x - 1))
                + 10.0 * (at(y, x + 1) - at(y, x - 1))
                + 3.0 * (at(y + 1, x + 1) - at(y + 1, x - 1));
            let gy = 3.0 * (at(y + 1, x - 1) - at(y - 1, x - 1))
                + 10.0 * (at(y + 1, x) - at(y - 1, x))
                + 3.0 * (at(y + 1, x + 1) - at(y - 1, x + 1));
            dx.push((gx / SCHARR_NORM).clamp(-1.0, 1.0));
            dy.push((gy / SCHARR_NORM).clamp(-1.0, 1.0));
        }
    }
    Ok(GradientField {
        height: h,
        width: w,
        dy,
        dx,
    })
}
