use super::ImageBuffer;
use crate::error::{Error, Result};

/// Perona-Malik settings. The defaults are 4 iterations, `kappa = 0.1` and
/// `gamma = 0.5`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionParams {
    pub iterations: usize,
    pub kappa: f64,
    pub gamma: f64,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            iterations: 4,
            kappa: 0.1,
            gamma: 0.5,
        }
    }
}

impl DiffusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {} must be positive",
                self.kappa
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {} must lie in (0, 1]",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Edge-preserving smoothing with the exponential conduction
/// `g(d) = exp(-(d / kappa)^2)`, applied independently per channel.
///
/// Each step moves a pixel by `gamma / 4` times the sum of its four
/// conducted neighbor differences. Borders are mirrored, so no flux crosses
/// the image boundary. With `gamma <= 1` every update is a convex
/// combination of the pixel and its neighbors, which keeps the value range.
pub fn anisotropic_diffuse(img: &ImageBuffer, params: DiffusionParams) -> Result<ImageBuffer> {
    params.validate()?;
    if params.iterations == 0 {
        return Ok(img.clone());
    }
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let kernel = Kernel {
        h,
        w,
        iterations: params.iterations,
        inv_k2: 1.0 / (params.kappa * params.kappa),
        step: params.gamma / 4.0,
    };

    let mut out = img.data().to_vec();
    let mut plane = vec![0.0; h * w];
    let mut scratch = Scratch {
        flux_x: vec![0.0; h * w.saturating_sub(1)],
        flux_y: vec![0.0; h.saturating_sub(1) * w],
    };
    for c in 0..ch {
        for (p, v) in plane.iter_mut().zip(out.iter().skip(c).step_by(ch)) {
            *p = *v;
        }
        kernel.run(&mut plane, &mut scratch);
        for (v, p) in out.iter_mut().skip(c).step_by(ch).zip(&plane) {
            *v = *p;
        }
    }
    let (lo, hi) = img.range();
    for v in &mut out {
        // Rounding may push a value a few ulps past the range.
        *v = v.clamp(lo, hi);
    }
    Ok(img.with_data_unchecked(out))
}

struct Kernel {
    h: usize,
    w: usize,
    iterations: usize,
    inv_k2: f64,
    step: f64,
}

struct Scratch {
    flux_x: Vec<f64>,
    flux_y: Vec<f64>,
}

impl Kernel {
    fn run(&self, plane: &mut [f64], scratch: &mut Scratch) {
        #[cfg(target_arch = "x86_64")]
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { self.diffuse_avx2(plane, scratch) };
        }
        self.diffuse(plane, scratch)
    }

    /// Same operations as [`Kernel::diffuse`] with wider vectors. No FMA, so
    /// results are bit-identical.
    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    fn diffuse_avx2(&self, plane: &mut [f64], scratch: &mut Scratch) {
        self.diffuse(plane, scratch)
    }

    #[inline(always)]
    fn diffuse(&self, plane: &mut [f64], scratch: &mut Scratch) {
        let (h, w, step, inv_k2) = (self.h, self.w, self.step, self.inv_k2);
        let conduct = |d: f64| exp_neg(d * d * inv_k2) * d;
        let Scratch { flux_x, flux_y } = scratch;
        for _ in 0..self.iterations {
            if w > 1 {
                for (row, fx) in plane.chunks_exact(w).zip(flux_x.chunks_exact_mut(w - 1)) {
                    for ((f, a), b) in fx.iter_mut().zip(&row[..w - 1]).zip(&row[1..]) {
                        *f = conduct(b - a);
                    }
                }
            }
            for (y, fy) in flux_y.chunks_exact_mut(w).enumerate() {
                let (r0, r1) = (&plane[y * w..(y + 1) * w], &plane[(y + 1) * w..(y + 2) * w]);
                for ((f, a), b) in fy.iter_mut().zip(r0).zip(r1) {
                    *f = conduct(b - a);
                }
            }
            for (y, row) in plane.chunks_exact_mut(w).enumerate() {
                if w > 1 {
                    let fx = &flux_x[y * (w - 1)..(y + 1) * (w - 1)];
                    row[0] += step * fx[0];
                    for x in 1..w - 1 {
                        row[x] += step * (fx[x] - fx[x - 1]);
                    }
                    row[w - 1] -= step * fx[w - 2];
                }
                if y + 1 < h {
                    for (p, f) in row.iter_mut().zip(&flux_y[y * w..(y + 1) * w]) {
                        *p += step * f;
                    }
                }
                if y > 0 {
                    for (p, f) in row.iter_mut().zip(&flux_y[(y - 1) * w..y * w]) {
                        *p -= step * f;
                    }
                }
            }
        }
    }
}

/// `exp(-t)` for `t >= 0`, accurate to a few ulps. Branch-free so the flux
/// loops vectorize; arguments past 700 return about `1e-304` instead of 0.
#[inline(always)]
fn exp_neg(t: f64) -> f64 {
    const LN2_HI: f64 = 6.931_471_803_691_238e-1;
    const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
    const SHIFT: f64 = 6_755_399_441_055_744.0; // 1.5 * 2^52
    let x = -(if t < 700.0 { t } else { 700.0 });
    let shifted = x * std::f64::consts::LOG2_E + SHIFT;
    let kf = shifted - SHIFT;
    let r = (x - kf * LN2_HI) - kf * LN2_LO;
    // Taylor series to degree 12; |r| <= ln2 / 2 keeps the tail below 2e-16.
    let mut p = 1.0 / 479_001_600.0;
    for c in [
        1.0 / 39_916_800.0,
        1.0 / 3_628_800.0,
        1.0 / 362_880.0,
        1.0 / 40_320.0,
        1.0 / 5_040.0,
        1.0 / 720.0,
        1.0 / 120.0,
        1.0 / 24.0,
        1.0 / 6.0,
        0.5,
        1.0,
        1.0,
    ] {
        p = p * r + c;
    }
    // The low mantissa bits of `shifted` hold `k` offset by `2^51`.
    let k = shifted.to_bits().wrapping_sub(SHIFT.to_bits());
    let scale = f64::from_bits(k.wrapping_add(1023) << 52);
    p * scale
}
