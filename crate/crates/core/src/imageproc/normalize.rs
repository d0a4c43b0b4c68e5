use super::ImageBuffer;
use crate::error::{Error, Result};

/// Per-channel parameters of the reparametrized Kumaraswamy CDF
/// `x -> 1 - (1 - x^lambda)^b` with `b = -ln 2 / ln(1 - mu^lambda)`, so that
/// each channel's configured mean `mu` is mapped to exactly one half.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationParams {
    mu: Vec<f64>,
    lambda: Vec<f64>,
    b: Vec<f64>,
}

/// ImageNet channel means (R, G, B).
pub const DEFAULT_MU: [f64; 3] = [0.485, 0.456, 0.406];
/// Contrast shapes paired with [`DEFAULT_MU`].
pub const DEFAULT_LAMBDA: [f64; 3] = [0.539, 0.507, 0.404];

impl NormalizationParams {
    pub fn new(mu: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || mu.len() != lambda.len() {
            return Err(Error::InvalidParameter(format!(
                "need one (mu, lambda) pair per channel, got {} and {}",
                mu.len(),
                lambda.len()
            )));
        }
        let mut b = Vec::with_capacity(mu.len());
        for (c, (&m, &l)) in mu.iter().zip(&lambda).enumerate() {
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "channel {c}: mu = {m} must lie in (0, 1)"
                )));
            }
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "channel {c}: lambda = {l} must be positive"
                )));
            }
            let base = 1.0 - m.powf(l);
            if base <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "channel {c}: mu^lambda >= 1 makes the exponent undefined"
                )));
            }
            b.push(-std::f64::consts::LN_2 / base.ln());
        }
        Ok(Self { mu, lambda, b })
    }

    /// Default parameters for an image with `channels` channels. Gray images
    /// use the green pair.
    pub fn default_for(channels: usize) -> Result<Self> {
        match channels {
            1 => Self::new(vec![DEFAULT_MU[1]], vec![DEFAULT_LAMBDA[1]]),
            3 => Self::new(DEFAULT_MU.to_vec(), DEFAULT_LAMBDA.to_vec()),
            n => Err(Error::InvalidParameter(format!(
                "no default normalization for {n} channels"
            ))),
        }
    }

    pub fn channels(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Applies the CDF of channel `c` to a single value in `[0, 1]`.
    #[inline]
    pub fn apply(&self, c: usize, x: f64) -> f64 {
        let inner = 1.0 - x.powf(self.lambda[c]);
        (1.0 - inner.powf(self.b[c])).clamp(0.0, 1.0)
    }
}

/// Channel-wise contrast normalization. Output stays in `[0, 1]` and each
/// channel map is strictly increasing.
pub fn kumaraswamy_normalize(img: &ImageBuffer, params: &NormalizationParams) -> Result<ImageBuffer> {
    if params.channels() != img.channels() {
        return Err(Error::Shape(format!(
            "normalization has {} channels, image has {}",
            params.channels(),
            img.channels()
        )));
    }
    let channels = img.channels();
    // 8-bit inputs hit only 256 distinct values per channel.
    let table: Vec<[f64; 256]> = (0..channels)
        .map(|c| std::array::from_fn(|k| params.apply(c, k as f64 / 255.0)))
        .collect();
    let levels: [f64; 256] = std::array::from_fn(|k| k as f64 / 255.0);
    let mut out = Vec::with_capacity(img.data().len());
    for (p, px) in img.data().chunks_exact(channels).enumerate() {
        for (c, &x) in px.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfRange {
                    index: p * channels + c,
                    value: x,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let k = (x * 255.0 + 0.5) as usize;
            out.push(if levels[k] == x {
                table[c][k]
            } else {
                params.apply(c, x)
            });
        }
    }
    ImageBuffer::new(img.height(), img.width(), channels, out)
}
