use crate::error::{Error, Result};
use crate::imageproc::ImageBuffer;
use crate::tokenizer::PartitionLevel;

/// Removal quantiles used when none are given.
pub const DEFAULT_QUANTILES: [f64; 4] = [0.01, 0.05, 0.2, 0.5];

/// Per-token relevance scores over a partition.
#[derive(Clone, Debug)]
pub struct AttributionMap<'a> {
    partition: &'a PartitionLevel,
    scores: Vec<f64>,
}

impl<'a> AttributionMap<'a> {
    pub fn new(partition: &'a PartitionLevel, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != partition.n_regions() {
            return Err(Error::Shape(format!(
                "{} scores for {} regions",
                scores.len(),
                partition.n_regions()
            )));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidParameter("attribution scores contain NaN".into()));
        }
        Ok(Self { partition, scores })
    }

    pub fn partition(&self) -> &PartitionLevel {
        self.partition
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Token ids by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order
    }
}

/// Pixel masks for one quantile. `top` covers the highest-ranked tokens and
/// `bottom` is its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct OcclusionMask {
    pub quantile: f64,
    pub n_top: usize,
    pub top: Vec<bool>,
    pub bottom: Vec<bool>,
}

/// Number of top tokens for quantile `q`: nearest rank `ceil(q N)`, at least 1.
pub fn top_count(q: f64, n: usize) -> usize {
    // Guard against products like 0.2 * 5 landing a few ulps above an integer.
    let k = (q * n as f64 - 1e-9).ceil();
    (k.max(1.0) as usize).min(n)
}

pub fn occlusion_masks(attr: &AttributionMap<'_>, quantiles: &[f64]) -> Result<Vec<OcclusionMask>> {
    let n = attr.scores.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no attribution scores".into()));
    }
    if let Some(q) = quantiles.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(Error::InvalidParameter(format!("quantile {q} must lie in (0, 1)")));
    }
    let ranking = attr.ranking();
    Ok(quantiles
        .iter()
        .map(|&q| {
            let k = top_count(q, n);
            let mut selected = vec![false; n];
            for &t in &ranking[..k] {
                selected[t] = true;
            }
            let top: Vec<bool> = attr.partition.labels().iter().map(|&l| selected[l as usize]).collect();
            let bottom = top.iter().map(|t| !t).collect();
            OcclusionMask {
                quantile: q,
                n_top: k,
                top,
                bottom,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompSuff {
    /// Mean score drop when the top tokens are removed.
    pub comp: f64,
    /// Mean score drop when only the top tokens are kept.
    pub suff: f64,
}

/// Comprehensiveness and sufficiency of `attr` under `predictor`. Removed
/// pixels are set to 0.
pub fn comp_suff<F, E>(
    mut predictor: F,
    img: &ImageBuffer,
    attr: &AttributionMap<'_>,
    quantiles: &[f64],
) -> Result<CompSuff>
where
    F: FnMut(&ImageBuffer) -> std::result::Result<f64, E>,
    E: Into<Box<dyn std::error::Error + Send + Sync>>,
{
    if img.height() != attr.partition.height() || img.width() != attr.partition.width() {
        return Err(Error::Shape(format!(
            "image is {}x{}, partition is {}x{}",
            img.height(),
            img.width(),
            attr.partition.height(),
            attr.partition.width()
        )));
    }
    if quantiles.is_empty() {
        return Err(Error::InvalidParameter("no quantiles given".into()));
    }
    let mut score = |x: &ImageBuffer| predictor(x).map_err(|e| Error::Predictor(e.into()));
    let full = score(img)?;
    let (mut comp, mut suff) = (0.0, 0.0);
    for m in occlusion_masks(attr, quantiles)? {
        comp += full - score(&img.masked(&m.bottom)?)?;
        suff += full - score(&img.masked(&m.top)?)?;
    }
    let q = quantiles.len() as f64;
    Ok(CompSuff {
        comp: comp / q,
        suff: suff / q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::tokenize_grid;
    use std::convert::Infallible;

    fn mean(x: &ImageBuffer) -> Result<f64, Infallible> {
        Ok(x.data().iter().sum::<f64>() / x.data().len() as f64)
    }

    #[test]
    fn uniform_scores_take_the_lowest_ids() {
        let p = tokenize_grid(2, 4, 1).unwrap();
        let a = AttributionMap::new(&p, vec![0.3; 8]).unwrap();
        let m = &occlusion_masks(&a, &[0.5]).unwrap()[0];
        assert_eq!(m.n_top, 4);
        assert_eq!(m.top, vec![true, true, true, true, false, false, false, false]);
    }

    #[test]
    fn tiny_quantile_keeps_the_best_token() {
        let p = tokenize_grid(1, 10, 1).unwrap();
        let a = AttributionMap::new(&p, (0..10).map(|i| ((i * 7) % 10) as f64).collect()).unwrap();
        let m = &occlusion_masks(&a, &[0.01]).unwrap()[0];
        assert_eq!(m.n_top, 1);
        // Score 9 belongs to token 7.
        assert_eq!(m.top.iter().position(|&t| t), Some(7));
        assert_eq!(m.top.iter().filter(|&&t| t).count(), 1);
    }

    #[test]
    fn increasing_scores_take_the_last_half() {
        let p = tokenize_grid(4, 4, 2).unwrap();
        let a = AttributionMap::new(&p, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = &occlusion_masks(&a, &[0.5]).unwrap()[0];
        let expected: Vec<bool> = p.labels().iter().map(|&l| l >= 2).collect();
        assert_eq!(m.top, expected);
        assert!(m.top.iter().zip(&m.bottom).all(|(a, b)| a != b));
    }

    #[test]
    fn constant_predictor_is_zero() {
        let img = ImageBuffer::from_fn(4, 4, 3, |y, x, _| (y * 4 + x) as f64 / 15.0).unwrap();
        let p = tokenize_grid(4, 4, 2).unwrap();
        let a = AttributionMap::new(&p, vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        let r = comp_suff(|_| Ok::<_, Infallible>(0.75), &img, &a, &DEFAULT_QUANTILES).unwrap();
        assert_eq!(r, CompSuff { comp: 0.0, suff: 0.0 });
    }

    #[test]
    fn mean_predictor_on_white_image() {
        let img = ImageBuffer::filled(4, 4, 3, 1.0).unwrap();
        let p = tokenize_grid(4, 4, 2).unwrap();
        let a = AttributionMap::new(&p, vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        let r = comp_suff(mean, &img, &a, &[0.5]).unwrap();
        assert!((r.comp - 0.5).abs() < 1e-12 && (r.suff - 0.5).abs() < 1e-12);
        // q = 0.25 keeps one of four tokens: comp 1/4, suff 3/4.
        let r = comp_suff(mean, &img, &a, &[0.25]).unwrap();
        assert!((r.comp - 0.25).abs() < 1e-12 && (r.suff - 0.75).abs() < 1e-12);
    }

    #[test]
    fn any_pixel_indicator_is_zero_at_half() {
        let img = ImageBuffer::filled(2, 2, 1, 1.0).unwrap();
        let p = tokenize_grid(2, 2, 1).unwrap();
        let a = AttributionMap::new(&p, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let any = |x: &ImageBuffer| Ok::<_, Infallible>(if x.data().iter().any(|&v| v > 0.0) { 1.0 } else { 0.0 });
        assert_eq!(
            comp_suff(any, &img, &a, &[0.5]).unwrap(),
            CompSuff { comp: 0.0, suff: 0.0 }
        );
    }

    #[test]
    fn predictor_errors_propagate() {
        let img = ImageBuffer::filled(2, 2, 1, 1.0).unwrap();
        let p = tokenize_grid(2, 2, 1).unwrap();
        let a = AttributionMap::new(&p, vec![1.0; 4]).unwrap();
        let r = comp_suff(|_| Err::<f64, _>("model offline"), &img, &a, &[0.5]);
        assert!(matches!(r, Err(Error::Predictor(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = tokenize_grid(2, 2, 1).unwrap();
        assert!(AttributionMap::new(&p, vec![1.0; 3]).is_err());
        let a = AttributionMap::new(&p, vec![1.0; 4]).unwrap();
        assert!(occlusion_masks(&a, &[0.0]).is_err());
        assert!(occlusion_masks(&a, &[1.0]).is_err());
    }
}
