use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imageproc::load_image;
use crate::tokenizer::{tokenize_superpixels, TokenizerConfig};

/// Mean region count of one hierarchy level over a corpus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelCount {
    pub level: usize,
    pub mean: f64,
    /// Half-width of the normal 95% confidence interval of the mean.
    pub ci95: f64,
}

/// Mean token count of a square-patch grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCount {
    pub patch: usize,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountStats {
    pub n_images: usize,
    pub skipped: usize,
    pub levels: Vec<LevelCount>,
    pub grid: Vec<GridCount>,
    /// Per-image region counts, in sorted path order.
    pub per_image: Vec<(PathBuf, Vec<usize>)>,
}

/// Path, per-level region counts and image shape.
type ImageCounts = (PathBuf, Vec<usize>, (usize, usize));

/// Mean, sample-stddev-based 95% half-width.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// Region counts per level for every readable image in `paths`, with the
/// `ceil(H / p) ceil(W / p)` grid counts for each patch size. Unreadable
/// images are skipped and counted.
pub fn token_count_stats<P: AsRef<Path> + Sync>(
    paths: &[P],
    config: &TokenizerConfig,
    patches: &[usize],
) -> Result<CountStats> {
    config.validate()?;
    if patches.contains(&0) {
        return Err(Error::InvalidParameter("patch sizes must be positive".into()));
    }
    let mut sorted: Vec<PathBuf> = paths.iter().map(|p| p.as_ref().to_path_buf()).collect();
    sorted.sort();
    let results: Vec<Option<ImageCounts>> = sorted
        .par_iter()
        .map(|path| {
            let run = || -> Result<_> {
                let img = load_image(path)?;
                let h = tokenize_superpixels(&img, config)?;
                Ok((h.region_counts(), (img.height(), img.width())))
            };
            match run() {
                Ok((counts, dims)) => Some((path.clone(), counts, dims)),
                Err(e) => {
                    log::warn!("skipping {}: {e}", path.display());
                    None
                }
            }
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let ok: Vec<_> = results.into_iter().flatten().collect();
    if ok.is_empty() {
        return Err(Error::EmptyCorpus { skipped });
    }
    let levels = (0..=config.levels)
        .map(|t| {
            let v: Vec<f64> = ok.iter().map(|(_, c, _)| c[t] as f64).collect();
            let (mean, ci95) = mean_ci95(&v);
            LevelCount { level: t, mean, ci95 }
        })
        .collect();
    let grid = patches
        .iter()
        .map(|&p| GridCount {
            patch: p,
            mean: ok
                .iter()
                .map(|(_, _, (h, w))| (h.div_ceil(p) * w.div_ceil(p)) as f64)
                .sum::<f64>()
                / ok.len() as f64,
        })
        .collect();
    Ok(CountStats {
        n_images: ok.len(),
        skipped,
        levels,
        grid,
        per_image: ok.into_iter().map(|(p, c, _)| (p, c)).collect(),
    })
}
