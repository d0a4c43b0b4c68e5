//! Reference tokenizers: the canonical square grid and random Voronoi cells.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PartitionLevel;
use crate::error::{Error, Result};

/// Square `patch x patch` tiles in raster order. Tiles at the right and
/// bottom edges are truncated to the image.
pub fn tokenize_grid(height: usize, width: usize, patch: usize) -> Result<PartitionLevel> {
    if patch == 0 {
        return Err(Error::InvalidParameter("patch size must be positive".into()));
    }
    let cols = width.div_ceil(patch);
    let labels = (0..height * width)
        .map(|i| ((i / width / patch) * cols + (i % width) / patch) as u32)
        .collect();
    PartitionLevel::new(0, height, width, labels)
}

/// Voronoi cells of `n_sites` pixels drawn uniformly without replacement.
pub fn tokenize_voronoi(height: usize, width: usize, n_sites: usize, seed: u64) -> Result<PartitionLevel> {
    let n = height * width;
    if n_sites == 0 || n_sites > n {
        return Err(Error::InvalidParameter(format!(
            "number of sites {n_sites} must lie in [1, {n}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites: Vec<(usize, usize)> = sample(&mut rng, n, n_sites)
        .into_iter()
        .map(|i| (i / width, i % width))
        .collect();
    voronoi_from_sites(height, width, &sites)
}

/// Labels each pixel with its nearest site (squared Euclidean distance, ties
/// to the lower site index).
///
/// Digitized cells can occasionally leave a fragment cut off from its site;
/// such fragments are handed to the adjacent cell with the lowest site index
/// so that every region stays 4-connected.
pub fn voronoi_from_sites(height: usize, width: usize, sites: &[(usize, usize)]) -> Result<PartitionLevel> {
    if sites.is_empty() {
        return Err(Error::InvalidParameter("need at least one site".into()));
    }
    if let Some(&(y, x)) = sites.iter().find(|&&(y, x)| y >= height || x >= width) {
        return Err(Error::InvalidParameter(format!(
            "site ({y}, {x}) lies outside {height}x{width}"
        )));
    }
    let mut raw = Vec::with_capacity(height * width);
    for y in 0..height {
        for x in 0..width {
            let mut best = 0u32;
            let mut best_d = usize::MAX;
            for (s, &(sy, sx)) in sites.iter().enumerate() {
                let d = sy.abs_diff(y).pow(2) + sx.abs_diff(x).pow(2);
                if d < best_d {
                    best_d = d;
                    best = s as u32;
                }
            }
            raw.push(best);
        }
    }
    reattach_fragments(height, width, sites, &mut raw);
    PartitionLevel::from_raw_labels(0, height, width, &raw)
}

fn reattach_fragments(height: usize, width: usize, sites: &[(usize, usize)], raw: &mut [u32]) {
    loop {
        // Flood from every site through its own cell.
        let mut anchored = vec![false; raw.len()];
        let mut stack = Vec::new();
        for (s, &(y, x)) in sites.iter().enumerate() {
            let i = y * width + x;
            if raw[i] == s as u32 && !anchored[i] {
                anchored[i] = true;
                stack.push(i);
            }
        }
        while let Some(i) = stack.pop() {
            for j in neighbors4(i, height, width) {
                if !anchored[j] && raw[j] == raw[i] {
                    anchored[j] = true;
                    stack.push(j);
                }
            }
        }
        let mut changed = false;
        for i in 0..raw.len() {
            if anchored[i] {
                continue;
            }
            if let Some(target) = neighbors4(i, height, width)
                .filter(|&j| anchored[j])
                .map(|j| raw[j])
                .min()
            {
                raw[i] = target;
                anchored[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn neighbors4(i: usize, height: usize, width: usize) -> impl Iterator<Item = usize> {
    let (y, x) = (i / width, i % width);
    [
        (y > 0).then(|| i - width),
        (x > 0).then(|| i - 1),
        (x + 1 < width).then(|| i + 1),
        (y + 1 < height).then(|| i + width),
    ]
    .into_iter()
    .flatten()
}
