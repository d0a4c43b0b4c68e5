use rayon::prelude::*;

use super::{build_grid_graph, Hierarchy, PartitionLevel, RegionGraph};
use crate::error::{Error, Result};
use crate::imageproc::{anisotropic_diffuse, kumaraswamy_normalize, DiffusionParams, ImageBuffer, NormalizationParams};

/// How ties in the argmax over candidate edges are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// The candidate with the lowest region id wins (self-loop included).
    #[default]
    LowestId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenizerConfig {
    /// Number of contraction steps `T`.
    pub levels: usize,
    /// Weight of the bounding-box density term, in `[0, 1]`.
    pub compactness: f64,
    /// First level at which a region may select its own self-loop.
    pub use_loops_from: usize,
    pub tie_break: TieBreak,
    /// Distance threshold for the optional post-hoc merge; `0` disables it.
    pub final_threshold: f64,
    /// Apply contrast normalization and diffusion to the working copy.
    pub preprocess: bool,
    pub diffusion: DiffusionParams,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            levels: 4,
            compactness: 0.0,
            use_loops_from: 1,
            tie_break: TieBreak::LowestId,
            final_threshold: 0.0,
            preprocess: true,
            diffusion: DiffusionParams::default(),
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidParameter("levels must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.compactness) {
            return Err(Error::InvalidParameter(format!(
                "compactness = {} must lie in [0, 1]",
                self.compactness
            )));
        }
        if !(self.final_threshold >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "final threshold = {} must be non-negative",
                self.final_threshold
            )));
        }
        if self.preprocess {
            self.diffusion.validate()?;
        }
        Ok(())
    }
}

/// Empirical mean and (population) standard deviation of region sizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeStats {
    pub mean: f64,
    pub stddev: f64,
}

impl SizeStats {
    pub fn of(sizes: &[u64]) -> Self {
        let n = sizes.len() as f64;
        let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / n;
        let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            stddev: var.sqrt(),
        }
    }

    /// Z-score of a region size; zero when all sizes are equal.
    #[inline]
    pub fn z_score(&self, size: u64) -> f64 {
        if self.stddev > 0.0 {
            (size as f64 - self.mean) / self.stddev
        } else {
            0.0
        }
    }
}

/// Cosine similarity of two mean feature vectors.
///
/// Single-channel features are lifted to `(x, 1 - x)` first, since the
/// cosine of two positive scalars is always one. Two zero vectors count as
/// identical, a zero vector against a non-zero one as orthogonal.
#[inline]
pub fn similarity(a: &[f64], b: &[f64]) -> f64 {
    let norm = |x: &[f64]| -> f64 {
        let n2 = if x.len() == 1 {
            x[0] * x[0] + (1.0 - x[0]) * (1.0 - x[0])
        } else {
            x.iter().map(|v| v * v).sum()
        };
        if n2 > 0.0 {
            1.0 / n2.sqrt()
        } else {
            0.0
        }
    };
    cosine(a, b, norm(a), norm(b))
}

/// Cosine from precomputed reciprocal norms (0 marks a zero vector).
#[inline(always)]
pub(crate) fn cosine(a: &[f64], b: &[f64], inv_a: f64, inv_b: f64) -> f64 {
    match (inv_a > 0.0, inv_b > 0.0) {
        (true, true) => {
            let dot = match (a, b) {
                ([a0], [b0]) => a0 * b0 + (1.0 - a0) * (1.0 - b0),
                ([a0, a1, a2], [b0, b1, b2]) => a0 * b0 + a1 * b1 + a2 * b2,
                _ => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            };
            (dot * inv_a * inv_b).clamp(-1.0, 1.0)
        }
        (false, false) => 1.0,
        _ => 0.0,
    }
}

/// Density of two regions inside their joint bounding box:
/// `4 (|u| + |v|) / per^2` with `per = 2 (h + w)`. Lies in `(0, 1/4]` for
/// any two disjoint regions.
#[inline]
pub fn bbox_density(graph: &RegionGraph, u: usize, v: usize) -> f64 {
    let b = graph.bbox(u).union(&graph.bbox(v));
    let per = 2.0 * (b.height() + b.width()) as f64;
    4.0 * (graph.size(u) + graph.size(v)) as f64 / (per * per)
}

#[inline(always)]
fn weight_unchecked(graph: &RegionGraph, u: usize, v: usize, stats: SizeStats, compactness: f64) -> f64 {
    if u == v {
        return stats.z_score(graph.size(u));
    }
    let sim = cosine(
        graph.mean_feature(u),
        graph.mean_feature(v),
        graph.inv_norm(u),
        graph.inv_norm(v),
    );
    if compactness == 0.0 {
        sim
    } else {
        compactness * bbox_density(graph, u, v) + (1.0 - compactness) * sim
    }
}

/// Weight of the edge `(u, v)`: the size z-score for a self-loop, otherwise
/// the compactness-regularized feature similarity.
pub fn edge_weight(graph: &RegionGraph, u: usize, v: usize, stats: SizeStats, compactness: f64) -> Result<f64> {
    if u >= graph.n_regions() {
        return Err(Error::EmptyRegion(u));
    }
    if u != v && !graph.is_adjacent(u, v) {
        return Err(Error::NotAdjacent(u, v));
    }
    Ok(weight_unchecked(graph, u, v, stats, compactness))
}

/// Each region's preferred partner: the argmax over its neighbors (and its
/// self-loop once loops are enabled).
pub fn select_edges(graph: &RegionGraph, level: usize, config: &TokenizerConfig) -> Vec<u32> {
    let stats = SizeStats::of(graph.sizes());
    let loops = level >= config.use_loops_from;
    (0..graph.n_regions())
        .into_par_iter()
        .map(|v| {
            let mut best = v as u32;
            let mut best_w = f64::NEG_INFINITY;
            let mut consider = |u: usize| {
                let w = weight_unchecked(graph, v, u, stats, config.compactness);
                if w > best_w {
                    best_w = w;
                    best = u as u32;
                }
            };
            // Candidates in ascending id order with the self-loop slotted in;
            // a strict comparison keeps the lowest id among ties.
            let mut own_pending = loops;
            for &u in graph.neighbors(v) {
                if own_pending && u as usize > v {
                    consider(v);
                    own_pending = false;
                }
                consider(u as usize);
            }
            if own_pending {
                consider(v);
            }
            best
        })
        .collect()
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Connected components of an undirected link list over `n` nodes, numbered
/// in ascending order of their smallest member. Returns `(map, n_components)`.
pub(crate) fn components<I>(n: usize, links: I) -> (Vec<u32>, usize)
where
    I: IntoIterator<Item = (u32, u32)>,
{
    let mut ds = DisjointSet::new(n);
    for (a, b) in links {
        ds.union(a, b);
    }
    let mut id = vec![u32::MAX; n];
    let mut map = Vec::with_capacity(n);
    let mut next = 0u32;
    for v in 0..n as u32 {
        let r = ds.find(v) as usize;
        if id[r] == u32::MAX {
            id[r] = next;
            next += 1;
        }
        map.push(id[r]);
    }
    (map, next as usize)
}

/// One greedy parallel contraction: every region links to its selected
/// partner, and the connected components of those links become the regions
/// of the next level.
pub fn contract_step(
    graph: &RegionGraph,
    partition: &PartitionLevel,
    config: &TokenizerConfig,
) -> Result<(PartitionLevel, RegionGraph)> {
    if graph.n_regions() != partition.n_regions() {
        return Err(Error::Shape(format!(
            "graph has {} regions, partition has {}",
            graph.n_regions(),
            partition.n_regions()
        )));
    }
    let selection = select_edges(graph, partition.level, config);
    let (map, n_new) = components(
        graph.n_regions(),
        selection.iter().enumerate().map(|(v, &u)| (v as u32, u)),
    );
    // Component ids follow the smallest member, and region ids follow first
    // pixel occurrence, so the merged labels are already first-occurrence
    // ordered.
    let labels = partition.labels().iter().map(|&l| map[l as usize]).collect();
    let next = PartitionLevel::new(partition.level + 1, partition.height(), partition.width(), labels)?;
    Ok((next, graph.contract(&map, n_new)))
}

/// Contrast normalization followed by diffusion, as used for partitioning.
pub fn preprocess(img: &ImageBuffer, diffusion: DiffusionParams) -> Result<ImageBuffer> {
    let params = NormalizationParams::default_for(img.channels())?;
    anisotropic_diffuse(&kumaraswamy_normalize(img, &params)?, diffusion)
}

/// Builds the `T`-level hierarchy of superpixel partitions.
pub fn tokenize_superpixels(img: &ImageBuffer, config: &TokenizerConfig) -> Result<Hierarchy> {
    config.validate()?;
    let working = if config.preprocess {
        preprocess(img, config.diffusion)?
    } else {
        img.clone()
    };
    let (mut partition, mut graph) = build_grid_graph(&working);
    let mut levels = Vec::with_capacity(config.levels + 1);
    for _ in 0..config.levels {
        let (next_p, next_g) = contract_step(&graph, &partition, config)?;
        levels.push(std::mem::replace(&mut partition, next_p));
        graph = next_g;
    }
    levels.push(partition);
    Ok(Hierarchy { levels })
}
