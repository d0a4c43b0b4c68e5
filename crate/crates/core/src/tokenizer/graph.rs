use super::PartitionLevel;
use crate::error::{Error, Result};
use crate::imageproc::{BBox, ImageBuffer};

/// Region adjacency graph with per-region statistics.
///
/// Adjacency is stored in CSR form; each neighbor list is sorted and free of
/// self references.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGraph {
    n_regions: usize,
    channels: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    feature_sum: Vec<f64>,
    mean_feature: Vec<f64>,
    /// Reciprocal norm of each (lifted) mean feature, 0 for a zero vector.
    inv_norm: Vec<f64>,
    size: Vec<u64>,
    bbox: Vec<BBox>,
}

/// One region per pixel, connected by the 4-way grid.
pub fn build_grid_graph(img: &ImageBuffer) -> (PartitionLevel, RegionGraph) {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let n = h * w;
    let mut offsets = Vec::with_capacity(n + 1);
    let mut neighbors = Vec::with_capacity(4 * n);
    offsets.push(0);
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as u32;
            // Ascending id order: up, left, right, down.
            if y > 0 {
                neighbors.push(i - w as u32);
            }
            if x > 0 {
                neighbors.push(i - 1);
            }
            if x + 1 < w {
                neighbors.push(i + 1);
            }
            if y + 1 < h {
                neighbors.push(i + w as u32);
            }
            offsets.push(neighbors.len());
        }
    }
    let bbox = (0..n).map(|i| BBox::point(i / w, i % w)).collect();
    let graph = RegionGraph {
        n_regions: n,
        channels: ch,
        offsets,
        neighbors,
        feature_sum: img.data().to_vec(),
        inv_norm: inv_norms(img.data(), ch),
        mean_feature: img.data().to_vec(),
        size: vec![1; n],
        bbox,
    };
    (PartitionLevel::singletons(h, w), graph)
}

impl RegionGraph {
    /// Recomputes every statistic of `partition` directly from the pixels.
    pub fn from_partition(img: &ImageBuffer, partition: &PartitionLevel) -> Result<Self> {
        if img.height() != partition.height() || img.width() != partition.width() {
            return Err(Error::Shape(format!(
                "image is {}x{}, partition is {}x{}",
                img.height(),
                img.width(),
                partition.height(),
                partition.width()
            )));
        }
        let (w, ch, n) = (img.width(), img.channels(), partition.n_regions());
        let labels = partition.labels();
        let mut feature_sum = vec![0.0; n * ch];
        for (i, &l) in labels.iter().enumerate() {
            let l = l as usize;
            for c in 0..ch {
                feature_sum[l * ch + c] += img.pixel(i)[c];
            }
        }
        let size = partition.sizes();
        let mut keys = Vec::new();
        for (i, &a) in labels.iter().enumerate() {
            let x = i % w;
            if x + 1 < w && labels[i + 1] != a {
                keys.push(edge_key(a, labels[i + 1]));
            }
            if i + w < labels.len() && labels[i + w] != a {
                keys.push(edge_key(a, labels[i + w]));
            }
        }
        let (offsets, neighbors) = csr_from_keys(n, keys);
        let mean_feature = means(&feature_sum, &size, ch);
        Ok(Self {
            n_regions: n,
            channels: ch,
            offsets,
            neighbors,
            feature_sum,
            inv_norm: inv_norms(&mean_feature, ch),
            mean_feature,
            size,
            bbox: partition.bboxes(),
        })
    }

    #[inline]
    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        u < self.n_regions && v < self.n_regions && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    #[inline]
    pub fn mean_feature(&self, v: usize) -> &[f64] {
        &self.mean_feature[v * self.channels..(v + 1) * self.channels]
    }

    #[inline]
    pub(crate) fn inv_norm(&self, v: usize) -> f64 {
        self.inv_norm[v]
    }

    #[inline]
    pub fn size(&self, v: usize) -> u64 {
        self.size[v]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.size
    }

    #[inline]
    pub fn bbox(&self, v: usize) -> BBox {
        self.bbox[v]
    }

    /// Merges regions according to `map` (old id -> new id in
    /// `[0, n_new)`), accumulating statistics from the merged regions.
    pub fn contract(&self, map: &[u32], n_new: usize) -> Self {
        debug_assert_eq!(map.len(), self.n_regions);
        let ch = self.channels;
        let mut feature_sum = vec![0.0; n_new * ch];
        let mut size = vec![0u64; n_new];
        let mut bbox: Vec<Option<BBox>> = vec![None; n_new];
        for (v, &t) in map.iter().enumerate().take(self.n_regions) {
            let t = t as usize;
            for c in 0..ch {
                feature_sum[t * ch + c] += self.feature_sum[v * ch + c];
            }
            size[t] += self.size[v];
            bbox[t] = Some(match bbox[t] {
                Some(b) => b.union(&self.bbox[v]),
                None => self.bbox[v],
            });
        }
        let (offsets, neighbors) = self.contracted_adjacency(map, n_new);
        let mean_feature = means(&feature_sum, &size, ch);
        Self {
            n_regions: n_new,
            channels: ch,
            offsets,
            neighbors,
            feature_sum,
            inv_norm: inv_norms(&mean_feature, ch),
            mean_feature,
            size,
            bbox: bbox.into_iter().map(|b| b.expect("merge map is onto")).collect(),
        }
    }
}

impl RegionGraph {
    /// Sorted, deduplicated neighbor lists after merging by `map`.
    fn contracted_adjacency(&self, map: &[u32], n_new: usize) -> (Vec<usize>, Vec<u32>) {
        // Group old regions by their new id (counting sort keeps them in
        // ascending order).
        let mut start = vec![0usize; n_new + 1];
        for &t in map {
            start[t as usize + 1] += 1;
        }
        for t in 0..n_new {
            start[t + 1] += start[t];
        }
        let mut fill = start.clone();
        let mut members = vec![0u32; map.len()];
        for (v, &t) in map.iter().enumerate() {
            members[fill[t as usize]] = v as u32;
            fill[t as usize] += 1;
        }
        let mut stamp = vec![u32::MAX; n_new];
        let mut offsets = Vec::with_capacity(n_new + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for t in 0..n_new {
            let first = neighbors.len();
            for &v in &members[start[t]..start[t + 1]] {
                for &u in self.neighbors(v as usize) {
                    let s = map[u as usize];
                    if s as usize != t && stamp[s as usize] != t as u32 {
                        stamp[s as usize] = t as u32;
                        neighbors.push(s);
                    }
                }
            }
            neighbors[first..].sort_unstable();
            offsets.push(neighbors.len());
        }
        (offsets, neighbors)
    }
}

fn inv_norms(features: &[f64], ch: usize) -> Vec<f64> {
    features
        .chunks_exact(ch)
        .map(|f| {
            let n2 = if ch == 1 {
                f[0] * f[0] + (1.0 - f[0]) * (1.0 - f[0])
            } else {
                f.iter().map(|x| x * x).sum()
            };
            if n2 > 0.0 {
                1.0 / n2.sqrt()
            } else {
                0.0
            }
        })
        .collect()
}

#[inline]
fn edge_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    (u64::from(lo) << 32) | u64::from(hi)
}

/// Builds symmetric sorted adjacency from undirected `(lo, hi)` keys.
fn csr_from_keys(n: usize, mut keys: Vec<u64>) -> (Vec<usize>, Vec<u32>) {
    keys.sort_unstable();
    keys.dedup();
    let mut degree = vec![0usize; n + 1];
    for &k in &keys {
        degree[(k >> 32) as usize + 1] += 1;
        degree[(k & 0xffff_ffff) as usize + 1] += 1;
    }
    for i in 0..n {
        degree[i + 1] += degree[i];
    }
    let offsets = degree;
    let mut cursor = offsets.clone();
    let mut neighbors = vec![0u32; keys.len() * 2];
    // Two passes over keys sorted by (lo, hi): first every neighbor below a
    // region, then every neighbor above it, each pass in ascending order.
    for &k in &keys {
        let (lo, hi) = ((k >> 32) as usize, (k & 0xffff_ffff) as usize);
        neighbors[cursor[hi]] = lo as u32;
        cursor[hi] += 1;
    }
    for &k in &keys {
        let (lo, hi) = ((k >> 32) as usize, (k & 0xffff_ffff) as usize);
        neighbors[cursor[lo]] = hi as u32;
        cursor[lo] += 1;
    }
    (offsets, neighbors)
}

fn means(sum: &[f64], size: &[u64], ch: usize) -> Vec<f64> {
    sum.chunks_exact(ch)
        .zip(size)
        .flat_map(|(s, &n)| s.iter().map(move |v| v / n as f64))
        .collect()
}
