use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::imageproc::BBox;

/// A label map assigning each pixel to one region at hierarchy level `level`.
///
/// Labels are contiguous in `[0, n_regions)`. Partitions produced by this
/// crate number their regions in order of first pixel occurrence
/// (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLevel {
    pub level: usize,
    height: usize,
    width: usize,
    labels: Vec<u32>,
    n_regions: usize,
}

/// Pixel indices grouped by region (CSR layout, ascending pixel order).
#[derive(Clone, Debug)]
pub struct RegionPixels {
    offsets: Vec<usize>,
    pixels: Vec<u32>,
}

impl RegionPixels {
    #[inline]
    pub fn of(&self, region: usize) -> &[u32] {
        &self.pixels[self.offsets[region]..self.offsets[region + 1]]
    }

    pub fn n_regions(&self) -> usize {
        self.offsets.len() - 1
    }
}

impl PartitionLevel {
    /// Wraps an existing label map; ids must already be contiguous.
    pub fn new(level: usize, height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != height * width || labels.is_empty() {
            return Err(Error::Shape(format!(
                "label map has {} entries for {height}x{width}",
                labels.len()
            )));
        }
        let n_regions = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut seen = vec![false; n_regions];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Format {
                kind: "label map",
                reason: format!("label ids are not contiguous: {missing} is unused"),
            });
        }
        Ok(Self {
            level,
            height,
            width,
            labels,
            n_regions,
        })
    }

    /// Renumbers arbitrary labels by first occurrence.
    pub fn from_raw_labels(level: usize, height: usize, width: usize, raw: &[u32]) -> Result<Self> {
        if raw.len() != height * width || raw.is_empty() {
            return Err(Error::Shape(format!(
                "label map has {} entries for {height}x{width}",
                raw.len()
            )));
        }
        let max = *raw.iter().max().expect("non-empty") as usize;
        let mut remap = vec![u32::MAX; max + 1];
        let mut next = 0u32;
        let labels = raw
            .iter()
            .map(|&l| {
                let slot = &mut remap[l as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Ok(Self {
            level,
            height,
            width,
            labels,
            n_regions: next as usize,
        })
    }

    /// One region per pixel.
    pub fn singletons(height: usize, width: usize) -> Self {
        Self {
            level: 0,
            height,
            width,
            labels: (0..(height * width) as u32).collect(),
            n_regions: height * width,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, y: usize, x: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.n_regions];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    pub fn bboxes(&self) -> Vec<BBox> {
        let mut boxes: Vec<Option<BBox>> = vec![None; self.n_regions];
        for (i, &l) in self.labels.iter().enumerate() {
            let (y, x) = (i / self.width, i % self.width);
            match &mut boxes[l as usize] {
                Some(b) => b.include(y, x),
                slot => *slot = Some(BBox::point(y, x)),
            }
        }
        boxes
            .into_iter()
            .map(|b| b.expect("every region is non-empty"))
            .collect()
    }

    pub fn region_pixels(&self) -> RegionPixels {
        let mut offsets = vec![0usize; self.n_regions + 1];
        for &l in &self.labels {
            offsets[l as usize + 1] += 1;
        }
        for r in 0..self.n_regions {
            offsets[r + 1] += offsets[r];
        }
        let mut cursor = offsets.clone();
        let mut pixels = vec![0u32; self.labels.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            pixels[cursor[l as usize]] = i as u32;
            cursor[l as usize] += 1;
        }
        RegionPixels { offsets, pixels }
    }

    /// Per-pixel membership mask of one region.
    pub fn mask(&self, region: usize) -> Vec<bool> {
        self.labels.iter().map(|&l| l as usize == region).collect()
    }

    /// Applies a region-level map `old id -> new id` and renumbers by first
    /// occurrence.
    pub fn merged(&self, map: &[u32], level: usize) -> Result<Self> {
        if map.len() != self.n_regions {
            return Err(Error::Shape(format!(
                "merge map has {} entries for {} regions",
                map.len(),
                self.n_regions
            )));
        }
        let raw: Vec<u32> = self.labels.iter().map(|&l| map[l as usize]).collect();
        Self::from_raw_labels(level, self.height, self.width, &raw)
    }

    /// Number of 4-connected components per region.
    pub fn component_counts(&self) -> Vec<usize> {
        let (h, w) = (self.height, self.width);
        let mut visited = vec![false; self.labels.len()];
        let mut counts = vec![0usize; self.n_regions];
        let mut queue = VecDeque::new();
        for start in 0..self.labels.len() {
            if visited[start] {
                continue;
            }
            let label = self.labels[start];
            counts[label as usize] += 1;
            visited[start] = true;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let (y, x) = (i / w, i % w);
                let mut visit = |j: usize| {
                    if !visited[j] && self.labels[j] == label {
                        visited[j] = true;
                        queue.push_back(j);
                    }
                };
                if y > 0 {
                    visit(i - w);
                }
                if y + 1 < h {
                    visit(i + w);
                }
                if x > 0 {
                    visit(i - 1);
                }
                if x + 1 < w {
                    visit(i + 1);
                }
            }
        }
        counts
    }

    /// True when every region is a single 4-connected component.
    pub fn is_connected(&self) -> bool {
        self.component_counts().iter().all(|&c| c == 1)
    }

    /// True when every region of `self` lies inside exactly one region of
    /// `coarser`.
    pub fn refines(&self, coarser: &PartitionLevel) -> bool {
        if self.labels.len() != coarser.labels.len() {
            return false;
        }
        let mut parent = vec![u32::MAX; self.n_regions];
        for (&fine, &coarse) in self.labels.iter().zip(&coarser.labels) {
            let slot = &mut parent[fine as usize];
            if *slot == u32::MAX {
                *slot = coarse;
            } else if *slot != coarse {
                return false;
            }
        }
        true
    }
}

/// Sequence of nested partitions from the singleton level to the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    pub levels: Vec<PartitionLevel>,
}

impl Hierarchy {
    pub fn top(&self) -> &PartitionLevel {
        self.levels.last().expect("hierarchy has at least one level")
    }

    pub fn region_counts(&self) -> Vec<usize> {
        self.levels.iter().map(PartitionLevel::n_regions).collect()
    }

    /// Checks that each level refines the next.
    pub fn is_nested(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].refines(&w[1]))
    }
}
