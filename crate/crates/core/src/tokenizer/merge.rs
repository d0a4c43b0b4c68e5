use super::contract::components;
use super::{Hierarchy, PartitionLevel, RegionGraph};
use crate::error::{Error, Result};
use crate::imageproc::ImageBuffer;

/// Merges adjacent top-level regions whose mean features (taken from `img`)
/// are closer than `threshold` in Euclidean distance. Linked pairs merge
/// transitively. A zero threshold returns the top level unchanged.
pub fn final_threshold_merge(hier: &Hierarchy, img: &ImageBuffer, threshold: f64) -> Result<PartitionLevel> {
    threshold_merge(hier.top(), img, threshold)
}

/// [`final_threshold_merge`] applied to a single partition.
pub fn threshold_merge(partition: &PartitionLevel, img: &ImageBuffer, threshold: f64) -> Result<PartitionLevel> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold = {threshold} must be non-negative"
        )));
    }
    if threshold == 0.0 {
        return Ok(partition.clone());
    }
    let graph = RegionGraph::from_partition(img, partition)?;
    let mut links = Vec::new();
    for u in 0..graph.n_regions() {
        for &v in graph.neighbors(u) {
            if (v as usize) > u {
                let d2: f64 = graph
                    .mean_feature(u)
                    .iter()
                    .zip(graph.mean_feature(v as usize))
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                if d2.sqrt() < threshold {
                    links.push((u as u32, v));
                }
            }
        }
    }
    let (map, _) = components(graph.n_regions(), links);
    partition.merged(&map, partition.level)
}
