//! Evaluation metrics: explained variation of a partition, attention flow
//! and class attribution, occlusion faithfulness, spectral foreground
//! bipartition and token-count statistics.

mod attention;
mod counts;
mod occlusion;
mod tokencut;
mod variation;

pub use attention::{aggregate_heads, attention_flow, class_attribution, AttentionStack};
pub use counts::{mean_ci95, token_count_stats, CountStats, GridCount, LevelCount};
pub use occlusion::{
    comp_suff, occlusion_masks, top_count, AttributionMap, CompSuff, OcclusionMask, DEFAULT_QUANTILES,
};
pub use tokencut::{
    fiedler_vector, min_normalized_cut_bruteforce, normalized_cut, tokencut, tokencut_adjacency, SaliencyResult,
    DEFAULT_EPSILON, DEFAULT_TAU,
};
pub use variation::explained_variation;
