//! Hierarchical superpixel partitioning by greedy parallel edge contraction,
//! plus square-grid and random-Voronoi reference tokenizers.
//!
//! Level 0 is the singleton partition on the 4-connected pixel grid. Each
//! step lets every region pick its highest-weight edge; the connected
//! components of the picked edges become the regions of the next level, so
//! every level refines the next and every region stays connected.

mod baseline;
mod contract;
mod graph;
mod merge;
mod partition;

pub use baseline::{tokenize_grid, tokenize_voronoi, voronoi_from_sites};
pub use contract::{
    bbox_density, contract_step, edge_weight, preprocess, select_edges, similarity, tokenize_superpixels, SizeStats,
    TieBreak, TokenizerConfig,
};
pub use graph::{build_grid_graph, RegionGraph};
pub use merge::{final_threshold_merge, threshold_merge};
pub use partition::{Hierarchy, PartitionLevel, RegionPixels};
