//! Superpixel tokenization for vision transformers.
//!
//! The pipeline is split into a tokenizer (image to partition), a feature
//! extractor (partition to fixed-size token features) and an embedder
//! (features to token embeddings). The `analysis` module holds evaluation
//! metrics over partitions, attention tensors and token features.

pub mod analysis;
pub mod error;
pub mod features;
pub mod formats;
pub mod imageproc;
pub mod tokenizer;

pub use analysis::{AttentionStack, AttributionMap, SaliencyResult};
pub use error::{Error, Result};
pub use features::{FeatureConfig, LinearEmbedder, TokenFeatures};
pub use imageproc::{GradientField, ImageBuffer};
pub use tokenizer::{Hierarchy, PartitionLevel, RegionGraph, TokenizerConfig};
