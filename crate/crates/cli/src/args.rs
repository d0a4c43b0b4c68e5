use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spixtok_core::analysis::{DEFAULT_EPSILON, DEFAULT_TAU};
use spixtok_core::TokenizerConfig;

#[derive(Parser, Debug)]
#[command(
    name = "spixtok",
    version,
    about = "Superpixel tokenization, region features and evaluation metrics"
)]
pub struct Cli {
    /// Worker threads for the global pool (defaults to one per core).
    #[arg(long, global = true, env = "SPIXTOK_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partition images and write one label map per level.
    ///
    /// Prints CSV rows `image,level,regions`. Superpixel mode writes
    /// `<stem>.t<level>.lbl`; grid and voronoi modes write `<stem>.lbl`.
    Tokenize(TokenizeArgs),
    /// Extract region features for an image and its label map.
    Features(FeaturesArgs),
    /// Evaluation metrics and consistency checks.
    Eval(EvalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Superpixel,
    Grid,
    Voronoi,
}

/// Options shared by every command that builds a superpixel hierarchy.
#[derive(Args, Debug, Clone)]
pub struct HierarchyArgs {
    /// Number of contraction steps T.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Weight of the bounding-box compactness term, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub compactness: f64,
    /// Skip contrast normalization and diffusion.
    #[arg(long)]
    pub no_preprocess: bool,
}

impl HierarchyArgs {
    pub fn config(&self) -> TokenizerConfig {
        TokenizerConfig {
            levels: self.levels,
            compactness: self.compactness,
            preprocess: !self.no_preprocess,
            ..Default::default()
        }
    }
}

/// Destination and encoding of tabular results.
#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    /// Write rows to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Emit a JSON array of objects instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct TokenizeArgs {
    /// Images or directories of images.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Superpixel)]
    pub mode: Mode,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    /// Patch side for grid mode.
    #[arg(long, default_value_t = 16)]
    pub patch: usize,
    /// Number of sites for voronoi mode.
    #[arg(long, default_value_t = 256)]
    pub sites: usize,
    /// Seed for voronoi site sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Merge adjacent top-level regions closer than this; also writes
    /// `<stem>.final.lbl`.
    #[arg(long, default_value_t = 0.0)]
    pub final_threshold: f64,
    /// Only write the top level.
    #[arg(long)]
    pub top_only: bool,
    /// Also write `<stem>.overlay.png` with the boundaries of the final partition.
    #[arg(long)]
    pub overlay: bool,
    /// Output directory.
    #[arg(short = 'o', long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    pub image: PathBuf,
    /// Label map (`.lbl`) with the same height and width as the image.
    #[arg(long)]
    pub labels: PathBuf,
    /// Histogram resolution beta.
    #[arg(long, default_value_t = 16)]
    pub bins: usize,
    /// Kernel bandwidth sigma.
    #[arg(long, default_value_t = 0.02)]
    pub bandwidth: f64,
    /// Drop the gradient block (4 beta^2 columns instead of 5 beta^2).
    #[arg(long)]
    pub no_grad: bool,
    /// Output `.spf` file.
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(subcommand)]
    pub metric: Metric,
}

#[derive(Subcommand, Debug)]
pub enum Metric {
    /// Compare the region-feature embedding with a patch embedding on a
    /// random image. Columns: seed,rho,max_rel_deviation,scale,off_diagonal_mass.
    /// Exits 3 if any deviation exceeds the tolerance.
    Equivalence(EquivalenceArgs),
    /// Explained variation of the luminance per hierarchy level.
    /// Columns: image,level,regions,r2.
    R2(R2Args),
    /// Mean region count per level over a corpus, with grid baselines.
    /// Columns: kind,level,patch,mean,ci95,n_images.
    Counts(CountsArgs),
    /// Token counts after the final threshold merge.
    /// Columns: threshold,mean_tokens,ci95,n_images.
    MergeSweep(MergeSweepArgs),
    /// Spectral foreground split of the tokens of one image.
    /// Columns: image,token,size,fiedler,foreground.
    Tokencut(TokencutArgs),
}

#[derive(Args, Debug)]
pub struct EquivalenceArgs {
    /// Patch side rho; the image is rho^2 x rho^2.
    #[arg(long, default_value_t = 4)]
    pub rho: usize,
    /// Number of random images, seeded 0..seeds.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Args, Debug)]
pub struct R2Args {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Args, Debug)]
pub struct CountsArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    /// Grid patch sizes to report alongside.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub patches: Vec<usize>,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Args, Debug)]
pub struct MergeSweepArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05, 0.1, 0.15, 0.2])]
    pub thresholds: Vec<f64>,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Args, Debug)]
pub struct TokencutArgs {
    pub image: PathBuf,
    /// Label map to use as tokens; defaults to a square grid.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Grid patch side when no label map is given.
    #[arg(long, default_value_t = 16)]
    pub patch: usize,
    #[arg(long, default_value_t = 16)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.02)]
    pub bandwidth: f64,
    /// Similarity threshold of the token graph.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// Edge weight below the threshold.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Write the pixel foreground mask as a grayscale PNG.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableArgs,
}
