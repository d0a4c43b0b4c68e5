use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use spixtok_core::analysis::{explained_variation, mean_ci95, token_count_stats, tokencut};
use spixtok_core::features::{extract_features, verify_embedding_equivalence};
use spixtok_core::formats::read_label_map;
use spixtok_core::imageproc::{load_image, save_gray_png};
use spixtok_core::tokenizer::{preprocess, threshold_merge, tokenize_grid, tokenize_superpixels};
use spixtok_core::{Error, FeatureConfig, Result};

use crate::args::{CountsArgs, EquivalenceArgs, EvalArgs, MergeSweepArgs, Metric, R2Args, TokencutArgs};
use crate::inputs::expand;
use crate::output::Table;
use crate::{CmdResult, Failure};

pub fn run(args: EvalArgs) -> CmdResult {
    match args.metric {
        Metric::Equivalence(a) => equivalence(a),
        Metric::R2(a) => r2(a),
        Metric::Counts(a) => counts(a),
        Metric::MergeSweep(a) => merge_sweep(a),
        Metric::Tokencut(a) => tokencut_cmd(a),
    }
}

fn equivalence(args: EquivalenceArgs) -> CmdResult {
    if !(args.tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance = {} must be non-negative", args.tolerance)).into());
    }
    let side = args.rho * args.rho;
    let reports = (0..args.seeds)
        .into_par_iter()
        .map(|seed| verify_embedding_equivalence((side, side), args.rho, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["seed", "rho", "max_rel_deviation", "scale", "off_diagonal_mass"]);
    let mut worst = 0.0f64;
    for (seed, r) in reports.iter().enumerate() {
        worst = worst.max(r.max_rel_deviation);
        table.push(vec![
            json!(seed),
            json!(args.rho),
            json!(r.max_rel_deviation),
            json!(r.scale),
            json!(r.off_diagonal_mass),
        ]);
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    if worst > args.tolerance {
        return Err(Failure::Tolerance(format!(
            "max deviation {worst:e} exceeds tolerance {:e}",
            args.tolerance
        )));
    }
    Ok(())
}

fn r2(args: R2Args) -> CmdResult {
    let config = args.hierarchy.config();
    config.validate()?;
    let paths = expand(&args.inputs)?;
    let results = paths
        .par_iter()
        .map(|p| -> Result<Vec<(usize, f64)>> {
            let img = load_image(p)?;
            let hier = tokenize_superpixels(&img, &config)?;
            hier.levels
                .iter()
                .map(|level| Ok((level.n_regions(), explained_variation(&img, level)?)))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["image", "level", "regions", "r2"]);
    for (path, rows) in paths.iter().zip(results) {
        for (t, (regions, r2)) in rows.into_iter().enumerate() {
            table.push(vec![display(path), json!(t), json!(regions), json!(r2)]);
        }
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    Ok(())
}

fn counts(args: CountsArgs) -> CmdResult {
    let config = args.hierarchy.config();
    let paths = expand(&args.inputs)?;
    let stats = token_count_stats(&paths, &config, &args.patches)?;
    if stats.skipped > 0 {
        log::warn!("{} unreadable images skipped", stats.skipped);
    }
    let mut table = Table::new(&["kind", "level", "patch", "mean", "ci95", "n_images"]);
    for l in &stats.levels {
        table.push(vec![
            json!("superpixel"),
            json!(l.level),
            Value::Null,
            json!(l.mean),
            json!(l.ci95),
            json!(stats.n_images),
        ]);
    }
    for g in &stats.grid {
        table.push(vec![
            json!("grid"),
            Value::Null,
            json!(g.patch),
            json!(g.mean),
            Value::Null,
            json!(stats.n_images),
        ]);
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    Ok(())
}

fn merge_sweep(args: MergeSweepArgs) -> CmdResult {
    let config = args.hierarchy.config();
    config.validate()?;
    if let Some(t) = args.thresholds.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidParameter(format!("threshold = {t} must be non-negative")).into());
    }
    let paths = expand(&args.inputs)?;
    if paths.is_empty() {
        return Err(Error::EmptyCorpus { skipped: 0 }.into());
    }
    let per_image = paths
        .par_iter()
        .map(|p| -> Result<Vec<usize>> {
            let img = load_image(p)?;
            let hier = tokenize_superpixels(&img, &config)?;
            let working = if config.preprocess {
                preprocess(&img, config.diffusion)?
            } else {
                img
            };
            args.thresholds
                .iter()
                .map(|&t| Ok(threshold_merge(hier.top(), &working, t)?.n_regions()))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["threshold", "mean_tokens", "ci95", "n_images"]);
    for (i, &t) in args.thresholds.iter().enumerate() {
        let v: Vec<f64> = per_image.iter().map(|c| c[i] as f64).collect();
        let (mean, ci95) = mean_ci95(&v);
        table.push(vec![json!(t), json!(mean), json!(ci95), json!(v.len())]);
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    Ok(())
}

fn tokencut_cmd(args: TokencutArgs) -> CmdResult {
    let config = FeatureConfig {
        bins: args.bins,
        bandwidth: args.bandwidth,
        include_gradients: true,
    };
    config.validate()?;
    let img = load_image(&args.image)?;
    let partition = match &args.labels {
        Some(path) => read_label_map(path)?,
        None => tokenize_grid(img.height(), img.width(), args.patch)?,
    };
    if (partition.height(), partition.width()) != (img.height(), img.width()) {
        return Err(Failure::Data(format!(
            "label map is {}x{} but image {} is {}x{}",
            partition.height(),
            partition.width(),
            args.image.display(),
            img.height(),
            img.width()
        )));
    }
    let features = extract_features(&img, &partition, &config)?;
    let result = tokencut(&features, &partition, args.tau, args.epsilon)?;
    if let Some(mask) = &args.mask {
        save_gray_png(&result.mask, img.height(), img.width(), mask)?;
    }
    let sizes = partition.sizes();
    let mut table = Table::new(&["image", "token", "size", "fiedler", "foreground"]);
    for (i, (&f, &fg)) in result.fiedler.iter().zip(&result.foreground).enumerate() {
        table.push(vec![
            display(&args.image),
            json!(i),
            json!(sizes[i]),
            json!(f),
            json!(fg),
        ]);
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    Ok(())
}

fn display(p: &Path) -> Value {
    json!(p.display().to_string())
}
