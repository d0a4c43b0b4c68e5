use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use spixtok_core::formats::{save_boundary_overlay, write_label_map};
use spixtok_core::imageproc::load_image;
use spixtok_core::tokenizer::{preprocess, threshold_merge, tokenize_grid, tokenize_superpixels, tokenize_voronoi};
use spixtok_core::{ImageBuffer, Result};

use crate::args::{Mode, TokenizeArgs};
use crate::inputs::{expand, stem};
use crate::output::Table;
use crate::CmdResult;

const OVERLAY_COLOR: [u8; 3] = [255, 32, 32];

/// One written label map and its region count.
struct Written {
    level: Value,
    regions: usize,
}

pub fn run(args: TokenizeArgs) -> CmdResult {
    let config = args.hierarchy.config();
    config.validate()?;
    if !(args.final_threshold >= 0.0) {
        return Err(spixtok_core::Error::InvalidParameter(format!(
            "final threshold = {} must be non-negative",
            args.final_threshold
        ))
        .into());
    }
    let paths = expand(&args.inputs)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let results: Vec<Result<Vec<Written>>> = paths.par_iter().map(|p| tokenize_one(p, &args)).collect();
    let mut table = Table::new(&["image", "level", "regions"]);
    for (path, res) in paths.iter().zip(results) {
        for w in res? {
            table.push(vec![json!(path.display().to_string()), w.level, json!(w.regions)]);
        }
    }
    table.write(args.table.output.as_deref(), args.table.json)?;
    Ok(())
}

fn tokenize_one(path: &Path, args: &TokenizeArgs) -> Result<Vec<Written>> {
    let img = load_image(path)?;
    let config = args.hierarchy.config();
    let name = stem(path);
    let out = |suffix: &str| -> PathBuf { args.out_dir.join(format!("{name}.{suffix}")) };
    let mut written = Vec::new();
    let top = match args.mode {
        Mode::Superpixel => {
            let hier = tokenize_superpixels(&img, &config)?;
            let first = if args.top_only { config.levels } else { 0 };
            for (t, level) in hier.levels.iter().enumerate().skip(first) {
                write_label_map(level, out(&format!("t{t}.lbl")))?;
                written.push(Written {
                    level: json!(t),
                    regions: level.n_regions(),
                });
            }
            hier.levels.into_iter().last().expect("hierarchy has a top level")
        }
        Mode::Grid | Mode::Voronoi => {
            let p = if args.mode == Mode::Grid {
                tokenize_grid(img.height(), img.width(), args.patch)?
            } else {
                tokenize_voronoi(img.height(), img.width(), args.sites, args.seed)?
            };
            write_label_map(&p, out("lbl"))?;
            written.push(Written {
                level: json!(0),
                regions: p.n_regions(),
            });
            p
        }
    };
    let last = if args.final_threshold > 0.0 {
        let merged = threshold_merge(&top, &working_image(&img, args)?, args.final_threshold)?;
        write_label_map(&merged, out("final.lbl"))?;
        written.push(Written {
            level: json!("final"),
            regions: merged.n_regions(),
        });
        merged
    } else {
        top
    };
    if args.overlay {
        save_boundary_overlay(&img, &last, OVERLAY_COLOR, out("overlay.png"))?;
    }
    Ok(written)
}

fn working_image(img: &ImageBuffer, args: &TokenizeArgs) -> Result<ImageBuffer> {
    let config = args.hierarchy.config();
    if config.preprocess {
        preprocess(img, config.diffusion)
    } else {
        Ok(img.clone())
    }
}
