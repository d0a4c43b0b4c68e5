use spixtok_core::features::extract_features;
use spixtok_core::formats::{read_label_map, write_features};
use spixtok_core::imageproc::load_image;
use spixtok_core::FeatureConfig;

use crate::args::FeaturesArgs;
use crate::{CmdResult, Failure};

pub fn run(args: FeaturesArgs) -> CmdResult {
    let config = FeatureConfig {
        bins: args.bins,
        bandwidth: args.bandwidth,
        include_gradients: !args.no_grad,
    };
    config.validate()?;
    let img = load_image(&args.image)?;
    let labels = read_label_map(&args.labels)?;
    if (labels.height(), labels.width()) != (img.height(), img.width()) {
        return Err(Failure::Data(format!(
            "label map {} is {}x{} but image {} is {}x{}",
            args.labels.display(),
            labels.height(),
            labels.width(),
            args.image.display(),
            img.height(),
            img.width()
        )));
    }
    let features = extract_features(&img, &labels, &config)?;
    write_features(&features, &args.output)?;
    println!("tokens,dim\n{},{}", features.n_tokens(), features.dim());
    Ok(())
}
