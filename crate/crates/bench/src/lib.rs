//! Shared fixtures for the benchmarks.

use std::path::{Path, PathBuf};

use spixtok_core::imageproc::load_image;
use spixtok_core::{ImageBuffer, Result};

/// Directory holding the bundled test images.
pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

/// A 481x321 natural image.
pub fn natural481() -> Result<ImageBuffer> {
    load_image(data_dir().join("natural481/coffee.png"))
}

/// A 224x224 natural image.
pub fn natural224() -> Result<ImageBuffer> {
    load_image(data_dir().join("natural224/coffee_0.png"))
}
