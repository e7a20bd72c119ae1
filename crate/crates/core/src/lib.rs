//! Full-reference image quality assessment for color-quantized images.

pub mod imgcore;
pub mod metrics;
pub mod distort;
pub mod dataset;
pub mod stats;
pub mod cli;
