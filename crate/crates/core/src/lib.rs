//! Interpolation-based image inpainting.
//!
//! Four reconstruction methods share one data model ([`Plane`] +
//! [`PixelMask`]): local bicubic fitting ([`cubic`]), ordinary kriging
//! ([`kriging`]), radial basis functions ([`rbf`]) and an HDMR
//! decomposition ([`hdmr`]). [`corruption`] generates the damage,
//! [`metrics`] scores the repair and [`harness`] runs and reports whole
//! benchmark suites.

pub mod corruption;
pub mod cubic;
pub mod error;
mod font;
pub mod harness;
pub mod hdmr;
pub mod kriging;
pub mod linalg;
pub mod metrics;
pub mod neighbors;
pub mod plane;
pub mod raster;
pub mod rbf;
pub mod rng;
pub mod tiling;

pub use corruption::{apply_corruption, detect_unknown, gen_mask, CorruptionKind, CorruptionSpec};
pub use cubic::{cubic_inpaint, eval_bicubic, fit_bicubic_patch, BicubicPatch};
pub use error::{InpaintError, Result};
pub use metrics::{mse, psnr, score, ssim, ScoreTriple};
pub use plane::{
    extract_tile, merge_channels, split_channels, write_back_unknown, Image, PixelMask, Plane,
    TileRect,
};
pub use harness::{
    inpaint_image, inpaint_plane, mark_best, one_way_anova, percent_spread, read_csv, run_case,
    run_suite, write_csv, write_markdown, AnovaResult, BenchCase, BenchmarkReport, Method,
    MethodOptions, ReportRow, ScoreRecord, SuiteConfig, SuiteOptions,
};
pub use hdmr::{hdmr_decompose, hdmr_inpaint, hdmr_inpaint_colour, HdmrExpansion};
pub use kriging::{
    empirical_variogram, fit_variogram_model, kriging_inpaint, kriging_weights, KrigingWeights,
    VariogramFamily, VariogramModel,
};
pub use raster::{read_mask, read_raster, write_mask, write_raster};
pub use rbf::{eval_rbf, fit_rbf, rbf_inpaint, KernelKind, RbfKernel, RbfModel, RbfParams};
pub use tiling::{TilingPolicy, TilingRegime};
