//! Hybrid short-term wind speed forecasting.
//!
//! The pipeline denoises a series with singular spectrum analysis, trains an
//! attention-GRU on delay-embedded windows for a preliminary forecast,
//! decomposes the forecast residuals with variational mode decomposition and
//! trains one GRU per mode to forecast the error. The final forecast is the
//! preliminary forecast plus the summed mode forecasts.
//!
//! Every stage is usable on its own; see the crate's `examples/` directory.

pub mod cli;
pub mod config;
pub mod error;
pub mod metrics;
pub mod neural;
pub mod output;
pub mod pipeline;
pub mod psr;
pub mod series;
pub mod ssa;
pub mod synth;
pub mod vmd;

pub use error::{Error, Result};
pub use metrics::{mae, mape, r2, rmse, EvaluationReport};
pub use neural::{ModelKind, ModelSpec, NetworkParams, TrainConfig};
pub use pipeline::{run_hybrid, ErrorDecomposer, HybridForecast, PipelineConfig, StageConfig};
pub use psr::EmbeddingSpec;
pub use series::{make_windows, split, Normalizer, Series, SplitSpec, WindowSet};
pub use ssa::{ssa_decompose, ssa_denoise, SsaConfig, SsaDecomposition};
pub use vmd::{vmd_decompose, vmd_reconstruct, OmegaInit, VmdConfig, VmdDecomposition};
