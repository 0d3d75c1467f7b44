//! Configuration-driven Monte-Carlo harness.
//!
//! An experiment is a TOML config (see [`ExperimentConfig`]) naming an
//! array, a scene, an estimator variant, and sweep axes over SNR, block
//! count, and movement count. The harness fans independent trials out
//! over a worker pool, scores them against the true directions, and emits
//! CSV tables plus a JSON run manifest. Per-trial substream seeding makes
//! every output byte-identical regardless of worker count.

mod config;
mod experiment;
mod presets;

pub use config::{
    ArraySection, EstimatorSection, ExperimentConfig, SceneSection, SweepSection,
};
pub use experiment::{
    compute_rmse, run_experiment, run_rho_surface, run_spectrum, write_manifest, write_rho_csv,
    write_rmse_csv, write_spectrum_csv, RhoRow, RmseRow, RmseTable, RunManifest, SpectrumRun,
};
pub use presets::{preset, preset_names};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::music::MusicError;
use crate::pipeline::PipelineError;
use crate::sim::SceneError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Music(#[from] MusicError),
    #[error("estimate list has {got} entries, truth has {expected}")]
    RmseLength { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
