//! Experiment configuration: TOML schema, validation, and resolution of
//! sweep points into pipeline configs.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::{ArrayMode, ArraySpec};
use crate::pipeline::{EstimatorVariant, PipelineConfig};
use crate::sim::Scene;

fn default_trials() -> usize {
    500
}

fn default_power() -> f64 {
    1.0
}

fn default_grid_step() -> f64 {
    0.05
}

/// Physical array under test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArraySection {
    pub mode: ArrayMode,
    pub num_antennas: usize,
    /// Movement step in carrier wavelengths.
    pub step: f64,
}

/// Propagation scene. The noise variance is derived per sweep point from
/// the SNR axis as `path_gain_var · signal_power / 10^(snr/10)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSection {
    pub num_users: usize,
    pub paths_per_user: usize,
    pub doas_deg: Vec<f64>,
    #[serde(default = "default_power")]
    pub path_gain_var: f64,
    #[serde(default = "default_power")]
    pub signal_power: f64,
}

/// Estimator selection and its knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorSection {
    pub variant: EstimatorVariant,
    /// Absolute subset size for the reduced-cost subspace step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_size: Option<usize>,
    /// Subset size as a fraction of the subspace input dimension
    /// (default 0.5 when no absolute size is given).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_fraction: Option<f64>,
    #[serde(default = "default_grid_step")]
    pub grid_step_deg: f64,
}

/// Sweep axes. Every combination of the three axes becomes one table row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    pub num_blocks: Vec<usize>,
    pub num_movements: Vec<usize>,
}

/// A complete experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub array: ArraySection,
    pub scene: SceneSection,
    pub estimator: EstimatorSection,
    pub sweep: SweepSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks global fields and resolves every sweep point, so invalid
    /// combinations surface before any computation.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.sweep.snr_db.is_empty()
            || self.sweep.num_blocks.is_empty()
            || self.sweep.num_movements.is_empty()
        {
            return Err(HarnessError::Config("sweep axes must be non-empty".into()));
        }
        if let Some(f) = self.estimator.subset_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(HarnessError::Config(format!(
                    "subset_fraction {f} outside (0, 1]"
                )));
            }
        }
        for &g in &self.sweep.num_movements {
            for &n in &self.sweep.num_blocks {
                for &snr in &self.sweep.snr_db {
                    self.resolve_point(g, n, snr)?;
                }
            }
        }
        Ok(())
    }

    /// Scene with the noise variance implied by an SNR in dB.
    pub fn scene_at(&self, snr_db: f64) -> Result<Scene, HarnessError> {
        let s = Scene::new(
            self.scene.num_users,
            self.scene.paths_per_user,
            self.scene.doas_deg.clone(),
            self.scene.path_gain_var,
            self.scene.signal_power,
            1.0,
        )?;
        Ok(s.with_snr_db(snr_db))
    }

    /// Pipeline config for one sweep point `(num_movements, num_blocks,
    /// snr_db)`. The block count is carried by the dataset, not the
    /// config, so it only participates in validation.
    pub fn resolve_point(
        &self,
        num_movements: usize,
        num_blocks: usize,
        snr_db: f64,
    ) -> Result<PipelineConfig, HarnessError> {
        if num_blocks == 0 {
            return Err(HarnessError::Config("num_blocks must be at least 1".into()));
        }
        let array = ArraySpec::new(
            self.array.mode,
            self.array.num_antennas,
            num_movements,
            self.array.step,
        )?;
        let scene = self.scene_at(snr_db)?;
        let mut cfg = PipelineConfig::new(array, scene, self.estimator.variant)?;
        let dim = cfg.subspace_dim();
        let subset = match (self.estimator.subset_size, self.estimator.subset_fraction) {
            (Some(s), _) => s,
            (None, fraction) => {
                let f = fraction.unwrap_or(0.5);
                ((dim as f64 * f).floor() as usize).clamp(cfg.num_paths, dim)
            }
        };
        cfg = cfg
            .with_subset_size(subset)?
            .with_grid_step(self.estimator.grid_step_deg)?;
        Ok(cfg)
    }
}
