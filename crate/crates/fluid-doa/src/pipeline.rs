//! End-to-end estimation pipelines.
//!
//! * [`run_tmrls_music`] — aligned operation: rearrange the stacked
//!   snapshots into the virtual ULA, condition the sample covariance
//!   (Toeplitz rectification blended by the shrinkage weight), extract the
//!   signal subspace, and search the spectrum.
//! * [`run_tmr_music`] — non-aligned operation: per-state sample
//!   covariances, coarray vector, Toeplitz reassembly, subspace, spectrum.
//! * [`run_baseline_fpa_music`] — no movement: plain sample covariance on
//!   the physical array with a full eigendecomposition.
//!
//! Ablation variants isolate the covariance conditioning
//! ([`EstimatorVariant::ScmMusic`] skips it) and the subset-based subspace
//! ([`EstimatorVariant::ExactEvd`] replaces it with the full
//! decomposition).

use thiserror::Error;

use crate::covariance::{
    enhanced_scm, scm, shrinkage_coefficient, sub_covariances, toeplitz_rectify, CovMatrix,
    CovarianceError, ShrinkageDiag,
};
use crate::geometry::{ArrayMode, ArraySpec, GeometryError};
use crate::music::{music_spectrum, pick_peaks, MusicError, SpectrumGrid, SteeringFamily};
use crate::sim::{Scene, SceneError, SnapshotSet};
use crate::subspace::{signal_subspace, SubsetSelection, SubspaceBasis, SubspaceError, SubspaceMethod};
use crate::virtual_array::{build_coarray_vector, build_toeplitz_scm, rearrange_ars, VirtualArrayError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("pipeline expects {expected} data, got {got}")]
    ModeMismatch { expected: ArrayMode, got: ArrayMode },
    #[error("could not resolve all paths: found {found} spectral peaks, need {needed}")]
    Resolution { found: usize, needed: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Covariance(#[from] CovarianceError),
    #[error(transparent)]
    VirtualArray(#[from] VirtualArrayError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Music(#[from] MusicError),
}

impl PipelineError {
    /// Data-dependent breakdowns that a Monte-Carlo harness scores as
    /// failed trials rather than aborting the sweep.
    pub fn is_trial_failure(&self) -> bool {
        matches!(
            self,
            PipelineError::Resolution { .. }
                | PipelineError::Subspace(SubspaceError::RankDeficient { .. })
        )
    }
}

/// Which estimator a pipeline run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorVariant {
    /// Aligned pipeline with covariance conditioning and subset subspace.
    TmrlsMusic,
    /// Non-aligned coarray pipeline with subset subspace.
    TmrMusic,
    /// No-movement baseline: plain covariance, full eigendecomposition.
    FpaMusic,
    /// Ablation of the aligned pipeline: raw sample covariance, no
    /// conditioning.
    ScmMusic,
    /// Ablation of either pipeline: full eigendecomposition instead of the
    /// subset reconstruction.
    ExactEvd,
}

impl EstimatorVariant {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorVariant::TmrlsMusic => "tmrls-music",
            EstimatorVariant::TmrMusic => "tmr-music",
            EstimatorVariant::FpaMusic => "fpa-music",
            EstimatorVariant::ScmMusic => "scm-music",
            EstimatorVariant::ExactEvd => "exact-evd",
        }
    }
}

/// Everything a single estimation run needs besides the data.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub array: ArraySpec,
    pub scene: Scene,
    pub variant: EstimatorVariant,
    /// True path count handed to the estimator (source enumeration is out
    /// of scope).
    pub num_paths: usize,
    /// Subset size for the reduced-cost subspace reconstruction.
    pub subset_size: usize,
    pub subset_selection: SubsetSelection,
    pub grid_step_deg: f64,
}

impl PipelineConfig {
    /// Builds a config with the defaults used throughout: the scene's true
    /// path count, a half-dimension subset, and a 0.05° grid.
    pub fn new(
        array: ArraySpec,
        scene: Scene,
        variant: EstimatorVariant,
    ) -> Result<Self, PipelineError> {
        let num_paths = scene.num_paths();
        let dim = subspace_input_dim(&array, variant);
        let subset_size = (dim / 2).max(num_paths).min(dim);
        let cfg = Self {
            array,
            scene,
            variant,
            num_paths,
            subset_size,
            subset_selection: SubsetSelection::Seeded(0),
            grid_step_deg: 0.05,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_subset_size(mut self, subset_size: usize) -> Result<Self, PipelineError> {
        self.subset_size = subset_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_subset_seed(mut self, seed: u64) -> Self {
        self.subset_selection = SubsetSelection::Seeded(seed);
        self
    }

    pub fn with_grid_step(mut self, grid_step_deg: f64) -> Result<Self, PipelineError> {
        self.grid_step_deg = grid_step_deg;
        self.validate()?;
        Ok(self)
    }

    /// Dimension of the covariance the subspace step sees.
    pub fn subspace_dim(&self) -> usize {
        subspace_input_dim(&self.array, self.variant)
    }

    /// Largest resolvable path count for this array and variant: one below
    /// the virtual aperture for aligned or no-movement processing, the
    /// maximum coarray lag for non-aligned processing.
    pub fn max_paths(&self) -> usize {
        match pipeline_kind(&self.array, self.variant) {
            PipelineKind::Aligned => self.array.virtual_elements() - 1,
            PipelineKind::NonAligned => self.array.max_coarray_lag(),
            PipelineKind::Fixed => self.array.num_antennas() - 1,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let invalid = |msg: String| Err(PipelineError::InvalidConfig(msg));
        match (self.variant, self.array.mode()) {
            (EstimatorVariant::TmrlsMusic | EstimatorVariant::ScmMusic, ArrayMode::Nars) => {
                return invalid(format!(
                    "variant {} needs an aligned (ars) array",
                    self.variant.name()
                ));
            }
            (EstimatorVariant::TmrMusic, ArrayMode::Ars) => {
                return invalid("variant tmr-music needs a non-aligned (nars) array".into());
            }
            _ => {}
        }
        if self.variant == EstimatorVariant::FpaMusic && self.array.num_movements() != 0 {
            return invalid("fpa-music is the no-movement baseline, set num_movements = 0".into());
        }
        if self.num_paths != self.scene.num_paths() {
            return invalid(format!(
                "num_paths {} disagrees with the scene's {} paths",
                self.num_paths,
                self.scene.num_paths()
            ));
        }
        let max = self.max_paths();
        if self.num_paths > max || max == 0 {
            return invalid(format!(
                "{} paths exceed the identifiability bound {} for this array",
                self.num_paths, max
            ));
        }
        let dim = self.subspace_dim();
        if self.subset_size < self.num_paths || self.subset_size > dim {
            return invalid(format!(
                "subset size {} outside [{}, {}]",
                self.subset_size, self.num_paths, dim
            ));
        }
        if !(self.grid_step_deg > 0.0 && self.grid_step_deg < 180.0) {
            return invalid(format!("grid step {} out of range", self.grid_step_deg));
        }
        Ok(())
    }

    fn subspace_method(&self) -> SubspaceMethod {
        match self.variant {
            EstimatorVariant::TmrlsMusic | EstimatorVariant::TmrMusic | EstimatorVariant::ScmMusic => {
                SubspaceMethod::Nystrom {
                    subset_size: self.subset_size,
                    selection: self.subset_selection,
                }
            }
            EstimatorVariant::ExactEvd | EstimatorVariant::FpaMusic => SubspaceMethod::Exact,
        }
    }
}

enum PipelineKind {
    Aligned,
    NonAligned,
    Fixed,
}

fn pipeline_kind(array: &ArraySpec, variant: EstimatorVariant) -> PipelineKind {
    match variant {
        EstimatorVariant::FpaMusic => PipelineKind::Fixed,
        EstimatorVariant::TmrlsMusic | EstimatorVariant::ScmMusic => PipelineKind::Aligned,
        EstimatorVariant::TmrMusic => PipelineKind::NonAligned,
        EstimatorVariant::ExactEvd => match array.mode() {
            ArrayMode::Ars => PipelineKind::Aligned,
            ArrayMode::Nars => PipelineKind::NonAligned,
        },
    }
}

fn subspace_input_dim(array: &ArraySpec, variant: EstimatorVariant) -> usize {
    match pipeline_kind(array, variant) {
        PipelineKind::Aligned => array.virtual_elements(),
        PipelineKind::NonAligned => array.max_coarray_lag() + 1,
        PipelineKind::Fixed => array.num_antennas(),
    }
}

/// Side information from a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Shrinkage weight and its trace inputs (aligned conditioning only).
    pub shrinkage: Option<ShrinkageDiag>,
    /// Subset indices used by the reduced-cost subspace, when applicable.
    pub subset_indices: Option<Vec<usize>>,
    /// Whether the subspace came from a full eigendecomposition.
    pub exact_subspace: bool,
    pub variant: EstimatorVariant,
}

/// Sorted direction estimates plus the spectrum they were read from.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    /// Exactly `num_paths` estimates, sorted ascending, in degrees.
    pub doas_deg: Vec<f64>,
    pub spectrum: SpectrumGrid,
    pub diagnostics: Diagnostics,
}

fn subspace_and_diag(
    cfg: &PipelineConfig,
    cov: &CovMatrix,
    shrinkage: Option<ShrinkageDiag>,
) -> Result<(SubspaceBasis, Diagnostics), PipelineError> {
    let basis = signal_subspace(cov, cfg.num_paths, &cfg.subspace_method())?;
    let diagnostics = Diagnostics {
        shrinkage,
        subset_indices: basis.selected_indices().map(|s| s.to_vec()),
        exact_subspace: basis.is_exact(),
        variant: cfg.variant,
    };
    Ok((basis, diagnostics))
}

fn finish(
    cfg: &PipelineConfig,
    basis: &SubspaceBasis,
    steering: &SteeringFamily,
    diagnostics: Diagnostics,
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    let spectrum = music_spectrum(basis, steering, cfg.grid_step_deg)?;
    Ok((spectrum, diagnostics))
}

fn ars_front(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
    conditioned: bool,
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    let stacked = match data {
        SnapshotSet::Ars { data } => data,
        SnapshotSet::Nars { .. } => {
            return Err(PipelineError::ModeMismatch {
                expected: ArrayMode::Ars,
                got: ArrayMode::Nars,
            })
        }
    };
    let y = rearrange_ars(stacked, &cfg.array)?;
    let sample = scm(&y.data)?;
    let (cov, shrink) = if conditioned {
        let rectified = toeplitz_rectify(&sample);
        let diag = shrinkage_coefficient(&sample, &rectified, stacked.ncols())?;
        (enhanced_scm(&sample, &rectified, diag.rho)?, Some(diag))
    } else {
        (sample, None)
    };
    let (basis, diagnostics) = subspace_and_diag(cfg, &cov, shrink)?;
    let steering = SteeringFamily::VirtualUla {
        elements: cfg.array.virtual_elements(),
        spacing: cfg.array.step(),
    };
    finish(cfg, &basis, &steering, diagnostics)
}

fn nars_front(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    if data.mode() != ArrayMode::Nars {
        return Err(PipelineError::ModeMismatch {
            expected: ArrayMode::Nars,
            got: data.mode(),
        });
    }
    let covs = sub_covariances(data)?;
    nars_front_from_covs(cfg, &covs)
}

fn nars_front_from_covs(
    cfg: &PipelineConfig,
    covs: &[CovMatrix],
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    let r = build_coarray_vector(covs, &cfg.array)?;
    let toeplitz = build_toeplitz_scm(&r);
    let (basis, diagnostics) = subspace_and_diag(cfg, &toeplitz, None)?;
    let steering = SteeringFamily::Coarray {
        max_lag: cfg.array.max_coarray_lag(),
        spacing: cfg.array.step(),
    };
    finish(cfg, &basis, &steering, diagnostics)
}

fn fpa_front(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    // With no movement both modes observe a plain physical ULA; accept
    // either snapshot layout.
    let sample = match data {
        SnapshotSet::Ars { data } => scm(data)?,
        SnapshotSet::Nars { states } => scm(&states[0])?,
    };
    if sample.dim() != cfg.array.num_antennas() {
        return Err(PipelineError::InvalidConfig(format!(
            "baseline expects {} physical rows, got {}",
            cfg.array.num_antennas(),
            sample.dim()
        )));
    }
    let (basis, diagnostics) = subspace_and_diag(cfg, &sample, None)?;
    let steering = SteeringFamily::VirtualUla {
        elements: cfg.array.num_antennas(),
        spacing: cfg.array.step(),
    };
    finish(cfg, &basis, &steering, diagnostics)
}

/// Spectrum and diagnostics without peak extraction, for spectrum exports.
pub fn compute_spectrum(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<(SpectrumGrid, Diagnostics), PipelineError> {
    cfg.validate()?;
    match pipeline_kind(&cfg.array, cfg.variant) {
        PipelineKind::Fixed => fpa_front(cfg, data),
        PipelineKind::Aligned => {
            let conditioned = cfg.variant != EstimatorVariant::ScmMusic;
            ars_front(cfg, data, conditioned)
        }
        PipelineKind::NonAligned => nars_front(cfg, data),
    }
}

fn extract(
    cfg: &PipelineConfig,
    spectrum: SpectrumGrid,
    diagnostics: Diagnostics,
) -> Result<EstimationResult, PipelineError> {
    match pick_peaks(&spectrum, cfg.num_paths) {
        Ok(doas_deg) => Ok(EstimationResult {
            doas_deg,
            spectrum,
            diagnostics,
        }),
        Err(MusicError::ResolutionFailure { found, needed }) => {
            Err(PipelineError::Resolution { found, needed })
        }
        Err(other) => Err(other.into()),
    }
}

/// Runs the estimator selected by the config.
pub fn run(cfg: &PipelineConfig, data: &SnapshotSet) -> Result<EstimationResult, PipelineError> {
    let (spectrum, diagnostics) = compute_spectrum(cfg, data)?;
    extract(cfg, spectrum, diagnostics)
}

fn expect_variant(
    cfg: &PipelineConfig,
    wanted: EstimatorVariant,
) -> Result<(), PipelineError> {
    if cfg.variant != wanted {
        return Err(PipelineError::InvalidConfig(format!(
            "config built for {}, called as {}",
            cfg.variant.name(),
            wanted.name()
        )));
    }
    Ok(())
}

/// Aligned pipeline: rearrangement, conditioned covariance, subset
/// subspace, spectral search.
pub fn run_tmrls_music(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<EstimationResult, PipelineError> {
    expect_variant(cfg, EstimatorVariant::TmrlsMusic)?;
    run(cfg, data)
}

/// Non-aligned pipeline: per-state covariances, coarray reassembly, subset
/// subspace, spectral search.
pub fn run_tmr_music(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<EstimationResult, PipelineError> {
    expect_variant(cfg, EstimatorVariant::TmrMusic)?;
    run(cfg, data)
}

/// No-movement baseline on the physical array.
pub fn run_baseline_fpa_music(
    cfg: &PipelineConfig,
    data: &SnapshotSet,
) -> Result<EstimationResult, PipelineError> {
    expect_variant(cfg, EstimatorVariant::FpaMusic)?;
    run(cfg, data)
}

/// Aligned-pipeline tail on a covariance supplied directly (for example an
/// analytic one): subspace extraction and spectral search only.
pub fn estimate_ars_from_cov(
    cfg: &PipelineConfig,
    cov: &CovMatrix,
) -> Result<EstimationResult, PipelineError> {
    cfg.validate()?;
    if cov.dim() != cfg.array.virtual_elements() {
        return Err(PipelineError::InvalidConfig(format!(
            "covariance is {}-dimensional, virtual array has {} elements",
            cov.dim(),
            cfg.array.virtual_elements()
        )));
    }
    let (basis, diagnostics) = subspace_and_diag(cfg, cov, None)?;
    let steering = SteeringFamily::VirtualUla {
        elements: cfg.array.virtual_elements(),
        spacing: cfg.array.step(),
    };
    let (spectrum, diagnostics) = finish(cfg, &basis, &steering, diagnostics)?;
    extract(cfg, spectrum, diagnostics)
}

/// Non-aligned-pipeline tail on per-state covariances supplied directly.
pub fn estimate_nars_from_sub_covs(
    cfg: &PipelineConfig,
    covs: &[CovMatrix],
) -> Result<EstimationResult, PipelineError> {
    cfg.validate()?;
    let (spectrum, diagnostics) = nars_front_from_covs(cfg, covs)?;
    extract(cfg, spectrum, diagnostics)
}
