//! Sweep execution, scoring, and artifact writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, HarnessError};
use crate::covariance::{scm, shrinkage_coefficient, toeplitz_rectify};
use crate::music::SpectrumGrid;
use crate::pipeline::{self, PipelineConfig, PipelineError};
use crate::seeds::derive_seed;
use crate::sim::{simulate_dataset, SnapshotSet};
use crate::virtual_array::rearrange_ars;

/// Worst-case per-path error assigned to trials that fail to resolve,
/// so breakdown regions show up in the error tables instead of being
/// silently dropped.
pub const FAILURE_ERROR_DEG: f64 = 90.0;

/// One sweep point of an error table.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseRow {
    pub snr_db: f64,
    pub num_blocks: usize,
    pub num_movements: usize,
    pub rmse_deg: f64,
    /// Trials that could not resolve all paths (scored at the worst-case
    /// error).
    pub failures: usize,
    /// Mean shrinkage weight over the successful trials, when the variant
    /// computes one.
    pub mean_rho: Option<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseTable {
    pub rows: Vec<RmseRow>,
}

/// Root-mean-square error over trials and paths with positional pairing
/// of sorted estimate lists against the sorted truth.
pub fn compute_rmse(estimates: &[Vec<f64>], truth: &[f64]) -> Result<f64, HarnessError> {
    let kl = truth.len();
    let mut acc = 0.0;
    for est in estimates {
        if est.len() != kl {
            return Err(HarnessError::RmseLength {
                expected: kl,
                got: est.len(),
            });
        }
        for (e, t) in est.iter().zip(truth) {
            acc += (e - t) * (e - t);
        }
    }
    Ok((acc / (estimates.len() * kl) as f64).sqrt())
}

struct TrialOutcome {
    /// Sorted estimates, or `None` when the trial failed to resolve.
    estimates: Option<Vec<f64>>,
    rho: Option<f64>,
}

fn run_trial(
    config: &ExperimentConfig,
    point: &PipelineConfig,
    num_blocks: usize,
    path: &[u64],
) -> Result<TrialOutcome, HarnessError> {
    let dataset_seed = derive_seed(config.master_seed, &[path[0], path[1], path[2], path[3], 0]);
    let subset_seed = derive_seed(config.master_seed, &[path[0], path[1], path[2], path[3], 1]);
    let data = simulate_dataset(&point.scene, &point.array, num_blocks, dataset_seed)?;
    let cfg = point.clone().with_subset_seed(subset_seed);
    match pipeline::run(&cfg, &data) {
        Ok(result) => Ok(TrialOutcome {
            estimates: Some(result.doas_deg),
            rho: result.diagnostics.shrinkage.map(|s| s.rho),
        }),
        Err(e) if e.is_trial_failure() => Ok(TrialOutcome {
            estimates: None,
            rho: None,
        }),
        Err(e) => Err(e.into()),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))
}

/// Runs the full sweep. Results are deterministic in the master seed and
/// independent of `workers` (0 = one thread per core).
pub fn run_experiment(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<RmseTable, HarnessError> {
    config.validate()?;
    let pool = pool(workers)?;
    let mut rows = Vec::new();
    for (gi, &g) in config.sweep.num_movements.iter().enumerate() {
        for (ni, &n) in config.sweep.num_blocks.iter().enumerate() {
            for (si, &snr) in config.sweep.snr_db.iter().enumerate() {
                let point = config.resolve_point(g, n, snr)?;
                let truth = point.scene.sorted_doas_deg();
                let outcomes: Result<Vec<TrialOutcome>, HarnessError> = pool.install(|| {
                    (0..config.trials)
                        .into_par_iter()
                        .map(|t| {
                            run_trial(config, &point, n, &[gi as u64, ni as u64, si as u64, t as u64])
                        })
                        .collect()
                });
                let outcomes = outcomes?;

                let estimates: Vec<Vec<f64>> = outcomes
                    .iter()
                    .map(|o| match &o.estimates {
                        Some(est) => est.clone(),
                        None => truth.iter().map(|t| t + FAILURE_ERROR_DEG).collect(),
                    })
                    .collect();
                let rmse_deg = compute_rmse(&estimates, &truth)?;
                let failures = outcomes.iter().filter(|o| o.estimates.is_none()).count();
                let rhos: Vec<f64> = outcomes.iter().filter_map(|o| o.rho).collect();
                let mean_rho = if rhos.is_empty() {
                    None
                } else {
                    Some(rhos.iter().sum::<f64>() / rhos.len() as f64)
                };
                rows.push(RmseRow {
                    snr_db: snr,
                    num_blocks: n,
                    num_movements: g,
                    rmse_deg,
                    failures,
                    mean_rho,
                    trials: config.trials,
                });
            }
        }
    }
    Ok(RmseTable { rows })
}

/// One spectrum realization at the first sweep point.
#[derive(Debug, Clone)]
pub struct SpectrumRun {
    pub spectrum: SpectrumGrid,
    /// Peak extraction outcome: the sorted estimates, or the number of
    /// maxima found when resolution failed.
    pub peaks: Result<Vec<f64>, usize>,
}

/// Computes the spectrum of a single seeded realization at the first
/// sweep point of the config.
pub fn run_spectrum(config: &ExperimentConfig) -> Result<SpectrumRun, HarnessError> {
    config.validate()?;
    let g = config.sweep.num_movements[0];
    let n = config.sweep.num_blocks[0];
    let snr = config.sweep.snr_db[0];
    let point = config.resolve_point(g, n, snr)?;
    let dataset_seed = derive_seed(config.master_seed, &[0, 0, 0, 0, 0]);
    let subset_seed = derive_seed(config.master_seed, &[0, 0, 0, 0, 1]);
    let data = simulate_dataset(&point.scene, &point.array, n, dataset_seed)?;
    let cfg = point.with_subset_seed(subset_seed);
    let (spectrum, _diag) = pipeline::compute_spectrum(&cfg, &data)?;
    let peaks = match crate::music::pick_peaks(&spectrum, cfg.num_paths) {
        Ok(p) => Ok(p),
        Err(crate::music::MusicError::ResolutionFailure { found, .. }) => Err(found),
        Err(e) => return Err(e.into()),
    };
    Ok(SpectrumRun { spectrum, peaks })
}

/// One cell of the shrinkage-weight surface.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoRow {
    pub snr_db: f64,
    pub num_blocks: usize,
    pub mean_rho: f64,
    pub trials: usize,
}

/// Mean shrinkage weight over `(snr, num_blocks)` cells for an aligned
/// conditioned config. Runs only the covariance stages.
pub fn run_rho_surface(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<RhoRow>, HarnessError> {
    config.validate()?;
    let g = config.sweep.num_movements[0];
    let pool = pool(workers)?;
    let mut rows = Vec::new();
    for (ni, &n) in config.sweep.num_blocks.iter().enumerate() {
        for (si, &snr) in config.sweep.snr_db.iter().enumerate() {
            let point = config.resolve_point(g, n, snr)?;
            if point.array.mode() != crate::geometry::ArrayMode::Ars {
                return Err(HarnessError::Config(
                    "shrinkage surface needs an aligned (ars) config".into(),
                ));
            }
            let rhos: Result<Vec<f64>, HarnessError> = pool.install(|| {
                (0..config.trials)
                    .into_par_iter()
                    .map(|t| {
                        let dataset_seed = derive_seed(
                            config.master_seed,
                            &[0, ni as u64, si as u64, t as u64, 0],
                        );
                        let data =
                            simulate_dataset(&point.scene, &point.array, n, dataset_seed)?;
                        let stacked = match &data {
                            SnapshotSet::Ars { data } => data,
                            _ => unreachable!("mode checked above"),
                        };
                        let y = rearrange_ars(stacked, &point.array)
                            .map_err(PipelineError::from)?;
                        let sample = scm(&y.data).map_err(PipelineError::from)?;
                        let rect = toeplitz_rectify(&sample);
                        let diag = shrinkage_coefficient(&sample, &rect, n)
                            .map_err(PipelineError::from)?;
                        Ok(diag.rho)
                    })
                    .collect()
            });
            let rhos = rhos?;
            rows.push(RhoRow {
                snr_db: snr,
                num_blocks: n,
                mean_rho: rhos.iter().sum::<f64>() / rhos.len() as f64,
                trials: config.trials,
            });
        }
    }
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the error table with its fixed header.
pub fn write_rmse_csv(table: &RmseTable, path: &Path) -> Result<(), HarnessError> {
    let mut out = String::from("snr_db,num_blocks,num_movements,rmse_deg,failures,mean_rho,trials\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.snr_db,
            r.num_blocks,
            r.num_movements,
            r.rmse_deg,
            r.failures,
            fmt_opt(r.mean_rho),
            r.trials
        ));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_spectrum_csv(spectrum: &SpectrumGrid, path: &Path) -> Result<(), HarnessError> {
    let mut out = String::from("angle_deg,spectrum\n");
    for (a, v) in spectrum.angles_deg.iter().zip(&spectrum.values) {
        out.push_str(&format!("{a},{v}\n"));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_rho_csv(rows: &[RhoRow], path: &Path) -> Result<(), HarnessError> {
    let mut out = String::from("snr_db,num_blocks,mean_rho,trials\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.snr_db, r.num_blocks, r.mean_rho, r.trials
        ));
    }
    atomic_write(path, out.as_bytes())
}

/// Provenance record written next to every CSV artifact. Worker count is
/// deliberately absent: outputs do not depend on it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub preset: Option<String>,
    pub config_sha256: String,
    pub master_seed: u64,
    pub trials: usize,
    pub grid_step_deg: f64,
    pub generator: String,
}

impl RunManifest {
    pub fn new(command: &str, preset: Option<&str>, config: &ExperimentConfig) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(config.to_toml().as_bytes());
        Self {
            command: command.to_string(),
            preset: preset.map(|p| p.to_string()),
            config_sha256: format!("{:x}", hasher.finalize()),
            master_seed: config.master_seed,
            trials: config.trials,
            grid_step_deg: config.estimator.grid_step_deg,
            generator: format!("fluid-doa {}", env!("CARGO_PKG_VERSION")),
        }
    }
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), HarnessError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    atomic_write(path, json.as_bytes())
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        // exact estimates
        assert_eq!(compute_rmse(&[vec![1.0, 2.0]], &[1.0, 2.0]).unwrap(), 0.0);
        // single trial, single source, 2 degrees off
        assert_eq!(compute_rmse(&[vec![12.0]], &[10.0]).unwrap(), 2.0);
        // two trials, two sources, errors {0,0} and {3,4}
        let rmse = compute_rmse(&[vec![0.0, 10.0], vec![3.0, 14.0]], &[0.0, 10.0]).unwrap();
        assert!((rmse - 2.5).abs() < 1e-12);
        // length mismatch
        assert!(matches!(
            compute_rmse(&[vec![0.0]], &[0.0, 1.0]),
            Err(HarnessError::RmseLength { .. })
        ));
    }

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            master_seed = 99
            trials = 6

            [array]
            mode = "ars"
            num_antennas = 2
            step = 0.5

            [scene]
            num_users = 2
            paths_per_user = 1
            doas_deg = [-30.0, 20.0]

            [estimator]
            variant = "tmrls-music"
            grid_step_deg = 0.2

            [sweep]
            snr_db = [5.0, 15.0]
            num_blocks = [24]
            num_movements = [1]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn experiment_rows_follow_sweep_order() {
        let cfg = tiny_config();
        let table = run_experiment(&cfg, 1).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].snr_db, 5.0);
        assert_eq!(table.rows[1].snr_db, 15.0);
        for r in &table.rows {
            assert_eq!(r.trials, 6);
            assert!(r.failures <= r.trials);
            assert!(r.rmse_deg >= 0.0);
            assert!(r.mean_rho.is_some());
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = tiny_config();
        let a = run_experiment(&cfg, 1).unwrap();
        let b = run_experiment(&cfg, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_writers_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_config();
        let table = run_experiment(&cfg, 2).unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_rmse_csv(&table, &p1).unwrap();
        write_rmse_csv(&run_experiment(&cfg, 3).unwrap(), &p2).unwrap();
        let a = std::fs::read(&p1).unwrap();
        let b = std::fs::read(&p2).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(
            "snr_db,num_blocks,num_movements,rmse_deg,failures,mean_rho,trials\n"
        ));
    }

    #[test]
    fn spectrum_run_emits_full_grid() {
        let cfg = tiny_config();
        let run = run_spectrum(&cfg).unwrap();
        assert_eq!(run.spectrum.angles_deg.len(), 900); // 180 / 0.2
        let peaks = run.peaks.expect("resolves at 5 dB");
        assert_eq!(peaks.len(), 2);
    }

    #[test]
    fn manifest_hash_tracks_config_changes() {
        let cfg = tiny_config();
        let m1 = RunManifest::new("rmse", Some("x"), &cfg);
        let mut cfg2 = cfg.clone();
        cfg2.master_seed = 100;
        let m2 = RunManifest::new("rmse", Some("x"), &cfg2);
        assert_ne!(m1.config_sha256, m2.config_sha256);
    }
}
