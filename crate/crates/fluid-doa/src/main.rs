//! Command-line front end for the Monte-Carlo harness.
//!
//! Subcommands: `rmse` (error sweep), `spectrum` (one seeded realization),
//! `rho-surface` (mean shrinkage weight per cell), `lags` (movement-design
//! lag coverage), `validate` (config check only). Configs come from
//! `--config PATH` or a shipped `--preset NAME`.
//!
//! Exit codes: 0 success, 2 configuration/validation failure, 1 runtime
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fluid_doa::geometry::{ars_lag_set, nars_lag_set, ArrayMode, ArraySpec};
use fluid_doa::harness::{
    preset, preset_names, run_experiment, run_rho_surface, run_spectrum, write_manifest,
    write_rho_csv, write_rmse_csv, write_spectrum_csv, ExperimentConfig, HarnessError,
    RunManifest,
};

#[derive(Parser)]
#[command(name = "fluid-doa", version, about = "Fluid-antenna DOA estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo error sweep and write rmse.csv.
    Rmse(RunArgs),
    /// Compute one seeded spectrum realization and write spectrum.csv.
    Spectrum(RunArgs),
    /// Average the shrinkage weight per (SNR, blocks) cell and write
    /// rho_surface.csv.
    RhoSurface(RunArgs),
    /// Print the lag coverage of the configured movement design.
    Lags(RunArgs),
    /// Check a configuration and exit.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to an experiment config in TOML.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a shipped preset.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override the trial count per sweep point.
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Override the master seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Output directory for CSV and manifest files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = one per core). Does not affect results.
    #[arg(long, value_name = "W", default_value_t = 0)]
    workers: usize,
    /// Override the spectral-search grid step in degrees.
    #[arg(long, value_name = "DEG")]
    grid_step: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<(ExperimentConfig, Option<String>)> {
        let (text, preset_name) = match (&self.config, &self.preset) {
            (Some(path), None) => (
                std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?,
                None,
            ),
            (None, Some(name)) => match preset(name) {
                Some(text) => (text.to_string(), Some(name.clone())),
                None => bail!(
                    "unknown preset '{name}'; available: {}",
                    preset_names().join(", ")
                ),
            },
            _ => bail!("exactly one of --config or --preset is required"),
        };
        let mut config = ExperimentConfig::from_toml(&text)?;
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(step) = self.grid_step {
            config.estimator.grid_step_deg = step;
        }
        config.validate()?;
        Ok((config, preset_name))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Rmse(a)
        | Command::Spectrum(a)
        | Command::RhoSurface(a)
        | Command::Lags(a)
        | Command::Validate(a) => a,
    };
    let (config, preset_name) = match args.load() {
        Ok(loaded) => loaded,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run_command(&cli.command, args, &config, preset_name.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run_command(
    command: &Command,
    args: &RunArgs,
    config: &ExperimentConfig,
    preset_name: Option<&str>,
) -> Result<()> {
    match command {
        Command::Validate(_) => {
            println!("configuration ok");
            Ok(())
        }
        Command::Lags(_) => print_lags(config),
        Command::Rmse(_) => {
            let table = run_experiment(config, args.workers)?;
            let csv = args.out.join("rmse.csv");
            write_rmse_csv(&table, &csv)?;
            write_run_manifest("rmse", preset_name, config, &args.out)?;
            println!("wrote {} rows to {}", table.rows.len(), csv.display());
            Ok(())
        }
        Command::Spectrum(_) => {
            let run = run_spectrum(config)?;
            let csv = args.out.join("spectrum.csv");
            write_spectrum_csv(&run.spectrum, &csv)?;
            write_run_manifest("spectrum", preset_name, config, &args.out)?;
            println!(
                "wrote {} grid points to {}",
                run.spectrum.angles_deg.len(),
                csv.display()
            );
            match run.peaks {
                Ok(peaks) => println!(
                    "peaks (deg): {}",
                    peaks
                        .iter()
                        .map(|p| format!("{p:.2}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                Err(found) => println!(
                    "resolution failure: {found} of {} peaks found",
                    config.scene.doas_deg.len()
                ),
            }
            Ok(())
        }
        Command::RhoSurface(_) => {
            let rows = run_rho_surface(config, args.workers)?;
            let csv = args.out.join("rho_surface.csv");
            write_rho_csv(&rows, &csv)?;
            write_run_manifest("rho-surface", preset_name, config, &args.out)?;
            println!("wrote {} cells to {}", rows.len(), csv.display());
            Ok(())
        }
    }
}

fn write_run_manifest(
    command: &str,
    preset_name: Option<&str>,
    config: &ExperimentConfig,
    out: &Path,
) -> Result<(), HarnessError> {
    let manifest = RunManifest::new(command, preset_name, config);
    write_manifest(&manifest, &out.join("manifest.json"))
}

fn print_lags(config: &ExperimentConfig) -> Result<()> {
    for &g in &config.sweep.num_movements {
        let spec = ArraySpec::new(
            config.array.mode,
            config.array.num_antennas,
            g,
            config.array.step,
        )?;
        match spec.mode() {
            ArrayMode::Ars => {
                let lags = ars_lag_set(&spec)?;
                println!(
                    "ars M={} G={}: {} first-order lags (virtual positions): {}",
                    spec.num_antennas(),
                    g,
                    lags.len(),
                    format_set(&lags)
                );
            }
            ArrayMode::Nars => {
                let lags = nars_lag_set(&spec)?;
                println!(
                    "nars M={} G={}: {} second-order difference lags: {}",
                    spec.num_antennas(),
                    g,
                    lags.len(),
                    format_set(&lags)
                );
            }
        }
    }
    Ok(())
}

fn format_set(lags: &std::collections::BTreeSet<i64>) -> String {
    let min = lags.iter().next().copied().unwrap_or(0);
    let max = lags.iter().next_back().copied().unwrap_or(0);
    let consecutive = lags.len() as i64 == max - min + 1;
    if consecutive {
        format!("{min}..={max} (consecutive)")
    } else {
        let items: Vec<String> = lags.iter().map(|l| l.to_string()).collect();
        format!("{{{}}}", items.join(", "))
    }
}
