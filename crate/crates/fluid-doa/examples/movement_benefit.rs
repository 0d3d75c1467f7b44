//! What movement buys: error versus movement count and snapshot count.
//!
//! At a fixed -6 dB SNR, each added movement grows the virtual aperture
//! and drops the error for both pipelines; one movement with a tenth of
//! the snapshots beats no movement with the full snapshot budget.
//!
//! Run with: cargo run --release --example movement_benefit

use fluid_doa::geometry::ArraySpec;
use fluid_doa::pipeline::{self, EstimatorVariant, PipelineConfig};
use fluid_doa::seeds::derive_seed;
use fluid_doa::sim::{simulate_dataset, Scene};
use rayon::prelude::*;

fn mc_rmse(point: &PipelineConfig, blocks: usize, trials: usize, tag: u64) -> f64 {
    let truth = point.scene.sorted_doas_deg();
    let acc: f64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ds = derive_seed(31, &[tag, t as u64, 0]);
            let ss = derive_seed(31, &[tag, t as u64, 1]);
            let data = simulate_dataset(&point.scene, &point.array, blocks, ds).unwrap();
            let cfg = point.clone().with_subset_seed(ss);
            match pipeline::run(&cfg, &data) {
                Ok(r) => r
                    .doas_deg
                    .iter()
                    .zip(&truth)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>(),
                Err(e) if e.is_trial_failure() => 8100.0 * truth.len() as f64,
                Err(e) => panic!("{e}"),
            }
        })
        .sum();
    (acc / (trials * point.num_paths) as f64).sqrt()
}

fn main() {
    let trials = 100;
    let ars_scene = Scene::new(2, 3, vec![-15.2, -10.5, -5.3, 4.1, 10.3, 15.4], 1.0, 1.0, 1.0)
        .unwrap()
        .with_snr_db(-6.0);
    let nars_scene = Scene::new(1, 3, vec![-15.3, -5.3, 6.1], 1.0, 1.0, 1.0)
        .unwrap()
        .with_snr_db(-6.0);

    println!("RMSE (degrees) vs movement count at -6 dB, 200 blocks, {trials} trials");
    println!("{:>10} {:>16} {:>16}", "movements", "aligned M=20", "non-aligned M=7");
    for g in 0..=4usize {
        let ars = PipelineConfig::new(
            ArraySpec::ars(20, g, 0.5).unwrap(),
            ars_scene.clone(),
            EstimatorVariant::TmrlsMusic,
        )
        .unwrap();
        let nars = PipelineConfig::new(
            ArraySpec::nars(7, g, 0.5).unwrap(),
            nars_scene.clone(),
            EstimatorVariant::TmrMusic,
        )
        .unwrap();
        println!(
            "{g:>10} {:>16.4} {:>16.4}",
            mc_rmse(&ars, 200, trials, g as u64),
            mc_rmse(&nars, 200, trials, 10 + g as u64)
        );
    }

    println!("\none movement vs ten times the snapshots (aligned, -6 dB):");
    let one_move = PipelineConfig::new(
        ArraySpec::ars(20, 1, 0.5).unwrap(),
        ars_scene.clone(),
        EstimatorVariant::TmrlsMusic,
    )
    .unwrap();
    let no_move = PipelineConfig::new(
        ArraySpec::ars(20, 0, 0.5).unwrap(),
        ars_scene,
        EstimatorVariant::TmrlsMusic,
    )
    .unwrap();
    println!("  1 movement,  20 blocks: {:.4} deg", mc_rmse(&one_move, 20, trials, 20));
    println!("  0 movements, 200 blocks: {:.4} deg", mc_rmse(&no_move, 200, trials, 21));
}
