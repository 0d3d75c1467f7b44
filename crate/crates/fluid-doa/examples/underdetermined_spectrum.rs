//! Resolving more paths than physical antennas.
//!
//! Two elements with two movements resolve five paths through the aligned
//! pipeline; three elements resolve six paths through the non-aligned
//! coarray pipeline. Prints the estimated directions against the truth
//! and a coarse rendering of each spectrum.
//!
//! Run with: cargo run --release --example underdetermined_spectrum

use fluid_doa::geometry::ArraySpec;
use fluid_doa::music::SpectrumGrid;
use fluid_doa::pipeline::{self, EstimatorVariant, PipelineConfig};
use fluid_doa::sim::{simulate_dataset, Scene};

fn render(spectrum: &SpectrumGrid, truth: &[f64]) {
    // coarse dB profile over 60 buckets
    let buckets = 60;
    let n = spectrum.values.len();
    let mut profile = vec![f64::MIN; buckets];
    for (i, &v) in spectrum.values.iter().enumerate() {
        let b = i * buckets / n;
        profile[b] = profile[b].max(v);
    }
    let max = profile.iter().cloned().fold(f64::MIN, f64::max);
    let line: String = profile
        .iter()
        .map(|&v| {
            let db = 10.0 * (v / max).log10();
            match db {
                d if d > -10.0 => '#',
                d if d > -30.0 => '+',
                d if d > -45.0 => '.',
                _ => ' ',
            }
        })
        .collect();
    println!("  -90deg |{line}| +90deg");
    let marks: String = (0..buckets)
        .map(|b| {
            let lo = -90.0 + 180.0 * b as f64 / buckets as f64;
            let hi = -90.0 + 180.0 * (b + 1) as f64 / buckets as f64;
            if truth.iter().any(|&t| t >= lo && t < hi) {
                '^'
            } else {
                ' '
            }
        })
        .collect();
    println!("  truth  |{marks}|");
}

fn report(label: &str, truth: &[f64], result: &pipeline::EstimationResult) {
    println!("{label}");
    render(&result.spectrum, truth);
    println!("  truth    : {truth:?}");
    println!(
        "  estimates: {:?}",
        result
            .doas_deg
            .iter()
            .map(|d| (d * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
    println!();
}

fn main() {
    let truth5 = vec![-50.0, -30.0, 0.0, 30.0, 50.0];
    let spec = ArraySpec::ars(2, 2, 0.5).unwrap();
    let scene = Scene::new(5, 1, truth5.clone(), 1.0, 1.0, 1.0)
        .unwrap()
        .with_snr_db(10.0);
    let data = simulate_dataset(&scene, &spec, 200, 61).unwrap();
    let cfg = PipelineConfig::new(spec, scene, EstimatorVariant::TmrlsMusic).unwrap();
    let result = pipeline::run(&cfg, &data).unwrap();
    report(
        "aligned pipeline: 5 paths on 2 physical elements (6-element virtual ULA)",
        &truth5,
        &result,
    );

    let truth6 = vec![-50.0, -30.0, -10.0, 10.0, 30.0, 50.0];
    let spec = ArraySpec::nars(3, 2, 0.5).unwrap();
    let scene = Scene::new(2, 3, truth6.clone(), 1.0, 1.0, 1.0)
        .unwrap()
        .with_snr_db(10.0);
    let data = simulate_dataset(&scene, &spec, 200, 62).unwrap();
    let cfg = PipelineConfig::new(spec, scene, EstimatorVariant::TmrMusic).unwrap();
    let result = pipeline::run(&cfg, &data).unwrap();
    report(
        "non-aligned pipeline: 6 paths on 3 physical elements (13-lag coarray)",
        &truth6,
        &result,
    );
}
