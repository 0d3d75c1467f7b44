//! Direction-of-arrival estimation with movable-element (fluid) antenna
//! arrays under tight movement-time budgets.
//!
//! A small physical array sweeps a schedule of positions inside each
//! channel coherence block. Two designs are covered:
//!
//! * **Aligned content** (pilots): per-state snapshots stack into one long
//!   virtual uniform linear array; the sample covariance is conditioned by
//!   Toeplitz rectification blended with a data-driven shrinkage weight
//!   before subspace extraction.
//! * **Non-aligned content** (data symbols): per-state sample covariances
//!   are mined for their difference-lag entries, which reassemble into a
//!   Toeplitz coarray covariance.
//!
//! Both paths feed a MUSIC spectral search whose signal subspace can come
//! from a full eigendecomposition or from a cheaper subset-based
//! reconstruction. A Monte-Carlo harness with seeded substreams drives the
//! whole pipeline reproducibly in parallel; see the `examples/` directory
//! and the `fluid-doa` CLI for entry points.
//!
//! ```
//! use fluid_doa::{ArraySpec, Scene};
//! use fluid_doa::pipeline::{self, EstimatorVariant, PipelineConfig};
//! use fluid_doa::sim;
//!
//! // Two physical elements, two movements: five paths resolved.
//! let spec = ArraySpec::ars(2, 2, 0.5).unwrap();
//! let scene = Scene::new(5, 1, vec![-50.0, -30.0, 0.0, 30.0, 50.0], 1.0, 1.0, 0.1).unwrap();
//! let data = sim::simulate_dataset(&scene, &spec, 200, 7).unwrap();
//! let config = PipelineConfig::new(spec, scene, EstimatorVariant::TmrlsMusic).unwrap();
//! let result = pipeline::run(&config, &data).unwrap();
//! assert_eq!(result.doas_deg.len(), 5);
//! ```

pub mod geometry;
pub mod seeds;
pub mod sim;

pub mod covariance;
pub mod harness;
pub mod music;
pub mod pipeline;
pub mod subspace;
pub mod virtual_array;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex column vector used throughout.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;

pub use geometry::{ArrayMode, ArraySpec, PositionSet};
pub use sim::{Scene, SnapshotSet};
