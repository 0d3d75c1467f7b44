//! Spectral search over direction and peak extraction.
//!
//! The spectrum is the reciprocal energy of a steering vector in the noise
//! subspace, `f(θ) = 1 / (v(θ)^H (I - U U^H) v(θ))`, evaluated on a
//! uniform grid over `(-90°, 90°]`. Both pipelines use a uniform phase
//! ramp as steering: the synthesized ULA over its virtual positions, the
//! coarray over its non-negative lags.

use num_complex::Complex64;
use thiserror::Error;

use crate::subspace::SubspaceBasis;
use crate::CVector;

/// Spectrum values below this denominator are treated as singular and
/// capped at its reciprocal.
const DENOM_FLOOR: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum MusicError {
    #[error("grid step must be positive and below 180 degrees, got {0}")]
    InvalidGridStep(f64),
    #[error("spectrum has {found} local maxima, need {needed}")]
    ResolutionFailure { found: usize, needed: usize },
    #[error("steering length {steering} does not match subspace dimension {subspace}")]
    SteeringMismatch { steering: usize, subspace: usize },
}

/// Steering family for the spectral search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteeringFamily {
    /// Synthesized uniform linear array with `elements` sensors spaced
    /// `spacing` wavelengths apart.
    VirtualUla { elements: usize, spacing: f64 },
    /// Coarray aperture spanning lags `0..=max_lag` at `spacing`
    /// wavelengths per lag.
    Coarray { max_lag: usize, spacing: f64 },
}

impl SteeringFamily {
    pub fn len(&self) -> usize {
        match self {
            SteeringFamily::VirtualUla { elements, .. } => *elements,
            SteeringFamily::Coarray { max_lag, .. } => max_lag + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self, theta_deg: f64) -> CVector {
        match self {
            SteeringFamily::VirtualUla { elements, spacing } => {
                virtual_steering_ars(theta_deg, *elements, *spacing)
            }
            SteeringFamily::Coarray { max_lag, spacing } => {
                virtual_steering_nars(theta_deg, *max_lag, *spacing)
            }
        }
    }
}

fn phase_ramp(theta_deg: f64, len: usize, spacing: f64) -> CVector {
    let step = -std::f64::consts::TAU * spacing * theta_deg.to_radians().sin();
    CVector::from_iterator(len, (0..len).map(|p| Complex64::from_polar(1.0, step * p as f64)))
}

/// Steering of the synthesized ULA: element `p` at position `p·spacing`
/// wavelengths carries phase `-2π·p·spacing·sin(θ)`.
pub fn virtual_steering_ars(theta_deg: f64, elements: usize, spacing: f64) -> CVector {
    phase_ramp(theta_deg, elements, spacing)
}

/// Steering of the coarray aperture over lags `0..=max_lag`. The lag-`p`
/// correlation sample carries the same phase ramp as a physical element at
/// `p·spacing`, which is what makes a single source at `+θ` peak at `+θ`.
pub fn virtual_steering_nars(theta_deg: f64, max_lag: usize, spacing: f64) -> CVector {
    phase_ramp(theta_deg, max_lag + 1, spacing)
}

/// Direction spectrum on a uniform grid with the given step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub angles_deg: Vec<f64>,
    pub values: Vec<f64>,
}

/// Uniform grid over `(-90°, 90°]`.
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>, MusicError> {
    if !(step_deg > 0.0 && step_deg < 180.0) || !step_deg.is_finite() {
        return Err(MusicError::InvalidGridStep(step_deg));
    }
    let count = (180.0 / step_deg).round().max(1.0) as usize;
    Ok((1..=count).map(|i| -90.0 + i as f64 * step_deg).collect())
}

/// Evaluates the spectrum of a subspace basis against a steering family.
pub fn music_spectrum(
    basis: &SubspaceBasis,
    steering: &SteeringFamily,
    grid_step_deg: f64,
) -> Result<SpectrumGrid, MusicError> {
    if steering.len() != basis.dim() {
        return Err(MusicError::SteeringMismatch {
            steering: steering.len(),
            subspace: basis.dim(),
        });
    }
    let angles_deg = angle_grid(grid_step_deg)?;
    let u = basis.basis();
    let values = angles_deg
        .iter()
        .map(|&theta| {
            let v = steering.vector(theta);
            let projected = u.adjoint() * &v;
            let denom = v.norm_squared() - projected.norm_squared();
            if denom < DENOM_FLOOR {
                1.0 / DENOM_FLOOR
            } else {
                1.0 / denom
            }
        })
        .collect();
    Ok(SpectrumGrid { angles_deg, values })
}

/// Quadratic sub-grid refinement around an interior grid peak.
fn refine(angles: &[f64], values: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= values.len() {
        return angles[i];
    }
    let (vm, v0, vp) = (values[i - 1], values[i], values[i + 1]);
    let curvature = vm - 2.0 * v0 + vp;
    if !curvature.is_finite() || curvature.abs() < f64::MIN_POSITIVE {
        return angles[i];
    }
    let offset = (0.5 * (vm - vp) / curvature).clamp(-0.5, 0.5);
    let step = angles[1] - angles[0];
    angles[i] + offset * step
}

/// Extracts the `count` strongest local maxima, refines each by a
/// three-point quadratic fit, and returns them sorted ascending. Equal
/// peak values break toward the smaller angle. Fails with the number of
/// maxima found when the spectrum does not show enough peaks.
pub fn pick_peaks(spectrum: &SpectrumGrid, count: usize) -> Result<Vec<f64>, MusicError> {
    let v = &spectrum.values;
    let n = v.len();
    let mut candidates: Vec<usize> = Vec::new();
    for i in 0..n {
        let is_peak = if n == 1 {
            true
        } else if i == 0 {
            v[0] > v[1]
        } else if i + 1 == n {
            v[n - 1] > v[n - 2]
        } else {
            // plateaus attribute to their left edge
            v[i] > v[i - 1] && v[i] >= v[i + 1]
        };
        if is_peak {
            candidates.push(i);
        }
    }
    if candidates.len() < count {
        return Err(MusicError::ResolutionFailure {
            found: candidates.len(),
            needed: count,
        });
    }
    candidates.sort_by(|&a, &b| {
        v[b].partial_cmp(&v[a])
            .unwrap()
            .then(spectrum.angles_deg[a].partial_cmp(&spectrum.angles_deg[b]).unwrap())
    });
    let mut peaks: Vec<f64> = candidates[..count]
        .iter()
        .map(|&i| refine(&spectrum.angles_deg, v, i))
        .collect();
    peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{CovMatrix, CovStage};
    use crate::subspace::exact_signal_subspace;
    use crate::CMatrix;
    use approx::assert_relative_eq;

    #[test]
    fn steering_at_broadside_is_all_ones() {
        for v in [
            virtual_steering_ars(0.0, 5, 0.5),
            virtual_steering_nars(0.0, 4, 0.5),
        ] {
            for e in v.iter() {
                assert_relative_eq!(e.re, 1.0, epsilon = 1e-15);
                assert_relative_eq!(e.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn steering_endfire_half_wavelength() {
        let v = virtual_steering_ars(90.0, 2, 0.5);
        let want = Complex64::from_polar(1.0, -std::f64::consts::PI);
        assert!((v[1] - want).norm() < 1e-12);
    }

    #[test]
    fn steering_norm_is_element_count() {
        for theta in [-72.3, -10.0, 0.0, 33.3, 89.9] {
            let v = virtual_steering_ars(theta, 7, 0.5);
            assert_relative_eq!(v.norm_squared(), 7.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coarray_steering_matches_ula_steering() {
        let a = virtual_steering_ars(17.0, 6, 0.5);
        let b = virtual_steering_nars(17.0, 5, 0.5);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn two_element_coarray_matches_physical_pair() {
        let c = virtual_steering_nars(42.0, 1, 0.5);
        let phys = crate::sim::steering_vector(&[0.0, 0.5], 42.0);
        assert!((c - phys).norm() < 1e-12);
    }

    #[test]
    fn grid_covers_open_closed_interval() {
        let g = angle_grid(0.05).unwrap();
        assert_eq!(g.len(), 3600);
        assert!(g[0] > -90.0);
        assert_relative_eq!(*g.last().unwrap(), 90.0, epsilon = 1e-9);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(angle_grid(0.0).is_err());
        assert!(angle_grid(-1.0).is_err());
    }

    #[test]
    fn noise_free_single_source_peaks_at_truth() {
        let truth = 10.0;
        let elements = 8;
        let spacing = 0.5;
        let b = virtual_steering_ars(truth, elements, spacing);
        let r = &b * b.adjoint() * Complex64::from(4.0)
            + CMatrix::identity(elements, elements) * Complex64::from(0.01);
        let basis = exact_signal_subspace(&CovMatrix::new(CovStage::Enhanced, r), 1).unwrap();
        let spectrum = music_spectrum(
            &basis,
            &SteeringFamily::VirtualUla { elements, spacing },
            0.05,
        )
        .unwrap();
        let peaks = pick_peaks(&spectrum, 1).unwrap();
        assert!((peaks[0] - truth).abs() <= 0.05, "peak at {}", peaks[0]);
        // spectrum values all finite and positive
        assert!(spectrum.values.iter().all(|&x| x.is_finite() && x > 0.0));
    }

    #[test]
    fn steering_dimension_mismatch_is_rejected() {
        let r = CMatrix::identity(4, 4) + CMatrix::identity(4, 4);
        let basis = exact_signal_subspace(&CovMatrix::new(CovStage::Enhanced, r), 1).unwrap();
        assert!(matches!(
            music_spectrum(
                &basis,
                &SteeringFamily::VirtualUla {
                    elements: 5,
                    spacing: 0.5
                },
                0.1
            ),
            Err(MusicError::SteeringMismatch { .. })
        ));
    }

    fn bump(theta: f64, center: f64, width: f64) -> f64 {
        let d = (theta - center) / width;
        (1.0 - d * d).max(0.0)
    }

    #[test]
    fn synthetic_bumps_are_located_subgrid() {
        // Truncated parabolic bumps; quadratic refinement recovers their
        // centers exactly even off-grid.
        let step = 0.03;
        let angles = angle_grid(step).unwrap();
        let centers = [-20.0, 35.0];
        let values: Vec<f64> = angles
            .iter()
            .map(|&t| bump(t, centers[0], 0.5) + 0.8 * bump(t, centers[1], 0.5))
            .collect();
        let spectrum = SpectrumGrid {
            angles_deg: angles,
            values,
        };
        let peaks = pick_peaks(&spectrum, 2).unwrap();
        // before interpolation the grid maxima are within half a step
        assert!((peaks[0] - centers[0]).abs() < 0.01, "{}", peaks[0]);
        assert!((peaks[1] - centers[1]).abs() < 0.01, "{}", peaks[1]);
    }

    #[test]
    fn unimodal_spectrum_returns_argmax() {
        let step = 0.5;
        let angles = angle_grid(step).unwrap();
        let values: Vec<f64> = angles.iter().map(|&t| bump(t, 12.25, 3.0)).collect();
        let spectrum = SpectrumGrid {
            angles_deg: angles,
            values,
        };
        let peaks = pick_peaks(&spectrum, 1).unwrap();
        assert!((peaks[0] - 12.25).abs() < 1e-9);
    }

    #[test]
    fn equal_peaks_tie_break_toward_smaller_angle() {
        let angles = angle_grid(1.0).unwrap();
        let values: Vec<f64> = angles
            .iter()
            .map(|&t| bump(t, -40.0, 2.0) + bump(t, 40.0, 2.0))
            .collect();
        let spectrum = SpectrumGrid {
            angles_deg: angles,
            values,
        };
        let peaks = pick_peaks(&spectrum, 1).unwrap();
        assert!((peaks[0] + 40.0).abs() < 1e-9, "picked {}", peaks[0]);
    }

    #[test]
    fn too_few_maxima_is_a_typed_failure() {
        let angles = angle_grid(1.0).unwrap();
        let values: Vec<f64> = angles.iter().map(|&t| bump(t, 0.0, 5.0)).collect();
        let spectrum = SpectrumGrid {
            angles_deg: angles,
            values,
        };
        match pick_peaks(&spectrum, 3) {
            Err(MusicError::ResolutionFailure { found, needed }) => {
                assert_eq!(found, 1);
                assert_eq!(needed, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_refinement_does_not_hurt_noise_free_accuracy() {
        let truth = 23.4;
        let elements = 6;
        let spacing = 0.5;
        let b = virtual_steering_ars(truth, elements, spacing);
        let r = &b * b.adjoint() * Complex64::from(2.0)
            + CMatrix::identity(elements, elements) * Complex64::from(0.05);
        let basis = exact_signal_subspace(&CovMatrix::new(CovStage::Enhanced, r), 1).unwrap();
        let family = SteeringFamily::VirtualUla { elements, spacing };
        let mut last_err = f64::INFINITY;
        for step in [0.4, 0.2, 0.1, 0.05] {
            let spectrum = music_spectrum(&basis, &family, step).unwrap();
            let peak = pick_peaks(&spectrum, 1).unwrap()[0];
            let err = (peak - truth).abs();
            assert!(err <= last_err + 1e-9, "step {step}: {err} > {last_err}");
            last_err = err;
        }
    }
}
