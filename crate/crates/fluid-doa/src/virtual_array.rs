//! Virtual-array domain conversions.
//!
//! Aligned operation: the stacked snapshot matrix has one row per
//! (state, element) pair in state-major order; sorting rows by physical
//! position turns it into the snapshot matrix of a synthesized uniform
//! linear array ([`rearrange_ars`]).
//!
//! Non-aligned operation: the per-state sample covariances are sampled at
//! one entry per difference lag to form a coarray vector
//! ([`build_coarray_vector`]), whose overlapping windows reassemble into a
//! Toeplitz covariance for the coarray half-aperture
//! ([`build_toeplitz_scm`]).

use num_complex::Complex64;
use thiserror::Error;

use crate::covariance::{CovMatrix, CovStage};
use crate::geometry::{lag_lookup, ArrayMode, ArraySpec, GeometryError};
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum VirtualArrayError {
    #[error("stacked snapshot matrix has {got} rows, spec wants {expected}")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} per-state covariances, got {got}")]
    StateCountMismatch { expected: usize, got: usize },
    #[error("per-state covariance {index} is {got}x{got}, spec wants {expected}x{expected}")]
    SubCovDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("coarray vector must have odd length, got {0}")]
    EvenLength(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Snapshots of the synthesized virtual ULA: row `p` observes position
/// `p·d`.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualUlaData {
    pub data: CMatrix,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

/// Sorts the stacked aligned snapshots into virtual-position order.
///
/// Input row `g·M + (m-1)` (element `m` at state `g`) moves to output row
/// `(m-1)(G+1) + g`, its position in step units. The result is a pure row
/// permutation.
pub fn rearrange_ars(stacked: &CMatrix, spec: &ArraySpec) -> Result<VirtualUlaData, VirtualArrayError> {
    if spec.mode() != ArrayMode::Ars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Ars,
            got: spec.mode(),
        }
        .into());
    }
    let m = spec.num_antennas();
    let states = spec.num_states();
    let m_bar = spec.virtual_elements();
    if stacked.nrows() != m_bar {
        return Err(VirtualArrayError::RowCountMismatch {
            expected: m_bar,
            got: stacked.nrows(),
        });
    }
    let mut data = CMatrix::zeros(m_bar, stacked.ncols());
    for g in 0..states {
        for em in 0..m {
            let src = g * m + em;
            let dst = em * states + g;
            data.row_mut(dst).copy_from(&stacked.row(src));
        }
    }
    Ok(VirtualUlaData {
        data,
        spacing: spec.step(),
    })
}

/// Inverse of [`rearrange_ars`], restoring state-major row order.
pub fn rearrange_ars_inverse(
    virtual_data: &CMatrix,
    spec: &ArraySpec,
) -> Result<CMatrix, VirtualArrayError> {
    if virtual_data.nrows() != spec.virtual_elements() {
        return Err(VirtualArrayError::RowCountMismatch {
            expected: spec.virtual_elements(),
            got: virtual_data.nrows(),
        });
    }
    let m = spec.num_antennas();
    let states = spec.num_states();
    let mut data = CMatrix::zeros(virtual_data.nrows(), virtual_data.ncols());
    for g in 0..states {
        for em in 0..m {
            let dst = g * m + em;
            let src = em * states + g;
            data.row_mut(dst).copy_from(&virtual_data.row(src));
        }
    }
    Ok(data)
}

/// Spatial correlation samples indexed by difference lag, covering
/// `-max_lag..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarrayVector {
    values: Vec<Complex64>,
    max_lag: usize,
}

impl CoarrayVector {
    pub fn from_lag_ordered(values: Vec<Complex64>) -> Result<Self, VirtualArrayError> {
        if values.len() % 2 == 0 {
            return Err(VirtualArrayError::EvenLength(values.len()));
        }
        let max_lag = (values.len() - 1) / 2;
        Ok(Self { values, max_lag })
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry for a lag in `-max_lag..=max_lag`.
    pub fn at(&self, lag: i64) -> Complex64 {
        debug_assert!(lag.unsigned_abs() as usize <= self.max_lag);
        self.values[(lag + self.max_lag as i64) as usize]
    }

    /// Entries ordered from the most negative lag to the most positive.
    pub fn lag_ordered(&self) -> &[Complex64] {
        &self.values
    }
}

/// Reads one covariance entry per difference lag out of the per-state
/// covariances. Nonzero lags pair a mover with the fixed reference
/// element; lag zero is the reference autocorrelation (the only entry that
/// retains the noise power).
pub fn build_coarray_vector(
    sub_covs: &[CovMatrix],
    spec: &ArraySpec,
) -> Result<CoarrayVector, VirtualArrayError> {
    if spec.mode() != ArrayMode::Nars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Nars,
            got: spec.mode(),
        }
        .into());
    }
    if sub_covs.len() != spec.num_states() {
        return Err(VirtualArrayError::StateCountMismatch {
            expected: spec.num_states(),
            got: sub_covs.len(),
        });
    }
    for (index, c) in sub_covs.iter().enumerate() {
        if c.dim() != spec.num_antennas() {
            return Err(VirtualArrayError::SubCovDimension {
                index,
                expected: spec.num_antennas(),
                got: c.dim(),
            });
        }
    }
    let max_lag = spec.max_coarray_lag() as i64;
    let mut values = Vec::with_capacity(2 * max_lag as usize + 1);
    for lag in -max_lag..=max_lag {
        let (g, m1, m2) = lag_lookup(spec, lag)?;
        values.push(sub_covs[g].matrix()[(m1 - 1, m2 - 1)]);
    }
    Ok(CoarrayVector {
        values,
        max_lag: max_lag as usize,
    })
}

/// Rebuilds a `(max_lag+1)`-square Toeplitz covariance from the coarray
/// vector: entry `(p, q)` takes the lag `p - q` sample, so the first
/// column runs over the non-negative lags and the first row over the
/// non-positive ones. In expectation this is the coarray manifold weighted
/// by per-path powers plus white noise on the diagonal.
pub fn build_toeplitz_scm(r: &CoarrayVector) -> CovMatrix {
    let n = r.max_lag() + 1;
    let mut mat = CMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            mat[(p, q)] = r.at(p as i64 - q as i64);
        }
    }
    CovMatrix::new(CovStage::CoarrayToeplitz, mat)
}
