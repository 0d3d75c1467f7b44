//! Covariance estimation and structure-aware enhancement.
//!
//! The aligned pipeline works on a large virtual array with comparatively
//! few snapshots, where the plain sample covariance is a poor estimate.
//! Its true covariance is Toeplitz, so the sample estimate is rectified by
//! diagonal averaging and then blended back with the raw estimate using a
//! data-driven shrinkage weight
//!
//! ```text
//! rho_a = [(N-3)·Tr(R²) + (N-1)·Tr(R)²] / [(N-2)(N+1)·Tr((R - R_T)²)]
//! ```
//!
//! clamped to `[0, 1]`. The non-aligned pipeline instead needs one sample
//! covariance per movement state, computed here as well.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::ArrayMode;
use crate::sim::SnapshotSet;
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum CovarianceError {
    #[error("covariance input must be non-empty")]
    EmptyData,
    #[error("snapshot set is {got}, expected {expected}")]
    WrongMode { expected: ArrayMode, got: ArrayMode },
    #[error("shrinkage formula needs at least 4 snapshots, got {0}")]
    SampleCountTooSmall(usize),
    #[error("matrices have mismatched dimensions {a} and {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("shrinkage weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
}

/// Which estimation stage produced a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovStage {
    /// Raw sample covariance of stacked virtual-array snapshots.
    Scm,
    /// Diagonal-averaged (Toeplitz) rectification of a sample covariance.
    ToeplitzRectified,
    /// Shrinkage blend of the sample covariance and its rectification.
    Enhanced,
    /// Per-movement-state sample covariance.
    SubState,
    /// Toeplitz matrix rebuilt from coarray lag entries.
    CoarrayToeplitz,
}

/// A square covariance estimate tagged with its pipeline stage.
///
/// Estimates from sample products are Hermitian by construction; the
/// coarray-rebuilt stage is Hermitian only in expectation, so hermiticity
/// is a checkable property rather than a constructor invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    stage: CovStage,
    mat: CMatrix,
}

impl CovMatrix {
    pub fn new(stage: CovStage, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { stage, mat }
    }

    pub fn stage(&self) -> CovStage {
        self.stage
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Relative Frobenius distance from the Hermitian part.
    pub fn hermitian_defect(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) / Complex64::from(2.0);
        let denom = h.norm().max(f64::MIN_POSITIVE);
        (&self.mat - &h).norm() / denom
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Hermitian part `(A + A^H)/2`, used before eigendecomposition.
    pub fn hermitized(&self) -> CMatrix {
        (&self.mat + self.mat.adjoint()) / Complex64::from(2.0)
    }
}

/// Sample covariance `(1/N)·D·D^H` of snapshot columns.
pub fn scm(data: &CMatrix) -> Result<CovMatrix, CovarianceError> {
    if data.nrows() == 0 || data.ncols() == 0 {
        return Err(CovarianceError::EmptyData);
    }
    let n = data.ncols() as f64;
    let mat = data * data.adjoint() / Complex64::from(n);
    Ok(CovMatrix::new(CovStage::Scm, mat))
}

/// Per-state sample covariances of a non-aligned snapshot set.
pub fn sub_covariances(snapshots: &SnapshotSet) -> Result<Vec<CovMatrix>, CovarianceError> {
    match snapshots {
        SnapshotSet::Nars { states } => states
            .iter()
            .map(|xg| {
                let mut c = scm(xg)?;
                c.stage = CovStage::SubState;
                Ok(c)
            })
            .collect(),
        SnapshotSet::Ars { .. } => Err(CovarianceError::WrongMode {
            expected: ArrayMode::Nars,
            got: ArrayMode::Ars,
        }),
    }
}

/// Replaces every diagonal of a square matrix by its arithmetic mean,
/// projecting onto Toeplitz structure. Hermitian input stays Hermitian and
/// the trace is preserved exactly.
pub fn toeplitz_rectify(input: &CovMatrix) -> CovMatrix {
    let n = input.dim();
    let a = input.matrix();
    let mut out = CMatrix::zeros(n, n);
    for offset in -(n as i64 - 1)..=(n as i64 - 1) {
        let len = n - offset.unsigned_abs() as usize;
        let (row0, col0) = if offset >= 0 {
            (0usize, offset as usize)
        } else {
            ((-offset) as usize, 0usize)
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for t in 0..len {
            sum += a[(row0 + t, col0 + t)];
        }
        let mean = sum / Complex64::from(len as f64);
        for t in 0..len {
            out[(row0 + t, col0 + t)] = mean;
        }
    }
    CovMatrix::new(CovStage::ToeplitzRectified, out)
}

/// Diagnostics from the shrinkage-weight computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageDiag {
    /// Raw weight before clamping.
    pub rho_raw: f64,
    /// Clamped weight in `[0, 1]`.
    pub rho: f64,
    /// `Tr(R)` of the sample covariance.
    pub trace: f64,
    /// `Tr(R²)` of the sample covariance.
    pub trace_sq: f64,
    /// `Tr((R - R_T)²)`, the squared distance to the rectified matrix.
    pub trace_diff_sq: f64,
}

fn trace_re(a: &CMatrix) -> f64 {
    let mut t = 0.0;
    for i in 0..a.nrows() {
        t += a[(i, i)].re;
    }
    t
}

/// `Re Tr(A·B)` accumulated in a fixed order.
fn trace_prod_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut t = 0.0;
    for i in 0..n {
        for k in 0..n {
            t += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    t
}

/// Data-driven weight for blending the sample covariance with its Toeplitz
/// rectification.
///
/// The raw weight can exceed `[0, 1]` through the moment approximations
/// behind it; it is clamped before use. A sample covariance that is
/// already Toeplitz makes the blend independent of the weight, and the
/// weight is set to 1 by convention. Fewer than four snapshots leave the
/// correction factors meaningless, so that case is rejected.
pub fn shrinkage_coefficient(
    sample: &CovMatrix,
    rectified: &CovMatrix,
    num_blocks: usize,
) -> Result<ShrinkageDiag, CovarianceError> {
    if num_blocks < 4 {
        return Err(CovarianceError::SampleCountTooSmall(num_blocks));
    }
    if sample.dim() != rectified.dim() {
        return Err(CovarianceError::DimensionMismatch {
            a: sample.dim(),
            b: rectified.dim(),
        });
    }
    let n = num_blocks as f64;
    let r = sample.matrix();
    let trace = trace_re(r);
    let trace_sq = trace_prod_re(r, r);
    let diff = r - rectified.matrix();
    let trace_diff_sq = trace_prod_re(&diff, &diff);

    let numerator = (n - 3.0) * trace_sq + (n - 1.0) * trace * trace;
    let denominator = (n - 2.0) * (n + 1.0) * trace_diff_sq;

    let (rho_raw, rho) = if trace_diff_sq <= 1e-14 * trace_sq.abs().max(f64::MIN_POSITIVE) {
        (f64::INFINITY, 1.0)
    } else {
        let raw = numerator / denominator;
        (raw, raw.clamp(0.0, 1.0))
    };
    Ok(ShrinkageDiag {
        rho_raw,
        rho,
        trace,
        trace_sq,
        trace_diff_sq,
    })
}

/// Convex blend `(1-ρ)·R + ρ·R_T` of the sample covariance and its
/// rectification.
pub fn enhanced_scm(
    sample: &CovMatrix,
    rectified: &CovMatrix,
    rho: f64,
) -> Result<CovMatrix, CovarianceError> {
    if !(0.0..=1.0).contains(&rho) || !rho.is_finite() {
        return Err(CovarianceError::WeightOutOfRange(rho));
    }
    if sample.dim() != rectified.dim() {
        return Err(CovarianceError::DimensionMismatch {
            a: sample.dim(),
            b: rectified.dim(),
        });
    }
    let mat = sample.matrix() * Complex64::from(1.0 - rho)
        + rectified.matrix() * Complex64::from(rho);
    Ok(CovMatrix::new(CovStage::Enhanced, mat))
}
