//! Signal-subspace extraction.
//!
//! [`exact_signal_subspace`] eigendecomposes the full covariance and keeps
//! the dominant eigenvectors. [`nystrom_signal_subspace`] avoids the
//! full-size decomposition: it eigendecomposes the covariance restricted
//! to a subset of rows/columns and lifts each retained eigenvector `u_i`
//! with eigenvalue `γ_i` through the cross block, `R[:, S]·u_i / γ_i`,
//! then orthonormalizes the lifted columns. On an exactly low-rank
//! covariance the reconstruction is exact whenever the subset sees the
//! whole signal subspace.
//!
//! Finite-sample inputs are symmetrized to their Hermitian part before any
//! eigendecomposition.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rand::seq::index::sample;
use thiserror::Error;

use crate::covariance::CovMatrix;
use crate::seeds::substream;
use crate::CMatrix;

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error("need subspace dimension below the matrix dimension, got {kl} of {dim}")]
    SubspaceTooLarge { kl: usize, dim: usize },
    #[error("subset size {subset} must satisfy {kl} <= subset <= {dim}")]
    BadSubsetSize { subset: usize, kl: usize, dim: usize },
    #[error("subset covariance is rank deficient: {found} usable directions, need {needed}")]
    RankDeficient { found: usize, needed: usize },
}

/// How the subset of rows/columns is chosen for the Nyström path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetSelection {
    /// Uniform sampling without replacement from a seeded stream.
    Seeded(u64),
    /// Deterministic evenly spaced indices, for regression comparisons.
    EvenlySpaced,
}

/// How the signal subspace is extracted from a covariance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubspaceMethod {
    Exact,
    Nystrom {
        subset_size: usize,
        selection: SubsetSelection,
    },
}

/// Orthonormal basis for the estimated signal subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: CMatrix,
    exact: bool,
    selected: Option<Vec<usize>>,
}

impl SubspaceBasis {
    /// `P × KL` matrix with orthonormal columns.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Subset indices used by the Nyström path, ascending.
    pub fn selected_indices(&self) -> Option<&[usize]> {
        self.selected.as_deref()
    }

    /// Orthogonal projector `U·U^H` onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// Eigenvalues and vectors of the Hermitian part, sorted by descending
/// eigenvalue.
fn sorted_eigen(mat: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(mat));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<_> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    (values, CMatrix::from_columns(&cols))
}

fn hermitian_part(mat: &CMatrix) -> CMatrix {
    (mat + mat.adjoint()) / Complex64::from(2.0)
}

/// Dominant-eigenvector basis from a full eigendecomposition.
pub fn exact_signal_subspace(cov: &CovMatrix, kl: usize) -> Result<SubspaceBasis, SubspaceError> {
    let dim = cov.dim();
    if kl == 0 || kl >= dim {
        return Err(SubspaceError::SubspaceTooLarge { kl, dim });
    }
    let (_, vectors) = sorted_eigen(cov.matrix());
    Ok(SubspaceBasis {
        basis: vectors.columns(0, kl).clone_owned(),
        exact: true,
        selected: None,
    })
}

fn choose_subset(dim: usize, subset_size: usize, selection: &SubsetSelection) -> Vec<usize> {
    let mut idx: Vec<usize> = match selection {
        SubsetSelection::Seeded(seed) => {
            let mut rng = substream(*seed, &[0x5e1ec7]);
            sample(&mut rng, dim, subset_size).into_vec()
        }
        SubsetSelection::EvenlySpaced => (0..subset_size).map(|i| i * dim / subset_size).collect(),
    };
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// Signal subspace via subset eigendecomposition and cross-block lifting.
///
/// Subset eigenvalues at or below `1e-12` of the largest are unusable as
/// divisors and are dropped; if fewer than `kl` usable directions remain
/// the subset missed signal energy and an error is returned.
pub fn nystrom_signal_subspace(
    cov: &CovMatrix,
    subset_size: usize,
    kl: usize,
    selection: &SubsetSelection,
) -> Result<SubspaceBasis, SubspaceError> {
    let dim = cov.dim();
    if kl == 0 || kl >= dim {
        return Err(SubspaceError::SubspaceTooLarge { kl, dim });
    }
    if subset_size < kl || subset_size > dim {
        return Err(SubspaceError::BadSubsetSize {
            subset: subset_size,
            kl,
            dim,
        });
    }
    let indices = choose_subset(dim, subset_size, selection);
    let n_a = indices.len();
    if n_a < kl {
        return Err(SubspaceError::BadSubsetSize {
            subset: n_a,
            kl,
            dim,
        });
    }

    let full = cov.matrix();
    let mut sub = CMatrix::zeros(n_a, n_a);
    for (i, &ri) in indices.iter().enumerate() {
        for (j, &rj) in indices.iter().enumerate() {
            sub[(i, j)] = full[(ri, rj)];
        }
    }
    let mut cross = CMatrix::zeros(dim, n_a);
    for (j, &rj) in indices.iter().enumerate() {
        cross.column_mut(j).copy_from(&full.column(rj));
    }

    let (gammas, vectors) = sorted_eigen(&sub);
    let gamma_max = gammas[0];
    if !(gamma_max > 0.0) {
        return Err(SubspaceError::RankDeficient {
            found: 0,
            needed: kl,
        });
    }
    let usable = gammas
        .iter()
        .take_while(|&&g| g > 1e-12 * gamma_max)
        .count();
    if usable < kl {
        return Err(SubspaceError::RankDeficient {
            found: usable,
            needed: kl,
        });
    }

    let mut lifted = CMatrix::zeros(dim, kl);
    for i in 0..kl {
        let u = vectors.column(i);
        let col = &cross * u / Complex64::from(gammas[i]);
        lifted.column_mut(i).copy_from(&col);
    }
    let q = lifted.qr().q();
    Ok(SubspaceBasis {
        basis: q.columns(0, kl).clone_owned(),
        exact: false,
        selected: Some(indices),
    })
}

/// Method-dispatching subspace extraction.
pub fn signal_subspace(
    cov: &CovMatrix,
    kl: usize,
    method: &SubspaceMethod,
) -> Result<SubspaceBasis, SubspaceError> {
    match method {
        SubspaceMethod::Exact => exact_signal_subspace(cov, kl),
        SubspaceMethod::Nystrom {
            subset_size,
            selection,
        } => nystrom_signal_subspace(cov, *subset_size, kl, selection),
    }
}
