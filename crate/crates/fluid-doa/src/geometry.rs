//! Antenna placement schedules for the two movement designs and the lag sets
//! they generate.
//!
//! Two designs are supported:
//!
//! * **Aligned** ([`ArrayMode::Ars`]): every element moves. Element `m`
//!   (1-based) starts at `(m-1)(G+1)·d` and advances by one step per
//!   movement, so pooling all `G+1` states yields the consecutive virtual
//!   positions `{0, 1, ..., M(G+1)-1}·d` — a synthesized uniform linear
//!   array of `M(G+1)` elements.
//! * **Non-aligned** ([`ArrayMode::Nars`]): element 1 stays fixed at the
//!   origin as a phase reference while the remaining `M-1` elements move.
//!   The pairwise position differences pooled over all states cover every
//!   integer lag in `[-(M-1)(G+1), (M-1)(G+1)]`.
//!
//! Positions are kept as exact integer multiples of the step size so lag
//! arithmetic never touches floating point; physical coordinates are
//! materialized only when a steering vector is needed.

use std::collections::BTreeSet;

use thiserror::Error;

/// Whether snapshots taken at different movement states carry the same
/// transmitted content (pilots) or independent content (data symbols).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayMode {
    /// Aligned received signals: snapshots from all states stack coherently.
    Ars,
    /// Non-aligned received signals: only covariance entries are comparable
    /// across states.
    Nars,
}

impl std::fmt::Display for ArrayMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArrayMode::Ars => write!(f, "ars"),
            ArrayMode::Nars => write!(f, "nars"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("{mode} arrays need at least {min} antennas, got {got}")]
    TooFewAntennas {
        mode: ArrayMode,
        min: usize,
        got: usize,
    },
    #[error("movement step must lie in (0, 0.5] wavelengths, got {0}")]
    InvalidStep(f64),
    #[error("movement state {g} out of range 0..={max}")]
    StateOutOfRange { g: usize, max: usize },
    #[error("operation requires {expected} mode, array is {got}")]
    WrongMode { expected: ArrayMode, got: ArrayMode },
    #[error("lag {lag} outside covered range -{max_lag}..={max_lag}")]
    LagOutOfRange { lag: i64, max_lag: usize },
}

/// Physical description of a movable array: element count `M`, movement
/// count `G`, and the per-movement step in carrier wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArraySpec {
    mode: ArrayMode,
    num_antennas: usize,
    num_movements: usize,
    step: f64,
}

impl ArraySpec {
    /// Validates and builds a spec. The step must satisfy `0 < d <= 0.5`
    /// wavelengths; NARS needs one fixed reference plus at least one mover.
    pub fn new(
        mode: ArrayMode,
        num_antennas: usize,
        num_movements: usize,
        step: f64,
    ) -> Result<Self, GeometryError> {
        let min = match mode {
            ArrayMode::Ars => 1,
            ArrayMode::Nars => 2,
        };
        if num_antennas < min {
            return Err(GeometryError::TooFewAntennas {
                mode,
                min,
                got: num_antennas,
            });
        }
        if !(step > 0.0 && step <= 0.5) || !step.is_finite() {
            return Err(GeometryError::InvalidStep(step));
        }
        Ok(Self {
            mode,
            num_antennas,
            num_movements,
            step,
        })
    }

    pub fn ars(num_antennas: usize, num_movements: usize, step: f64) -> Result<Self, GeometryError> {
        Self::new(ArrayMode::Ars, num_antennas, num_movements, step)
    }

    pub fn nars(num_antennas: usize, num_movements: usize, step: f64) -> Result<Self, GeometryError> {
        Self::new(ArrayMode::Nars, num_antennas, num_movements, step)
    }

    pub fn mode(&self) -> ArrayMode {
        self.mode
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn num_movements(&self) -> usize {
        self.num_movements
    }

    /// Movement states per coherence block, `G + 1`.
    pub fn num_states(&self) -> usize {
        self.num_movements + 1
    }

    /// Step size in carrier wavelengths.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Size of the synthesized virtual ULA in aligned operation,
    /// `M(G+1)`.
    pub fn virtual_elements(&self) -> usize {
        self.num_antennas * self.num_states()
    }

    /// Largest coarray lag covered in non-aligned operation,
    /// `(M-1)(G+1)`.
    pub fn max_coarray_lag(&self) -> usize {
        (self.num_antennas - 1) * self.num_states()
    }

    fn check_state(&self, g: usize) -> Result<(), GeometryError> {
        if g > self.num_movements {
            return Err(GeometryError::StateOutOfRange {
                g,
                max: self.num_movements,
            });
        }
        Ok(())
    }
}

/// Element coordinates for one movement state, as integer multiples of the
/// step size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSet {
    units: Vec<i64>,
}

impl PositionSet {
    /// Coordinates in units of the step size, ordered by element index.
    pub fn units(&self) -> &[i64] {
        &self.units
    }

    /// Coordinates in carrier wavelengths for a given step size.
    pub fn wavelengths(&self, step: f64) -> Vec<f64> {
        self.units.iter().map(|&u| u as f64 * step).collect()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

/// Element positions after movement `g` in the aligned design:
/// `d_{m,g} = ((m-1)(G+1) + g)·d`.
pub fn ars_positions(spec: &ArraySpec, g: usize) -> Result<PositionSet, GeometryError> {
    if spec.mode() != ArrayMode::Ars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Ars,
            got: spec.mode(),
        });
    }
    spec.check_state(g)?;
    let stride = spec.num_states() as i64;
    let units = (0..spec.num_antennas())
        .map(|m| m as i64 * stride + g as i64)
        .collect();
    Ok(PositionSet { units })
}

/// Element positions after movement `g` in the non-aligned design: the
/// reference element stays at the origin and mover `m` (2-based) sits at
/// `((m-2)(G+1) + g + 1)·d`.
pub fn nars_positions(spec: &ArraySpec, g: usize) -> Result<PositionSet, GeometryError> {
    if spec.mode() != ArrayMode::Nars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Nars,
            got: spec.mode(),
        });
    }
    spec.check_state(g)?;
    let stride = spec.num_states() as i64;
    let mut units = Vec::with_capacity(spec.num_antennas());
    units.push(0);
    for m in 1..spec.num_antennas() {
        units.push((m as i64 - 1) * stride + g as i64 + 1);
    }
    Ok(PositionSet { units })
}

/// Mode-dispatching position lookup.
pub fn positions(spec: &ArraySpec, g: usize) -> Result<PositionSet, GeometryError> {
    match spec.mode() {
        ArrayMode::Ars => ars_positions(spec, g),
        ArrayMode::Nars => nars_positions(spec, g),
    }
}

/// All virtual element positions (in step units) reached by the aligned
/// design over its movement schedule. Covers `{0, ..., M(G+1)-1}`.
pub fn ars_lag_set(spec: &ArraySpec) -> Result<BTreeSet<i64>, GeometryError> {
    let mut lags = BTreeSet::new();
    for g in 0..spec.num_states() {
        lags.extend(ars_positions(spec, g)?.units().iter().copied());
    }
    Ok(lags)
}

/// All pairwise position differences (in step units) reached by the
/// non-aligned design over its schedule. Covers
/// `{-(M-1)(G+1), ..., (M-1)(G+1)}`.
pub fn nars_lag_set(spec: &ArraySpec) -> Result<BTreeSet<i64>, GeometryError> {
    let mut lags = BTreeSet::new();
    for g in 0..spec.num_states() {
        let pos = nars_positions(spec, g)?;
        for &a in pos.units() {
            for &b in pos.units() {
                lags.insert(a - b);
            }
        }
    }
    Ok(lags)
}

/// Finds one `(g, m1, m2)` triple (antenna indices 1-based) whose position
/// difference equals `lag` steps. Nonzero lags always pair a mover with the
/// fixed reference element, matching how the coarray vector reads
/// covariance entries; lag 0 maps to the reference autocorrelation
/// `(0, 1, 1)`.
pub fn lag_lookup(spec: &ArraySpec, lag: i64) -> Result<(usize, usize, usize), GeometryError> {
    if spec.mode() != ArrayMode::Nars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Nars,
            got: spec.mode(),
        });
    }
    let max_lag = spec.max_coarray_lag();
    if lag.unsigned_abs() as usize > max_lag {
        return Err(GeometryError::LagOutOfRange { lag, max_lag });
    }
    if lag == 0 {
        return Ok((0, 1, 1));
    }
    // Mover m (2-based) at state g sits at (m-2)(G+1) + g + 1 steps, so a
    // positive lag l decomposes as l-1 = q(G+1) + r with m = q+2, g = r.
    let stride = spec.num_states() as i64;
    let a = lag.abs() - 1;
    let q = (a / stride) as usize;
    let r = (a % stride) as usize;
    let mover = q + 2;
    if lag > 0 {
        Ok((r, mover, 1))
    } else {
        Ok((r, 1, mover))
    }
}
