//! Far-field narrowband multipath simulator with block fading.
//!
//! Each of `K` users reaches the receiver over `L` scattering paths with
//! fixed directions. Path gains are circular complex Gaussian, redrawn
//! independently per coherence block; within a block the array sweeps its
//! movement schedule. In aligned operation the transmitted content is
//! common to all movement states of a block, so the per-state snapshots
//! stack into one long virtual-array snapshot. In non-aligned operation
//! each state observes fresh symbols and the states are kept apart.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::geometry::{positions, ArrayMode, ArraySpec, GeometryError};
use crate::seeds::substream;
use crate::{CMatrix, CVector};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("need at least one user and one path per user")]
    EmptyScene,
    #[error("expected {expected} path directions, got {got}")]
    DoaCountMismatch { expected: usize, got: usize },
    #[error("path direction {0} outside (-90, 90] degrees")]
    DoaOutOfRange(f64),
    #[error("path directions must be distinct, {0} repeats")]
    DuplicateDoa(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositivePower { name: &'static str, value: f64 },
    #[error("need at least one time block")]
    EmptyDataset,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Statistical description of the propagation channel: `K·L` path
/// directions plus the three power parameters (per-path gain variance,
/// symbol power, per-element noise variance).
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    num_users: usize,
    paths_per_user: usize,
    doas_deg: Vec<f64>,
    path_gain_var: f64,
    signal_power: f64,
    noise_var: f64,
}

impl Scene {
    pub fn new(
        num_users: usize,
        paths_per_user: usize,
        doas_deg: Vec<f64>,
        path_gain_var: f64,
        signal_power: f64,
        noise_var: f64,
    ) -> Result<Self, SceneError> {
        if num_users == 0 || paths_per_user == 0 {
            return Err(SceneError::EmptyScene);
        }
        if doas_deg.len() != num_users * paths_per_user {
            return Err(SceneError::DoaCountMismatch {
                expected: num_users * paths_per_user,
                got: doas_deg.len(),
            });
        }
        for &d in &doas_deg {
            if !d.is_finite() || d <= -90.0 || d > 90.0 {
                return Err(SceneError::DoaOutOfRange(d));
            }
        }
        let mut sorted = doas_deg.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(SceneError::DuplicateDoa(w[0]));
            }
        }
        for (name, value) in [
            ("path_gain_var", path_gain_var),
            ("signal_power", signal_power),
            ("noise_var", noise_var),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SceneError::NonPositivePower { name, value });
            }
        }
        Ok(Self {
            num_users,
            paths_per_user,
            doas_deg,
            path_gain_var,
            signal_power,
            noise_var,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn paths_per_user(&self) -> usize {
        self.paths_per_user
    }

    /// Total path count `K·L`.
    pub fn num_paths(&self) -> usize {
        self.num_users * self.paths_per_user
    }

    /// Path directions in degrees, user-major order.
    pub fn doas_deg(&self) -> &[f64] {
        &self.doas_deg
    }

    /// Path directions sorted ascending, the ground truth for error scoring.
    pub fn sorted_doas_deg(&self) -> Vec<f64> {
        let mut d = self.doas_deg.clone();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d
    }

    pub fn path_gain_var(&self) -> f64 {
        self.path_gain_var
    }

    pub fn signal_power(&self) -> f64 {
        self.signal_power
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Per-path receive power over per-element noise power, in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.path_gain_var * self.signal_power / self.noise_var).log10()
    }

    /// Same scene with the noise variance set from an SNR in dB
    /// (`noise_var = path_gain_var · signal_power / 10^(snr/10)`).
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.noise_var = self.path_gain_var * self.signal_power / 10f64.powf(snr_db / 10.0);
        self
    }

    /// Same scene with an explicit noise variance.
    pub fn with_noise_var(mut self, noise_var: f64) -> Self {
        self.noise_var = noise_var;
        self
    }
}

/// Simulated receiver output across `N` blocks.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotSet {
    /// Aligned: a single `(G+1)M × N` matrix. Rows are grouped per movement
    /// state, state 0 first.
    Ars { data: CMatrix },
    /// Non-aligned: one `M × N` matrix per movement state.
    Nars { states: Vec<CMatrix> },
}

impl SnapshotSet {
    pub fn mode(&self) -> ArrayMode {
        match self {
            SnapshotSet::Ars { .. } => ArrayMode::Ars,
            SnapshotSet::Nars { .. } => ArrayMode::Nars,
        }
    }

    pub fn num_blocks(&self) -> usize {
        match self {
            SnapshotSet::Ars { data } => data.ncols(),
            SnapshotSet::Nars { states } => states.first().map_or(0, |s| s.ncols()),
        }
    }
}

/// Unit-amplitude array response for elements at the given coordinates
/// (in wavelengths): element `m` carries phase `-2π·d_m·sin(θ)`.
pub fn steering_vector(positions_wl: &[f64], theta_deg: f64) -> CVector {
    let phase_rate = -std::f64::consts::TAU * theta_deg.to_radians().sin();
    CVector::from_iterator(
        positions_wl.len(),
        positions_wl
            .iter()
            .map(|&d| Complex64::from_polar(1.0, phase_rate * d)),
    )
}

/// Manifold matrix whose columns are steering vectors for each direction.
pub fn manifold(positions_wl: &[f64], doas_deg: &[f64]) -> CMatrix {
    let cols: Vec<CVector> = doas_deg
        .iter()
        .map(|&theta| steering_vector(positions_wl, theta))
        .collect();
    CMatrix::from_columns(&cols)
}

/// One draw of a circular complex Gaussian with the given variance.
#[inline]
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let scale = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Draws the `K × L` path gains for one coherence block, i.i.d.
/// `CN(0, path_gain_var)`.
pub fn draw_block_gains<R: Rng + ?Sized>(scene: &Scene, rng: &mut R) -> CMatrix {
    let mut gains = CMatrix::zeros(scene.num_users(), scene.paths_per_user());
    for k in 0..scene.num_users() {
        for l in 0..scene.paths_per_user() {
            gains[(k, l)] = complex_gaussian(rng, scene.path_gain_var());
        }
    }
    gains
}

/// Per-state manifolds for a movement schedule, computed once per dataset.
struct StateManifolds {
    per_state: Vec<CMatrix>,
}

impl StateManifolds {
    fn build(scene: &Scene, spec: &ArraySpec) -> Result<Self, SceneError> {
        let per_state = (0..spec.num_states())
            .map(|g| {
                let pos = positions(spec, g)?;
                Ok(manifold(&pos.wavelengths(spec.step()), scene.doas_deg()))
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Ok(Self { per_state })
    }
}

/// Effective per-path signal vector: gain times symbol, user-major.
fn effective_signal(scene: &Scene, gains: &CMatrix, symbols: &[Complex64]) -> CVector {
    let kl = scene.num_paths();
    let mut s = CVector::zeros(kl);
    for k in 0..scene.num_users() {
        for l in 0..scene.paths_per_user() {
            s[k * scene.paths_per_user() + l] = gains[(k, l)] * symbols[k];
        }
    }
    s
}

fn ars_block(
    scene: &Scene,
    spec: &ArraySpec,
    manifolds: &StateManifolds,
    gains: &CMatrix,
    rng: &mut impl Rng,
) -> CVector {
    let m = spec.num_antennas();
    let symbols: Vec<Complex64> = (0..scene.num_users())
        .map(|_| complex_gaussian(rng, scene.signal_power()))
        .collect();
    // Same effective signal at every state: the content is aligned.
    let s_eff = effective_signal(scene, gains, &symbols);
    let mut x = CVector::zeros(spec.num_states() * m);
    for g in 0..spec.num_states() {
        let clean = &manifolds.per_state[g] * &s_eff;
        for i in 0..m {
            x[g * m + i] = clean[i] + complex_gaussian(rng, scene.noise_var());
        }
    }
    x
}

fn nars_block(
    scene: &Scene,
    spec: &ArraySpec,
    manifolds: &StateManifolds,
    gains: &CMatrix,
    rng: &mut impl Rng,
) -> Vec<CVector> {
    let m = spec.num_antennas();
    let mut states = Vec::with_capacity(spec.num_states());
    for g in 0..spec.num_states() {
        // Fresh symbols per state; the block's gains are shared.
        let symbols: Vec<Complex64> = (0..scene.num_users())
            .map(|_| complex_gaussian(rng, scene.signal_power()))
            .collect();
        let s_eff = effective_signal(scene, gains, &symbols);
        let clean = &manifolds.per_state[g] * &s_eff;
        let mut x = CVector::zeros(m);
        for i in 0..m {
            x[i] = clean[i] + complex_gaussian(rng, scene.noise_var());
        }
        states.push(x);
    }
    states
}

/// Simulates one aligned block: the stacked `(G+1)M` snapshot for shared
/// symbols, per-state steering, and white noise.
pub fn simulate_block_ars(
    scene: &Scene,
    spec: &ArraySpec,
    gains: &CMatrix,
    rng: &mut impl Rng,
) -> Result<CVector, SceneError> {
    if spec.mode() != ArrayMode::Ars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Ars,
            got: spec.mode(),
        }
        .into());
    }
    let manifolds = StateManifolds::build(scene, spec)?;
    Ok(ars_block(scene, spec, &manifolds, gains, rng))
}

/// Simulates one non-aligned block: `G+1` length-`M` snapshots with
/// independent symbols per state and shared block gains.
pub fn simulate_block_nars(
    scene: &Scene,
    spec: &ArraySpec,
    gains: &CMatrix,
    rng: &mut impl Rng,
) -> Result<Vec<CVector>, SceneError> {
    if spec.mode() != ArrayMode::Nars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Nars,
            got: spec.mode(),
        }
        .into());
    }
    let manifolds = StateManifolds::build(scene, spec)?;
    Ok(nars_block(scene, spec, &manifolds, gains, rng))
}

/// Simulates `num_blocks` coherence blocks. Deterministic in `seed`: block
/// `n` draws its gains from substream `[n, 0]` and its symbols/noise from
/// substream `[n, 1]`, so datasets are reproducible regardless of where or
/// when they are generated.
pub fn simulate_dataset(
    scene: &Scene,
    spec: &ArraySpec,
    num_blocks: usize,
    seed: u64,
) -> Result<SnapshotSet, SceneError> {
    if num_blocks == 0 {
        return Err(SceneError::EmptyDataset);
    }
    let manifolds = StateManifolds::build(scene, spec)?;
    let m = spec.num_antennas();
    match spec.mode() {
        ArrayMode::Ars => {
            let mut data = CMatrix::zeros(spec.num_states() * m, num_blocks);
            for n in 0..num_blocks {
                let gains = draw_block_gains(scene, &mut substream(seed, &[n as u64, 0]));
                let mut rng = substream(seed, &[n as u64, 1]);
                data.set_column(n, &ars_block(scene, spec, &manifolds, &gains, &mut rng));
            }
            Ok(SnapshotSet::Ars { data })
        }
        ArrayMode::Nars => {
            let mut states = vec![CMatrix::zeros(m, num_blocks); spec.num_states()];
            for n in 0..num_blocks {
                let gains = draw_block_gains(scene, &mut substream(seed, &[n as u64, 0]));
                let mut rng = substream(seed, &[n as u64, 1]);
                let block = nars_block(scene, spec, &manifolds, &gains, &mut rng);
                for (g, x) in block.into_iter().enumerate() {
                    states[g].set_column(n, &x);
                }
            }
            Ok(SnapshotSet::Nars { states })
        }
    }
}

/// Expected covariance of the rearranged aligned snapshots: the virtual-ULA
/// manifold weighted by the per-path power, plus white noise.
pub fn analytic_virtual_cov(scene: &Scene, spec: &ArraySpec) -> Result<CMatrix, SceneError> {
    if spec.mode() != ArrayMode::Ars {
        return Err(GeometryError::WrongMode {
            expected: ArrayMode::Ars,
            got: spec.mode(),
        }
        .into());
    }
    let m_bar = spec.virtual_elements();
    let virtual_positions: Vec<f64> = (0..m_bar).map(|p| p as f64 * spec.step()).collect();
    let b = manifold(&virtual_positions, scene.doas_deg());
    let path_power = Complex64::from(scene.path_gain_var() * scene.signal_power());
    let mut r = &b * b.adjoint() * path_power;
    for i in 0..m_bar {
        r[(i, i)] += Complex64::from(scene.noise_var());
    }
    Ok(r)
}

/// Expected per-state covariance of the non-aligned snapshots for state `g`.
pub fn analytic_sub_cov(scene: &Scene, spec: &ArraySpec, g: usize) -> Result<CMatrix, SceneError> {
    let pos = positions(spec, g)?;
    let a = manifold(&pos.wavelengths(spec.step()), scene.doas_deg());
    let path_power = Complex64::from(scene.path_gain_var() * scene.signal_power());
    let mut r = &a * a.adjoint() * path_power;
    for i in 0..spec.num_antennas() {
        r[(i, i)] += Complex64::from(scene.noise_var());
    }
    Ok(r)
}

/// Expected per-state covariances for every movement state.
pub fn analytic_sub_covs(scene: &Scene, spec: &ArraySpec) -> Result<Vec<CMatrix>, SceneError> {
    (0..spec.num_states())
        .map(|g| analytic_sub_cov(scene, spec, g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_scene(doas: Vec<f64>, noise_var: f64) -> Scene {
        let kl = doas.len();
        Scene::new(kl, 1, doas, 1.0, 1.0, noise_var).unwrap()
    }

    #[test]
    fn steering_reference_element_has_zero_phase() {
        let v = steering_vector(&[0.0], 37.0);
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(v[0].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn steering_broadside_all_ones() {
        let v = steering_vector(&[0.0, 0.5], 0.0);
        for e in v.iter() {
            assert_relative_eq!(e.re, 1.0, epsilon = 1e-15);
            assert_relative_eq!(e.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steering_half_wavelength_at_thirty_degrees() {
        // 0.5 wavelength at 30 degrees: phase -2π·0.5·0.5 = -π/2.
        let v = steering_vector(&[0.0, 0.5], 30.0);
        let want = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(v[1].re, want.re, epsilon = 1e-12);
        assert_relative_eq!(v[1].im, want.im, epsilon = 1e-12);
    }

    #[test]
    fn zero_gain_variance_would_be_rejected_but_zero_draws_follow_variance() {
        // The scene type requires positive powers; the gain sampler itself
        // degenerates cleanly at var -> 0.
        let mut rng = substream(1, &[0]);
        let g = complex_gaussian(&mut rng, 0.0);
        assert_eq!(g, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gain_sample_power_matches_variance() {
        let scene = test_scene(vec![10.0], 1.0);
        let mut rng = substream(42, &[]);
        let trials = 100_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let g = draw_block_gains(&scene, &mut rng);
            acc += g[(0, 0)].norm_sqr();
        }
        let mean = acc / trials as f64;
        assert!((mean - 1.0).abs() < 0.03, "mean power {mean}");
    }

    #[test]
    fn gains_differ_across_blocks() {
        let scene = test_scene(vec![10.0], 1.0);
        let a = draw_block_gains(&scene, &mut substream(9, &[0, 0]));
        let b = draw_block_gains(&scene, &mut substream(9, &[1, 0]));
        assert_ne!(a[(0, 0)], b[(0, 0)]);
    }

    #[test]
    fn ars_single_element_single_path_is_scalar_product() {
        // With no noise the lone sample is gain times symbol.
        let scene = Scene::new(1, 1, vec![20.0], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::ars(1, 0, 0.5).unwrap();
        let gains = draw_block_gains(&scene, &mut substream(3, &[0]));
        let x = simulate_block_ars(&scene, &spec, &gains, &mut substream(3, &[1])).unwrap();
        assert_eq!(x.len(), 1);
        // steering at the origin is 1, so |x| = |gain|·|symbol| > 0
        assert!(x[0].norm() > 0.0);
    }

    #[test]
    fn ars_noise_free_block_lies_in_manifold_span() {
        let scene = Scene::new(2, 1, vec![-25.0, 40.0], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::ars(2, 2, 0.5).unwrap();
        let gains = draw_block_gains(&scene, &mut substream(5, &[0]));
        let x = simulate_block_ars(&scene, &spec, &gains, &mut substream(5, &[1])).unwrap();

        // Stack the per-state manifolds, project, and check the residual.
        let mut a = CMatrix::zeros(spec.num_states() * 2, scene.num_paths());
        for g in 0..spec.num_states() {
            let pos = positions(&spec, g).unwrap();
            let ag = manifold(&pos.wavelengths(spec.step()), scene.doas_deg());
            a.view_mut((g * 2, 0), (2, scene.num_paths())).copy_from(&ag);
        }
        let gram = a.adjoint() * &a;
        let coeff = gram.lu().solve(&(a.adjoint() * &x)).unwrap();
        let residual = (&a * coeff - &x).norm();
        assert!(residual < 1e-10 * x.norm(), "residual {residual}");
    }

    #[test]
    fn ars_states_share_the_effective_signal() {
        // Recover the effective signal from state 0 and predict state 1.
        let scene = Scene::new(2, 1, vec![-25.0, 40.0], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::ars(2, 1, 0.5).unwrap();
        let gains = draw_block_gains(&scene, &mut substream(11, &[0]));
        let x = simulate_block_ars(&scene, &spec, &gains, &mut substream(11, &[1])).unwrap();

        let a0 = manifold(
            &positions(&spec, 0).unwrap().wavelengths(spec.step()),
            scene.doas_deg(),
        );
        let a1 = manifold(
            &positions(&spec, 1).unwrap().wavelengths(spec.step()),
            scene.doas_deg(),
        );
        let x0 = x.rows(0, 2).clone_owned();
        let x1 = x.rows(2, 2).clone_owned();
        let s = a0.lu().solve(&x0).unwrap();
        let predicted = &a1 * s;
        assert!((predicted - x1).norm() < 1e-10);
    }

    #[test]
    fn ars_empirical_covariance_matches_analytic() {
        let scene = test_scene(vec![-30.0, 15.0], 0.5);
        let spec = ArraySpec::ars(2, 1, 0.5).unwrap();
        let blocks = 100_000;
        let data = match simulate_dataset(&scene, &spec, blocks, 99).unwrap() {
            SnapshotSet::Ars { data } => data,
            _ => unreachable!(),
        };

        // Empirical covariance in virtual-position order.
        let perm = [0usize, 2, 1, 3]; // (m,g) -> p for M=2, G=1
        let dim = 4;
        let mut emp = CMatrix::zeros(dim, dim);
        for n in 0..blocks {
            let col = data.column(n);
            for i in 0..dim {
                for jj in 0..dim {
                    emp[(i, jj)] += col[perm[i]] * col[perm[jj]].conj();
                }
            }
        }
        emp /= Complex64::from(blocks as f64);

        let want = analytic_virtual_cov(&scene, &spec).unwrap();
        let err = (&emp - &want).norm() / want.norm();
        assert!(err < 0.03, "relative error {err}");
    }

    #[test]
    fn nars_broadside_path_gives_equal_entries() {
        let scene = Scene::new(1, 1, vec![0.0], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::nars(3, 1, 0.5).unwrap();
        let gains = draw_block_gains(&scene, &mut substream(17, &[0]));
        let block = simulate_block_nars(&scene, &spec, &gains, &mut substream(17, &[1])).unwrap();
        for x in &block {
            for i in 1..x.len() {
                assert!((x[i] - x[0]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn nars_states_draw_independent_symbols() {
        // Sample correlation between the per-state observations at the
        // reference element decays like 1/sqrt(trials).
        let scene = Scene::new(1, 1, vec![0.0], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::nars(2, 1, 0.5).unwrap();
        let blocks = 20_000;
        let states = match simulate_dataset(&scene, &spec, blocks, 123).unwrap() {
            SnapshotSet::Nars { states } => states,
            _ => unreachable!(),
        };
        // Correlate symbol streams: divide out the common gain via state 0.
        let mut cross = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        for n in 0..blocks {
            let s0 = states[0][(0, n)];
            let s1 = states[1][(0, n)];
            cross += s0 * s1.conj();
            power += s0.norm_sqr().max(s1.norm_sqr());
        }
        let rho = cross.norm() / power;
        assert!(rho < 0.02, "cross correlation {rho}");
    }

    #[test]
    fn nars_empirical_sub_covariance_matches_analytic() {
        let scene = test_scene(vec![-30.0, 15.0], 0.5);
        let spec = ArraySpec::nars(2, 2, 0.5).unwrap();
        let blocks = 100_000;
        let states = match simulate_dataset(&scene, &spec, blocks, 7).unwrap() {
            SnapshotSet::Nars { states } => states,
            _ => unreachable!(),
        };
        for (g, xg) in states.iter().enumerate() {
            let emp = xg * xg.adjoint() / Complex64::from(blocks as f64);
            let want = analytic_sub_cov(&scene, &spec, g).unwrap();
            let err = (&emp - &want).norm() / want.norm();
            assert!(err < 0.03, "state {g} relative error {err}");
        }
    }

    #[test]
    fn nars_cross_covariance_phase_follows_position() {
        // For one path the reference-to-mover covariance entry carries
        // phase +2π·d_m·sin(θ).
        let theta: f64 = 30.0;
        let scene = Scene::new(1, 1, vec![theta], 1.0, 1.0, 1e-300).unwrap();
        let spec = ArraySpec::nars(2, 2, 0.5).unwrap();
        let blocks = 100_000;
        let states = match simulate_dataset(&scene, &spec, blocks, 31).unwrap() {
            SnapshotSet::Nars { states } => states,
            _ => unreachable!(),
        };
        for (g, xg) in states.iter().enumerate() {
            let mut cross = Complex64::new(0.0, 0.0);
            for n in 0..blocks {
                cross += xg[(0, n)] * xg[(1, n)].conj();
            }
            cross /= Complex64::from(blocks as f64);
            let d_m = positions(&spec, g).unwrap().wavelengths(spec.step())[1];
            let want = Complex64::from_polar(
                1.0,
                std::f64::consts::TAU * d_m * theta.to_radians().sin(),
            );
            assert!((cross - want).norm() < 0.03, "state {g}: {cross} vs {want}");
        }
    }

    #[test]
    fn dataset_is_deterministic_in_seed() {
        let scene = test_scene(vec![-10.0, 25.0], 1.0);
        let spec = ArraySpec::ars(2, 1, 0.5).unwrap();
        let a = simulate_dataset(&scene, &spec, 16, 5).unwrap();
        let b = simulate_dataset(&scene, &spec, 16, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate_dataset(&scene, &spec, 16, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_block_dataset_has_one_column() {
        let scene = test_scene(vec![0.0], 1.0);
        let spec = ArraySpec::ars(2, 1, 0.5).unwrap();
        match simulate_dataset(&scene, &spec, 1, 0).unwrap() {
            SnapshotSet::Ars { data } => assert_eq!(data.ncols(), 1),
            _ => unreachable!(),
        }
        assert!(matches!(
            simulate_dataset(&scene, &spec, 0, 0),
            Err(SceneError::EmptyDataset)
        ));
    }

    #[test]
    fn noise_only_covariance_is_white() {
        // Suppress the signal by making it negligibly weak instead of zero,
        // then check the empirical covariance against noise-only white.
        let scene = Scene::new(1, 1, vec![10.0], 1e-12, 1e-12, 2.0).unwrap();
        let spec = ArraySpec::ars(3, 0, 0.5).unwrap();
        let blocks = 100_000;
        let data = match simulate_dataset(&scene, &spec, blocks, 1).unwrap() {
            SnapshotSet::Ars { data } => data,
            _ => unreachable!(),
        };
        let emp = &data * data.adjoint() / Complex64::from(blocks as f64);
        let want = CMatrix::identity(3, 3) * Complex64::from(2.0);
        let err = (&emp - &want).norm() / want.norm();
        assert!(err < 0.03, "relative error {err}");
    }

    #[test]
    fn signal_power_scales_linearly() {
        let base = test_scene(vec![5.0], 1e-9);
        let double = Scene::new(1, 1, vec![5.0], 1.0, 2.0, 1e-9).unwrap();
        let spec = ArraySpec::ars(2, 0, 0.5).unwrap();
        let blocks = 50_000;
        let power = |scene: &Scene| -> f64 {
            let data = match simulate_dataset(scene, &spec, blocks, 77).unwrap() {
                SnapshotSet::Ars { data } => data,
                _ => unreachable!(),
            };
            data.iter().map(|z| z.norm_sqr()).sum::<f64>() / blocks as f64
        };
        let ratio = power(&double) / power(&base);
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn scene_validation() {
        assert!(matches!(
            Scene::new(0, 1, vec![], 1.0, 1.0, 1.0),
            Err(SceneError::EmptyScene)
        ));
        assert!(matches!(
            Scene::new(1, 2, vec![10.0], 1.0, 1.0, 1.0),
            Err(SceneError::DoaCountMismatch { .. })
        ));
        assert!(matches!(
            Scene::new(1, 1, vec![95.0], 1.0, 1.0, 1.0),
            Err(SceneError::DoaOutOfRange(_))
        ));
        assert!(matches!(
            Scene::new(2, 1, vec![10.0, 10.0], 1.0, 1.0, 1.0),
            Err(SceneError::DuplicateDoa(_))
        ));
        assert!(matches!(
            Scene::new(1, 1, vec![10.0], 1.0, 1.0, 0.0),
            Err(SceneError::NonPositivePower { .. })
        ));
    }

    #[test]
    fn snr_helper_roundtrips() {
        let scene = test_scene(vec![0.0], 1.0).with_snr_db(-6.0);
        assert_relative_eq!(scene.snr_db(), -6.0, epsilon = 1e-12);
        assert_relative_eq!(scene.noise_var(), 10f64.powf(0.6), epsilon = 1e-12);
    }
}
