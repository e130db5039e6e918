//! Slater-determinant evolution under `exp(-i H t)` with per-step QR
//! re-orthonormalization.
//!
//! A Slater determinant of `N` fermions on `L` sites is an `L x N` matrix
//! whose columns span the occupied single-particle subspace. The nonunitary
//! propagator stretches and rotates that subspace; only the subspace matters
//! for observables, so after every step the orbitals are replaced by the `Q`
//! factor of their QR decomposition. Normalizing each orbital is equivalent
//! to normalizing the many-body state, and keeping the columns orthonormal
//! prevents the exponentially growing modes from swamping the others in
//! floating point.

use ndarray::{s, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::entanglement::{self, SubsystemSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::model::{build_hamiltonian, HamiltonianMatrix, ModelParams};
use crate::spectral::biorthogonal_eigendecomposition;

/// Diagonal entries of R below this magnitude signal a collapsed subspace.
pub const RANK_FLOOR: f64 = 1e-300;

/// Relative reconstruction residual above which the eigenbasis route is
/// considered too inaccurate for propagation.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterState {
    /// Orbitals as columns (`L x N`).
    pub orbitals: Array2<C64>,
    pub time: f64,
}

impl SlaterState {
    pub fn sites(&self) -> usize {
        self.orbitals.nrows()
    }

    pub fn particles(&self) -> usize {
        self.orbitals.ncols()
    }

    /// `max |Q^dag Q - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = linalg::dagger(self.orbitals.view()).dot(&self.orbitals);
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[[i, j]] - target).norm());
            }
        }
        worst
    }
}

/// Product state with sites `2, 4, ..., L` occupied.
pub fn init_z2_state(length: usize) -> Result<SlaterState> {
    if length == 0 || length % 2 != 0 {
        return Err(Error::OddLength(length));
    }
    let n = length / 2;
    let mut orbitals = Array2::<C64>::zeros((length, n));
    for k in 0..n {
        orbitals[[2 * k + 1, k]] = C64::new(1.0, 0.0);
    }
    Ok(SlaterState {
        orbitals,
        time: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    /// `sum_i e^{-i zeta_i dt} |r_i><l_i|` from the biorthogonal eigenbasis.
    Biorthogonal,
    /// Padé approximant with scaling and squaring.
    ScalingSquaring,
}

/// How a trajectory chooses its propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorChoice {
    /// Eigenbasis when it is accurate, scaling-and-squaring otherwise.
    #[default]
    Auto,
    Biorthogonal,
    ScalingSquaring,
}

#[derive(Debug, Clone)]
pub struct Propagator {
    /// `exp(-i H dt)`.
    pub step_matrix: Array2<C64>,
    pub dt: f64,
    pub method: PropagatorMethod,
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

/// One-step propagator from the biorthogonal eigendecomposition.
///
/// Fails with [`Error::NearDefective`] when left and right eigenvectors are
/// nearly orthogonal, and with [`Error::IllConditioned`] when the expansion
/// cannot reproduce `H` to `1e-10` relative accuracy in the site basis (long
/// open non-reciprocal chains); both cases call for
/// [`Propagator::scaling_squaring`].
pub fn make_propagator(h: &HamiltonianMatrix, dt: f64) -> Result<Propagator> {
    check_dt(dt)?;
    let spectrum = biorthogonal_eigendecomposition(h)?;
    let scale = linalg::max_abs(h.entries.view()).max(f64::MIN_POSITIVE);
    let residual = linalg::max_abs((&spectrum.reconstruct() - &h.entries).view()) / scale;
    if !(residual <= RECONSTRUCTION_TOLERANCE) {
        return Err(Error::IllConditioned { residual });
    }
    let minus_i_dt = C64::new(0.0, -dt);
    Ok(Propagator {
        step_matrix: spectrum.apply_function(|z| (minus_i_dt * z).exp()),
        dt,
        method: PropagatorMethod::Biorthogonal,
    })
}

impl Propagator {
    pub fn scaling_squaring(h: &HamiltonianMatrix, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let a = h.entries.mapv(|z| z * C64::new(0.0, -dt));
        Ok(Propagator {
            step_matrix: linalg::expm(&a),
            dt,
            method: PropagatorMethod::ScalingSquaring,
        })
    }

    pub fn new(h: &HamiltonianMatrix, dt: f64, choice: PropagatorChoice) -> Result<Self> {
        match choice {
            PropagatorChoice::Biorthogonal => make_propagator(h, dt),
            PropagatorChoice::ScalingSquaring => Self::scaling_squaring(h, dt),
            PropagatorChoice::Auto => match make_propagator(h, dt) {
                Ok(p) => Ok(p),
                Err(Error::NearDefective { .. } | Error::IllConditioned { .. } | Error::Linalg(_)) => {
                    Self::scaling_squaring(h, dt)
                }
                Err(e) => Err(e),
            },
        }
    }

    pub fn sites(&self) -> usize {
        self.step_matrix.nrows()
    }

    /// `max |U^dag U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = linalg::dagger(self.step_matrix.view()).dot(&self.step_matrix);
        let n = g.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[[i, j]] - target).norm());
            }
        }
        worst
    }
}

/// Applies one propagator step and re-orthonormalizes, returning the new
/// state together with the `R` factor.
pub fn step_qr_factors(state: &SlaterState, prop: &Propagator) -> Result<(SlaterState, Array2<C64>)> {
    if state.sites() != prop.sites() {
        return Err(Error::Dimension(format!(
            "state has {} sites, propagator {}",
            state.sites(),
            prop.sites()
        )));
    }
    let moved = prop.step_matrix.dot(&state.orbitals);
    let (q, r) = linalg::qr_positive(&moved)?;
    for k in 0..r.nrows() {
        let m = r[[k, k]].re;
        if !(m >= RANK_FLOOR) || !m.is_finite() {
            return Err(Error::RankDeficient {
                column: k,
                magnitude: m,
            });
        }
    }
    Ok((
        SlaterState {
            orbitals: q,
            time: state.time + prop.dt,
        },
        r,
    ))
}

pub fn step_qr(state: &SlaterState, prop: &Propagator) -> Result<SlaterState> {
    step_qr_factors(state, prop).map(|(s, _)| s)
}

/// `C_ij = <c_i^dag c_j>` of a pure Slater state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub entries: Array2<C64>,
}

/// Worst-case deviations of a correlation matrix from the projector
/// properties of a pure Slater state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelationDiagnostics {
    pub hermiticity: f64,
    pub idempotency: f64,
    pub trace_error: f64,
    /// Distance of the spectrum outside `[0, 1]` (0 when contained).
    pub spectrum_excess: f64,
}

impl CorrelationDiagnostics {
    pub fn worst(&self) -> f64 {
        self.hermiticity
            .max(self.idempotency)
            .max(self.trace_error)
            .max(self.spectrum_excess)
    }

    pub fn merge(&self, other: &Self) -> Self {
        CorrelationDiagnostics {
            hermiticity: self.hermiticity.max(other.hermiticity),
            idempotency: self.idempotency.max(other.idempotency),
            trace_error: self.trace_error.max(other.trace_error),
            spectrum_excess: self.spectrum_excess.max(other.spectrum_excess),
        }
    }
}

impl CorrelationMatrix {
    pub fn sites(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    pub fn diagnostics(&self, particles: usize) -> Result<CorrelationDiagnostics> {
        let c = &self.entries;
        let sq = c.dot(c);
        let idempotency = linalg::max_abs((&sq - c).view());
        let herm = linalg::hermiticity_defect(c.view());
        let trace_error = (self.trace() - C64::new(particles as f64, 0.0)).norm();
        let eig = linalg::hermitian_eigenvalues(c)?;
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(CorrelationDiagnostics {
            hermiticity: herm,
            idempotency,
            trace_error,
            spectrum_excess: (-lo).max(hi - 1.0).max(0.0),
        })
    }
}

/// `C = (Q Q^dag)^T`, i.e. `C_ij = sum_k conj(Q_ik) Q_jk`.
pub fn correlation_matrix(state: &SlaterState) -> CorrelationMatrix {
    let q = &state.orbitals;
    CorrelationMatrix {
        entries: q.mapv(|z| z.conj()).dot(&q.t()),
    }
}

/// Site occupations `Re C_jj`, clamped to `[0, 1]`.
pub fn density_profile(c: &CorrelationMatrix) -> Vec<f64> {
    c.entries.diag().iter().map(|z| z.re.clamp(0.0, 1.0)).collect()
}

/// Spectrum of the correlation matrix restricted to `rows` (0-based), read
/// directly from the orbitals: `C_A` and `Q_A Q_A^dag` are transposes.
fn restricted_spectrum(state: &SlaterState, rows: &[usize]) -> Result<Array1<f64>> {
    let qa = state.orbitals.select(ndarray::Axis(0), rows);
    let m = qa.dot(&linalg::dagger(qa.view()));
    linalg::hermitian_eigenvalues(&m)
}

fn contiguous_spectrum(state: &SlaterState, first: usize, end: usize) -> Result<Array1<f64>> {
    let qa = state.orbitals.slice(s![first..end, ..]);
    let m = qa.dot(&linalg::dagger(qa));
    linalg::hermitian_eigenvalues(&m)
}

/// Entanglement entropy (nats) of sites `1..=L/2`.
pub fn half_chain_entropy(state: &SlaterState) -> Result<f64> {
    let spec = contiguous_spectrum(state, 0, state.sites() / 2)?;
    Ok(entanglement::entropy_from_spectrum(spec.iter().copied()))
}

/// Mutual information between two disjoint subsystems, read from orbitals.
pub fn orbital_mutual_information(state: &SlaterState, a: &SubsystemSpec, b: &SubsystemSpec) -> Result<f64> {
    let union = a.union(b)?;
    let ent = |spec: &SubsystemSpec| -> Result<f64> {
        let rows = spec.zero_based();
        Ok(entanglement::entropy_from_spectrum(
            restricted_spectrum(state, &rows)?.iter().copied(),
        ))
    };
    Ok(ent(a)? + ent(b)? - ent(&union)?)
}

/// Convergence rule: the Gaussian-smoothed entropy varies by less than
/// `tolerance` over the last `window` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub sigma: f64,
    pub window: usize,
    pub tolerance: f64,
}

impl Default for Plateau {
    fn default() -> Self {
        Plateau {
            sigma: 20.0,
            window: 100,
            tolerance: 1e-4,
        }
    }
}

impl Plateau {
    pub fn is_reached(&self, series: &[f64]) -> bool {
        let halo = (4.0 * self.sigma).ceil() as usize;
        if series.len() < self.window + 1 + halo {
            return false;
        }
        let start = series.len() - (self.window + 1 + halo);
        let smoothed = entanglement::gaussian_smooth(&series[start..], self.sigma);
        let tail = &smoothed[halo..];
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub dt: f64,
    pub steps: usize,
    /// Density profiles are recorded every `sample_stride` steps (plus the
    /// initial and final state); 0 records only those two.
    pub sample_stride: usize,
    /// Stop as soon as the plateau rule holds (checked every `window` steps).
    pub early_stop: bool,
    pub plateau: Plateau,
    /// Record the mutual information of the default subsystem pair each step.
    pub track_mutual_info: bool,
    /// Evaluate correlation-matrix diagnostics at every sampled step.
    pub check_invariants: bool,
    pub propagator: PropagatorChoice,
}

impl Schedule {
    /// Long-time schedule: `dt = 10`, `10^4` steps.
    pub fn paper() -> Self {
        Schedule {
            dt: 10.0,
            steps: 10_000,
            sample_stride: 100,
            early_stop: false,
            plateau: Plateau::default(),
            track_mutual_info: false,
            check_invariants: false,
            propagator: PropagatorChoice::Auto,
        }
    }

    /// Desk-scale schedule: `dt = 10`, 2000 steps, early stop on plateau.
    pub fn desk() -> Self {
        Schedule {
            steps: 2000,
            early_stop: true,
            ..Self::paper()
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::paper()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub step: usize,
    pub profile: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub params: ModelParams,
    pub dt: f64,
    /// Steps actually taken (fewer than scheduled after an early stop).
    pub steps: usize,
    /// Half-chain entropy after each step, starting at `t = 0`.
    pub ee_series: Vec<f64>,
    /// Mutual information of the default subsystem pair, when tracked.
    pub mi_series: Option<Vec<f64>>,
    pub density_series: Vec<DensitySample>,
    pub final_correlation: CorrelationMatrix,
    /// Whether the plateau rule held at the end of the run.
    pub converged: bool,
    pub method: PropagatorMethod,
    /// Worst correlation-matrix diagnostics over the sampled steps.
    pub diagnostics: Option<CorrelationDiagnostics>,
}

impl TrajectoryRecord {
    pub fn particles(&self) -> usize {
        self.params.length / 2
    }
}

pub fn run_trajectory(params: &ModelParams, schedule: &Schedule) -> Result<TrajectoryRecord> {
    params.validate()?;
    if schedule.steps == 0 {
        return Err(Error::InvalidArgument("a trajectory needs at least one step".into()));
    }
    let h = build_hamiltonian(params)?;
    let prop = Propagator::new(&h, schedule.dt, schedule.propagator)?;
    let mut state = init_z2_state(params.length)?;
    let particles = state.particles();

    let mi_pair = if schedule.track_mutual_info {
        Some(entanglement::default_mutual_info_pair(params.length)?)
    } else {
        None
    };

    let mut ee = Vec::with_capacity(schedule.steps + 1);
    let mut mi = mi_pair.as_ref().map(|_| Vec::with_capacity(schedule.steps + 1));
    let mut density = Vec::new();
    let mut diagnostics: Option<CorrelationDiagnostics> = None;

    let mut observe = |state: &SlaterState, step: usize, sample: bool| -> Result<CorrelationMatrix> {
        let c = correlation_matrix(state);
        if sample {
            density.push(DensitySample {
                step,
                profile: density_profile(&c),
            });
            if schedule.check_invariants {
                let d = c.diagnostics(particles)?;
                diagnostics = Some(diagnostics.map_or(d, |prev| prev.merge(&d)));
            }
        }
        Ok(c)
    };

    ee.push(half_chain_entropy(&state)?);
    if let (Some(series), Some((a, b))) = (mi.as_mut(), mi_pair.as_ref()) {
        series.push(orbital_mutual_information(&state, a, b)?);
    }
    let mut last_c = observe(&state, 0, true)?;
    let mut last_sampled = 0;

    let mut taken = 0;
    let mut converged = false;
    for step in 1..=schedule.steps {
        state = step_qr(&state, &prop).map_err(|e| e.at_step(step))?;
        taken = step;
        ee.push(half_chain_entropy(&state).map_err(|e| e.at_step(step))?);
        if let (Some(series), Some((a, b))) = (mi.as_mut(), mi_pair.as_ref()) {
            series.push(orbital_mutual_information(&state, a, b).map_err(|e| e.at_step(step))?);
        }
        if schedule.sample_stride > 0 && step % schedule.sample_stride == 0 {
            last_c = observe(&state, step, true)?;
            last_sampled = step;
        }
        if schedule.early_stop && step % schedule.plateau.window.max(1) == 0 && schedule.plateau.is_reached(&ee) {
            converged = true;
            break;
        }
    }
    if last_sampled != taken {
        last_c = observe(&state, taken, true)?;
    }
    if !converged {
        converged = schedule.plateau.is_reached(&ee);
    }

    Ok(TrajectoryRecord {
        params: *params,
        dt: schedule.dt,
        steps: taken,
        ee_series: ee,
        mi_series: mi,
        density_series: density,
        final_correlation: last_c,
        converged,
        method: prop.method,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn z2_state_layout() {
        let s = init_z2_state(4).unwrap();
        assert_eq!(s.orbitals[[1, 0]], C64::new(1.0, 0.0));
        assert_eq!(s.orbitals[[3, 1]], C64::new(1.0, 0.0));
        let c = correlation_matrix(&s);
        assert_eq!(density_profile(&c), vec![0.0, 1.0, 0.0, 1.0]);
        assert!(matches!(init_z2_state(7), Err(Error::OddLength(7))));
        assert!(half_chain_entropy(&init_z2_state(12).unwrap()).unwrap() < 1e-9);

        let c = correlation_matrix(&init_z2_state(8).unwrap());
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j && i % 2 == 1 { 1.0 } else { 0.0 };
                assert_eq!(c.entries[[i, j]], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn diagonal_propagator_is_a_phase() {
        let p = ModelParams::open(0.0, 0.7, 6).unwrap();
        let mut h = build_hamiltonian(&p).unwrap();
        for i in 0..5 {
            h.entries[[i, i + 1]] = C64::new(0.0, 0.0);
            h.entries[[i + 1, i]] = C64::new(0.0, 0.0);
        }
        let prop = make_propagator(&h, 1.3).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j {
                    C64::new(0.0, -0.7 * (i + 1) as f64 * 1.3).exp()
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((prop.step_matrix[[i, j]] - want).norm() < 1e-13);
            }
        }
        let mut s = init_z2_state(6).unwrap();
        for _ in 0..20 {
            s = step_qr(&s, &prop).unwrap();
            assert!(half_chain_entropy(&s).unwrap() < 1e-9);
        }
        assert_eq!(density_profile(&correlation_matrix(&s)), vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn hermitian_step_is_unitary_and_needs_no_renormalization() {
        let h = build_hamiltonian(&ModelParams::open(0.0, 0.2, 10).unwrap()).unwrap();
        let prop = make_propagator(&h, 10.0).unwrap();
        assert!(prop.unitarity_defect() < 1e-10);
        let mut s = init_z2_state(10).unwrap();
        for _ in 0..50 {
            let (next, r) = step_qr_factors(&s, &prop).unwrap();
            for i in 0..r.nrows() {
                for j in 0..r.ncols() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((r[[i, j]].norm() - want).abs() < 1e-8);
                }
            }
            s = next;
        }
    }

    #[test]
    fn two_site_exponential_matches_closed_form() {
        // H = [[0, a], [b, 0]] with a b = 0.75: exp(-iHt) = cos(wt) - i sin(wt) H / w
        let h = build_hamiltonian(&ModelParams::open(-0.5, 0.0, 2).unwrap()).unwrap();
        let dt = 0.37;
        let w = 0.75_f64.sqrt();
        let prop = make_propagator(&h, dt).unwrap();
        let pade = Propagator::scaling_squaring(&h, dt).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                let want = C64::new((w * dt).cos() * id, 0.0)
                    - C64::new(0.0, (w * dt).sin() / w) * h.entries[[i, j]];
                assert!((prop.step_matrix[[i, j]] - want).norm() < 1e-13);
                assert!((pade.step_matrix[[i, j]] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn long_open_chain_falls_back_to_scaling_squaring() {
        let h = build_hamiltonian(&ModelParams::open(-0.5, 0.0, 64).unwrap()).unwrap();
        assert!(matches!(
            make_propagator(&h, 10.0),
            Err(Error::IllConditioned { .. } | Error::NearDefective { .. })
        ));
        let p = Propagator::new(&h, 10.0, PropagatorChoice::Auto).unwrap();
        assert_eq!(p.method, PropagatorMethod::ScalingSquaring);
    }

    #[test]
    fn single_particle_superposition_correlations() {
        let r = 0.5_f64.sqrt();
        let mut q = Array2::<C64>::zeros((3, 1));
        q[[0, 0]] = C64::new(r, 0.0);
        q[[1, 0]] = C64::new(0.0, r);
        let c = correlation_matrix(&SlaterState { orbitals: q, time: 0.0 });
        // C_ij = conj(q_i) q_j
        assert!((c.entries[[0, 0]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((c.entries[[1, 1]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((c.entries[[0, 1]] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((c.entries[[1, 0]] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn trajectory_record_shape_and_invariants() {
        let p = ModelParams::open(-0.5, 0.15, 16).unwrap();
        let sched = Schedule {
            steps: 40,
            sample_stride: 7,
            early_stop: false,
            check_invariants: true,
            track_mutual_info: true,
            ..Schedule::desk()
        };
        let rec = run_trajectory(&p, &sched).unwrap();
        assert_eq!(rec.ee_series.len(), 41);
        assert_eq!(rec.mi_series.as_ref().unwrap().len(), 41);
        assert_eq!(rec.density_series.first().unwrap().step, 0);
        assert_eq!(rec.density_series.last().unwrap().step, 40);
        for d in &rec.density_series {
            assert!((d.profile.iter().sum::<f64>() - 8.0).abs() < 1e-8);
        }
        assert!(rec.diagnostics.unwrap().worst() < 1e-8);
    }

    #[test]
    fn step_rejects_mismatched_sizes() {
        let h = build_hamiltonian(&ModelParams::open(0.0, 0.0, 6).unwrap()).unwrap();
        let prop = make_propagator(&h, 1.0).unwrap();
        assert!(matches!(
            step_qr(&init_z2_state(8).unwrap(), &prop),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn plateau_rule() {
        let flat = vec![0.3; 400];
        assert!(Plateau::default().is_reached(&flat));
        let ramp: Vec<f64> = (0..400).map(|i| i as f64 * 1e-3).collect();
        assert!(!Plateau::default().is_reached(&ramp));
        assert!(!Plateau::default().is_reached(&flat[..50]));
    }
}
