//! Time evolution of Dicke states.
//!
//! Time-independent Hamiltonians are propagated exactly from one Hermitian
//! eigendecomposition. The driven Hamiltonian `chi Jx^2 + g cos(omega t) Jz` is
//! integrated with fixed-step RK4. By default the integration runs in the frame
//! co-rotating with the drive, where the `Jz` term is handled exactly and only
//! the twisting term is stepped; states are rotated back before they are stored,
//! so every trajectory holds Schrödinger-picture states either way.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{decompose, DriveParams, HamiltonianSpec};
use crate::spin::{magnetic_number, CollectiveOperator, DickeState, SpinOperators};

/// Largest norm change tolerated between two stored samples.
pub const MAX_NORM_DRIFT: f64 = 1e-8;

/// Times a sample interval is re-integrated with a halved step before the drift guard fails.
pub const MAX_STEP_HALVINGS: u32 = 3;

/// Frame in which the driven Schrödinger equation is stepped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationFrame {
    /// Rotating with the accumulated drive phase about `z`.
    #[default]
    DriveRotating,
    /// Plain laboratory frame; the step also has to resolve `g J`.
    Lab,
}

/// Step-size policy for the driven integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// RK4 steps per drive period `2 pi / omega`; at least 20.
    pub substeps_per_period: usize,
    /// Upper bound on `||H|| dt` for a single step.
    pub max_phase_per_step: f64,
    #[serde(default)]
    pub frame: IntegrationFrame,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { substeps_per_period: 128, max_phase_per_step: 0.02, frame: IntegrationFrame::DriveRotating }
    }
}

impl StepControl {
    pub const MIN_SUBSTEPS: usize = 20;

    pub fn validate(&self) -> Result<()> {
        if self.substeps_per_period < Self::MIN_SUBSTEPS {
            return Err(Error::invalid(format!(
                "substeps_per_period = {} is below the minimum of {}",
                self.substeps_per_period,
                Self::MIN_SUBSTEPS
            )));
        }
        if !(self.max_phase_per_step.is_finite() && self.max_phase_per_step > 0.0) {
            return Err(Error::invalid("max_phase_per_step must be positive"));
        }
        Ok(())
    }

    /// Same policy with every step halved.
    pub fn refined(&self) -> Self {
        StepControl {
            substeps_per_period: 2 * self.substeps_per_period,
            max_phase_per_step: 0.5 * self.max_phase_per_step,
            frame: self.frame,
        }
    }
}

/// Exact propagator `exp(-i H t)` from `H = V diag(lambda) V^dagger`.
#[derive(Clone, Debug)]
pub struct StaticPropagator {
    n_atoms: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl StaticPropagator {
    pub fn new(hamiltonian: &CollectiveOperator) -> Result<Self> {
        let dim = hamiltonian.dim();
        let eig = SymmetricEigen::try_new(hamiltonian.matrix().clone(), f64::EPSILON, 1000 * dim)
            .ok_or_else(|| Error::invalid("Hermitian eigendecomposition did not converge"))?;
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("Hamiltonian has non-finite eigenvalues"));
        }
        Ok(StaticPropagator {
            n_atoms: hamiltonian.n_atoms(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Coefficients of `state` in the eigenbasis.
    fn project(&self, state: &DickeState) -> Result<DVector<C64>> {
        if state.n_atoms() != self.n_atoms {
            return Err(Error::DimensionMismatch { expected: self.n_atoms, found: state.n_atoms() });
        }
        Ok(self.eigenvectors.ad_mul(state.amplitudes()))
    }

    fn evolve_coefficients(&self, coeffs: &DVector<C64>, dt: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(self.eigenvalues.iter()).map(|(c, &l)| c * C64::from_polar(1.0, -l * dt)),
        );
        &self.eigenvectors * phased
    }

    /// `exp(-i H dt) |state>`.
    pub fn advance(&self, state: &DickeState, dt: f64) -> Result<DickeState> {
        let coeffs = self.project(state)?;
        DickeState::normalized(self.n_atoms, self.evolve_coefficients(&coeffs, dt))
    }
}

/// Band of a mostly-diagonal matrix, stored by diagonal offset.
#[derive(Clone, Debug)]
struct Banded {
    dim: usize,
    // (offset d, entries a[k][k+d] for k in range)
    diagonals: Vec<(isize, Vec<C64>)>,
}

impl Banded {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut diagonals = Vec::new();
        for d in -(dim as isize - 1)..(dim as isize) {
            let entries: Vec<C64> = (0..dim)
                .filter_map(|k| {
                    let l = k as isize + d;
                    (0..dim as isize).contains(&l).then(|| m[(k, l as usize)])
                })
                .collect();
            if entries.iter().any(|z| z.norm() > 0.0) {
                diagonals.push((d, entries));
            }
        }
        Banded { dim, diagonals }
    }

    /// `y += sum_d phase(d) * A_d x`.
    fn mul_add_phased(&self, x: &[C64], y: &mut [C64], phase: impl Fn(isize) -> C64) {
        for (d, entries) in &self.diagonals {
            let p = phase(*d);
            let start = if *d < 0 { (-*d) as usize } else { 0 };
            for (i, a) in entries.iter().enumerate() {
                let k = start + i;
                y[k] += p * a * x[(k as isize + d) as usize];
            }
        }
        debug_assert_eq!(y.len(), self.dim);
    }

    /// Gershgorin interval `[lo, hi]` enclosing the spectrum of a Hermitian band.
    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..self.dim {
            let mut center = 0.0;
            let mut radius = 0.0;
            for (d, entries) in &self.diagonals {
                let start = if *d < 0 { (-*d) as usize } else { 0 };
                if k >= start && k - start < entries.len() {
                    let a = entries[k - start];
                    if *d == 0 {
                        center = a.re;
                    } else {
                        radius += a.norm();
                    }
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }
}

/// RK4 integrator for `chi Jx^2 + g cos(omega t) Jz`.
#[derive(Clone, Debug)]
pub struct DrivenPropagator {
    n_atoms: usize,
    drive: DriveParams,
    twisting: Banded,
    // spectral shift removed from the twisting term and restored as a global phase
    shift: f64,
    m: Vec<f64>,
    max_step: f64,
    frame: IntegrationFrame,
}

impl DrivenPropagator {
    pub fn new(spec: &HamiltonianSpec, n_atoms: usize, control: &StepControl) -> Result<Self> {
        control.validate()?;
        let ops = SpinOperators::new(n_atoms)?;
        let decomposed = decompose(spec, &ops)?;
        let drive = decomposed.drive.ok_or_else(|| {
            Error::invalid(format!("driven propagation needs a full driven Hamiltonian, got '{}'", spec.label()))
        })?;
        let mut twisting = Banded::from_dense(&decomposed.static_part);
        let (lo, hi) = twisting.gershgorin();
        let shift = 0.5 * (lo + hi);
        match twisting.diagonals.iter_mut().find(|(d, _)| *d == 0) {
            Some((_, diag)) => diag.iter_mut().for_each(|a| *a -= shift),
            None => twisting.diagonals.push((0, vec![C64::new(-shift, 0.0); n_atoms + 1])),
        }
        let m: Vec<f64> = (0..=n_atoms).map(|k| magnetic_number(n_atoms, k)).collect();

        let mut spectral_radius = 0.5 * (hi - lo);
        if control.frame == IntegrationFrame::Lab {
            spectral_radius += drive.amplitude_g * 0.5 * n_atoms as f64;
        }
        let period_step = 2.0 * PI / (drive.frequency_omega * control.substeps_per_period as f64);
        let phase_step = if spectral_radius > 0.0 { control.max_phase_per_step / spectral_radius } else { f64::INFINITY };
        Ok(DrivenPropagator {
            n_atoms,
            drive,
            twisting,
            shift,
            m,
            max_step: period_step.min(phase_step),
            frame: control.frame,
        })
    }

    /// RK4 step size upper bound.
    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    /// `dpsi/dt = -i H(t) psi` in the integration frame.
    fn derivative(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        match self.frame {
            IntegrationFrame::DriveRotating => {
                // e^{i Phi Jz} A e^{-i Phi Jz} has phase e^{i Phi d} on diagonal offset d
                let phi = self.drive.phase(t);
                self.twisting.mul_add_phased(psi, out, |d| C64::from_polar(1.0, phi * d as f64));
            }
            IntegrationFrame::Lab => {
                self.twisting.mul_add_phased(psi, out, |_| C64::new(1.0, 0.0));
                let f = self.drive.field(t);
                for ((o, p), m) in out.iter_mut().zip(psi).zip(&self.m) {
                    *o += f * m * p;
                }
            }
        }
        let minus_i = C64::new(0.0, -1.0);
        out.iter_mut().for_each(|z| *z *= minus_i);
    }

    fn to_frame(&self, psi: &mut [C64], t: f64, sign: f64) {
        if self.frame == IntegrationFrame::DriveRotating {
            let phi = self.drive.phase(t);
            for (p, m) in psi.iter_mut().zip(&self.m) {
                *p *= C64::from_polar(1.0, sign * phi * m);
            }
        }
    }

    /// Integrates raw amplitudes from `t0` to `t1` (absolute times).
    fn integrate(&self, psi: &DVector<C64>, t0: f64, t1: f64, max_step: f64) -> DVector<C64> {
        let dim = self.n_atoms + 1;
        let mut y: Vec<C64> = psi.iter().copied().collect();
        // lab -> rotating frame: psi_I = e^{+i Phi(t0) Jz} psi
        self.to_frame(&mut y, t0, 1.0);
        let span = t1 - t0;
        let steps = (span / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let (mut k1, mut k2, mut k3, mut k4) = (vec![C64::default(); dim], vec![C64::default(); dim], vec![C64::default(); dim], vec![C64::default(); dim]);
        let mut tmp = vec![C64::default(); dim];
        for s in 0..steps {
            let t = t0 + s as f64 * h;
            self.derivative(t, &y, &mut k1);
            tmp.iter_mut().zip(&y).zip(&k1).for_each(|((o, y), k)| *o = y + k * (0.5 * h));
            self.derivative(t + 0.5 * h, &tmp, &mut k2);
            tmp.iter_mut().zip(&y).zip(&k2).for_each(|((o, y), k)| *o = y + k * (0.5 * h));
            self.derivative(t + 0.5 * h, &tmp, &mut k3);
            tmp.iter_mut().zip(&y).zip(&k3).for_each(|((o, y), k)| *o = y + k * h);
            self.derivative(t + h, &tmp, &mut k4);
            for i in 0..dim {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        self.to_frame(&mut y, t1, -1.0);
        let global = C64::from_polar(1.0, -self.shift * span);
        DVector::from_iterator(dim, y.into_iter().map(|z| z * global))
    }

    /// Propagates `state` from absolute time `t0` to `t1`, returning the state
    /// and its norm drift before renormalization. An interval whose drift
    /// exceeds [`MAX_NORM_DRIFT`] is retried with a halved step, at most
    /// [`MAX_STEP_HALVINGS`] times.
    pub fn advance(&self, state: &DickeState, t0: f64, t1: f64) -> Result<(DickeState, f64)> {
        if state.n_atoms() != self.n_atoms {
            return Err(Error::DimensionMismatch { expected: self.n_atoms, found: state.n_atoms() });
        }
        if t1 < t0 {
            return Err(Error::invalid("cannot propagate backwards in time"));
        }
        if t1 == t0 {
            return Ok((state.clone(), 0.0));
        }
        let mut max_step = self.max_step;
        let mut halvings = 0;
        loop {
            let raw = self.integrate(state.amplitudes(), t0, t1, max_step);
            let drift = (raw.norm() - 1.0).abs();
            if drift <= MAX_NORM_DRIFT {
                return Ok((DickeState::normalized(self.n_atoms, raw)?, drift));
            }
            if !drift.is_finite() || halvings == MAX_STEP_HALVINGS {
                return Err(Error::Integration { drift, limit: MAX_NORM_DRIFT });
            }
            max_step *= 0.5;
            halvings += 1;
        }
    }
}

/// How the states of a trajectory were generated; reused to re-propagate.
#[derive(Clone, Debug)]
pub enum Dynamics {
    Static(Arc<StaticPropagator>),
    Driven(Arc<DrivenPropagator>),
}

/// States sampled along one evolution.
#[derive(Clone, Debug)]
pub struct Trajectory {
    n_atoms: usize,
    spec: Option<HamiltonianSpec>,
    times: Vec<f64>,
    states: Vec<DickeState>,
    dynamics: Dynamics,
    max_norm_drift: f64,
}

impl Trajectory {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Hamiltonian that generated the trajectory, when it was built from a spec.
    pub fn spec(&self) -> Option<&HamiltonianSpec> {
        self.spec.as_ref()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DickeState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    /// Largest norm drift seen between samples, before renormalization.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    /// State at an arbitrary time in `[0, t_last]`, propagated from the
    /// closest stored sample at or before `t`.
    pub fn state_at(&self, t: f64) -> Result<DickeState> {
        let last = *self.times.last().expect("trajectories are non-empty");
        if !(0.0..=last).contains(&t) {
            return Err(Error::invalid(format!("time {t} outside the trajectory window [0, {last}]")));
        }
        let idx = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let (t0, from) = (self.times[idx], &self.states[idx]);
        match &self.dynamics {
            Dynamics::Static(p) => p.advance(from, t - t0),
            Dynamics::Driven(p) => Ok(p.advance(from, t0, t)?.0),
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(Error::invalid("time grid is empty")),
        Some(&t0) if t0 != 0.0 => return Err(Error::invalid(format!("time grid must start at 0, starts at {t0}"))),
        _ => {}
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid contains non-finite values"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Exact evolution under a time-independent Hamiltonian.
pub fn propagate_static(hamiltonian: &CollectiveOperator, initial: &DickeState, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let propagator = StaticPropagator::new(hamiltonian)?;
    let coeffs = propagator.project(initial)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(initial.clone());
    let mut max_norm_drift: f64 = 0.0;
    for &t in &times[1..] {
        let raw = propagator.evolve_coefficients(&coeffs, t);
        max_norm_drift = max_norm_drift.max((raw.norm() - 1.0).abs());
        states.push(DickeState::normalized(initial.n_atoms(), raw)?);
    }
    Ok(Trajectory {
        n_atoms: initial.n_atoms(),
        spec: None,
        times: times.to_vec(),
        states,
        dynamics: Dynamics::Static(Arc::new(propagator)),
        max_norm_drift,
    })
}

/// RK4 evolution under the full driven Hamiltonian.
pub fn propagate_driven(
    spec: &HamiltonianSpec,
    initial: &DickeState,
    times: &[f64],
    control: &StepControl,
) -> Result<Trajectory> {
    check_times(times)?;
    let propagator = DrivenPropagator::new(spec, initial.n_atoms(), control)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(initial.clone());
    let mut max_norm_drift: f64 = 0.0;
    for w in times.windows(2) {
        let (next, drift) = propagator.advance(states.last().unwrap(), w[0], w[1])?;
        max_norm_drift = max_norm_drift.max(drift);
        states.push(next);
    }
    Ok(Trajectory {
        n_atoms: initial.n_atoms(),
        spec: Some(*spec),
        times: times.to_vec(),
        states,
        dynamics: Dynamics::Driven(Arc::new(propagator)),
        max_norm_drift,
    })
}

/// Evolves `initial` under any Hamiltonian spec, dispatching on whether it is driven.
pub fn evolve(spec: &HamiltonianSpec, initial: &DickeState, times: &[f64], control: &StepControl) -> Result<Trajectory> {
    if spec.is_time_dependent() {
        return propagate_driven(spec, initial, times, control);
    }
    let h = crate::hamiltonians::build_hamiltonian(spec, initial.n_atoms(), 0.0)?;
    let mut traj = propagate_static(&h, initial, times)?;
    traj.spec = Some(*spec);
    Ok(traj)
}

/// `n` uniformly spaced times on `[0, t_max]`.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}
