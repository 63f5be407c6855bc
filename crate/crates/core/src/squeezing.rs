//! Kitagawa–Ueda squeezing parameter and its optimum along a trajectory.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::spin::{total_spin, DickeState, SpinMoments, SpinOperators};

/// Mean spin shorter than `DEGENERATE_FRACTION * N/2` makes the transverse plane ill-defined.
pub const DEGENERATE_FRACTION: f64 = 1e-6;

/// Golden-section refinement stops once the bracket is this narrow (units 1/chi).
pub const REFINE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingRecord {
    pub time: f64,
    pub xi_squared: f64,
    pub mean_spin: [f64; 3],
    pub mean_spin_length: f64,
    /// Angle in `[0, pi)` of the least-noisy direction, measured from `n1` towards `n2`.
    pub optimal_angle: f64,
    /// Mean spin below threshold; `xi_squared` is unreliable.
    pub degenerate: bool,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Orthonormal pair `(n1, n2)` perpendicular to the unit vector `n0`.
///
/// `n1 = n0 x z` normalized, falling back to `n0 x x` near the poles; `n2 = n0 x n1`.
pub fn transverse_frame(n0: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut n1 = cross(n0, [0.0, 0.0, 1.0]);
    if norm(n1) < 1e-8 {
        n1 = cross(n0, [1.0, 0.0, 0.0]);
    }
    let n1 = scaled(n1, 1.0 / norm(n1));
    (n1, cross(n0, n1))
}

/// `n_a^T C n_b` for the covariance matrix `C`.
pub fn covariance_along(moments: &SpinMoments, a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = &moments.covariance;
    (0..3).map(|i| (0..3).map(|j| a[i] * c[i][j] * b[j]).sum::<f64>()).sum()
}

/// Smallest eigenvalue of the 2x2 transverse covariance and the angle of its eigenvector.
pub fn transverse_minimum(moments: &SpinMoments, n1: [f64; 3], n2: [f64; 3]) -> (f64, f64) {
    let v11 = covariance_along(moments, n1, n1);
    let v22 = covariance_along(moments, n2, n2);
    let v12 = covariance_along(moments, n1, n2);
    let lambda_min = 0.5 * (v11 + v22 - ((v11 - v22).powi(2) + 4.0 * v12 * v12).sqrt());
    // variance(theta) = mean + R cos(2 theta - phi); the minimum sits a quarter turn from phi/2
    let phi = (2.0 * v12).atan2(v11 - v22);
    let angle = (0.5 * phi + 0.5 * PI).rem_euclid(PI);
    (lambda_min, angle)
}

/// Evaluates squeezing records for one ensemble size, reusing the spin operators.
#[derive(Clone, Debug)]
pub struct SqueezingMeter {
    ops: SpinOperators,
}

impl SqueezingMeter {
    pub fn new(n_atoms: usize) -> Result<Self> {
        Ok(SqueezingMeter { ops: SpinOperators::new(n_atoms)? })
    }

    pub fn operators(&self) -> &SpinOperators {
        &self.ops
    }

    pub fn measure(&self, time: f64, state: &DickeState) -> Result<SqueezingRecord> {
        let moments = self.ops.moments(state)?;
        Ok(record_from_moments(time, state.n_atoms(), &moments))
    }
}

fn record_from_moments(time: f64, n_atoms: usize, moments: &SpinMoments) -> SqueezingRecord {
    let mean = moments.mean;
    let length = norm(mean);
    let degenerate = length < DEGENERATE_FRACTION * total_spin(n_atoms);
    let n0 = if length > 0.0 { scaled(mean, 1.0 / length) } else { [0.0, 0.0, 1.0] };
    let (n1, n2) = transverse_frame(n0);
    debug_assert!(degenerate || (dot(mean, n1).abs() < 1e-8 && dot(mean, n2).abs() < 1e-8));
    let (lambda_min, optimal_angle) = transverse_minimum(moments, n1, n2);
    SqueezingRecord {
        time,
        xi_squared: 4.0 * lambda_min / n_atoms as f64,
        mean_spin: mean,
        mean_spin_length: length,
        optimal_angle,
        degenerate,
    }
}

/// Squeezing record of a single state (time stamped 0).
pub fn xi_squared(state: &DickeState) -> Result<SqueezingRecord> {
    SqueezingMeter::new(state.n_atoms())?.measure(0.0, state)
}

/// Squeezing record at every stored sample.
pub fn squeezing_curve(traj: &Trajectory) -> Result<Vec<SqueezingRecord>> {
    let meter = SqueezingMeter::new(traj.n_atoms())?;
    traj.times().iter().zip(traj.states()).map(|(&t, s)| meter.measure(t, s)).collect()
}

/// Index of the smallest non-degenerate `xi_squared`.
pub fn grid_minimum(records: &[SqueezingRecord]) -> Option<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.degenerate)
        .min_by(|(_, a), (_, b)| a.xi_squared.total_cmp(&b.xi_squared))
        .map(|(i, _)| i)
}

/// Best squeezing along the trajectory: grid minimum refined by golden-section
/// search between its neighbouring samples.
pub fn optimal_squeezing(traj: &Trajectory) -> Result<SqueezingRecord> {
    if traj.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 samples to locate an optimum, got {}", traj.len())));
    }
    let meter = SqueezingMeter::new(traj.n_atoms())?;
    let records: Vec<SqueezingRecord> =
        traj.times().iter().zip(traj.states()).map(|(&t, s)| meter.measure(t, s)).collect::<Result<_>>()?;
    let best = grid_minimum(&records).ok_or(Error::OverSqueezed)?;
    let times = traj.times();
    let lo = times[best.saturating_sub(1)];
    let hi = times[(best + 1).min(times.len() - 1)];

    let eval = |t: f64| -> Result<SqueezingRecord> { meter.measure(t, &traj.state_at(t)?) };
    let score = |r: &SqueezingRecord| if r.degenerate { f64::INFINITY } else { r.xi_squared };

    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut rc = eval(c)?;
    let mut rd = eval(d)?;
    while b - a > REFINE_TOLERANCE {
        if score(&rc) < score(&rd) {
            b = d;
            d = c;
            rd = rc;
            c = b - inv_phi * (b - a);
            rc = eval(c)?;
        } else {
            a = c;
            c = d;
            rc = rd;
            d = a + inv_phi * (b - a);
            rd = eval(d)?;
        }
    }
    let refined = if score(&rc) < score(&rd) { rc } else { rd };
    Ok(if score(&refined) < score(&records[best]) { refined } else { records[best] })
}
