//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the library's propagators or squeezing code: the
//! matrix exponential is a scaled-and-squared Taylor series and the squeezing
//! parameter is a brute-force scan over transverse directions.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use spintwist::spin::SpinOperators;
use spintwist::DickeState;

/// `exp(-i H t)` by scaling and squaring a 30-term Taylor series.
pub fn expm_taylor(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let a = h * C64::new(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as u32) + 1;
    let scaled = a.unscale(2f64.powi(squarings as i32));
    let dim = h.nrows();
    let mut result = DMatrix::<C64>::identity(dim, dim);
    let mut term = DMatrix::<C64>::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn evolve_dense(h: &DMatrix<C64>, psi: &DickeState, t: f64) -> DickeState {
    let v = expm_taylor(h, t) * psi.amplitudes();
    DickeState::normalized(psi.n_atoms(), v).unwrap()
}

fn expect(m: &DMatrix<C64>, v: &DVector<C64>) -> f64 {
    v.dotc(&(m * v)).re
}

/// Mean spin vector by direct matrix-vector products.
pub fn mean_spin(ops: &SpinOperators, psi: &DickeState) -> [f64; 3] {
    let v = psi.amplitudes();
    [expect(ops.jx().matrix(), v), expect(ops.jy().matrix(), v), expect(ops.jz().matrix(), v)]
}

/// `4 min_theta Var(J_theta) / N` over `samples` uniformly spaced directions
/// perpendicular to the mean spin.
pub fn xi_squared_scan(psi: &DickeState, samples: usize) -> f64 {
    let n = psi.n_atoms();
    let ops = SpinOperators::new(n).unwrap();
    let mean = mean_spin(&ops, psi);
    let len = (mean[0].powi(2) + mean[1].powi(2) + mean[2].powi(2)).sqrt();
    let n0 = [mean[0] / len, mean[1] / len, mean[2] / len];
    // Gram-Schmidt from whichever axis is least aligned with n0
    let seed = if n0[0].abs() < 0.5 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = seed[0] * n0[0] + seed[1] * n0[1] + seed[2] * n0[2];
    let mut u = [seed[0] - p * n0[0], seed[1] - p * n0[1], seed[2] - p * n0[2]];
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u = [u[0] / un, u[1] / un, u[2] / un];
    let w = [n0[1] * u[2] - n0[2] * u[1], n0[2] * u[0] - n0[0] * u[2], n0[0] * u[1] - n0[1] * u[0]];
    let ju = ops.along(u);
    let jw = ops.along(w);
    let v = psi.amplitudes();
    let min_var = (0..samples)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / samples as f64;
            let j = &ju * C64::new(th.cos(), 0.0) + &jw * C64::new(th.sin(), 0.0);
            let jv = &j * v;
            let m = v.dotc(&jv).re;
            jv.norm_squared() - m * m
        })
        .fold(f64::INFINITY, f64::min);
    4.0 * min_var / n as f64
}

/// `exp(-i theta n.J)` applied to `psi`.
pub fn rotate(psi: &DickeState, axis: [f64; 3], theta: f64) -> DickeState {
    let ops = SpinOperators::new(psi.n_atoms()).unwrap();
    let nn = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let gen = ops.along([axis[0] / nn, axis[1] / nn, axis[2] / nn]);
    evolve_dense(&gen, psi, theta)
}

/// Dominant period of a uniformly sampled signal: linear trend removed, then
/// the peak of a direct periodogram over `[min_period, max_period]`.
pub fn dominant_period(times: &[f64], signal: &[f64], min_period: f64, max_period: f64) -> f64 {
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let ms = signal.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let sts: f64 = times.iter().zip(signal).map(|(t, s)| (t - mt) * (s - ms)).sum();
    let slope = sts / stt;
    let detrended: Vec<f64> = times.iter().zip(signal).map(|(t, s)| s - ms - slope * (t - mt)).collect();
    let (f_lo, f_hi) = (1.0 / max_period, 1.0 / min_period);
    let steps = 20_000;
    let mut best = (0.0, f_lo);
    for i in 0..=steps {
        let f = f_lo + (f_hi - f_lo) * i as f64 / steps as f64;
        let w = 2.0 * std::f64::consts::PI * f;
        let (mut c, mut s) = (0.0, 0.0);
        for (t, x) in times.iter().zip(&detrended) {
            c += x * (w * t).cos();
            s += x * (w * t).sin();
        }
        let power = c * c + s * s;
        if power > best.0 {
            best = (power, f);
        }
    }
    1.0 / best.1
}
