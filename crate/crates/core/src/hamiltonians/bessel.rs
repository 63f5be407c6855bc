//! Zeroth-order Bessel function of the first kind and the drive-ratio solver.

use crate::error::{Error, Result};

/// Global minimum of `J0`, attained at the first zero of `J1` (x ≈ 3.8317).
pub const J0_GLOBAL_MIN: f64 = -0.402_759_395_702_553;

// Below this |x| the alternating power series loses < 3 digits to cancellation.
const SERIES_LIMIT: f64 = 8.0;

/// `J0(x)`, accurate to ~1e-14 absolute for |x| <= 50.
///
/// Power series for small arguments, Miller's backward recurrence normalized by
/// `J0 + 2 (J2 + J4 + ...) = 1` otherwise.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("bessel_j0 argument {x} is not finite")));
    }
    let x = x.abs();
    if x <= SERIES_LIMIT {
        Ok(j0_series(x))
    } else {
        Ok(j0_miller(x))
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    // start index well above x so the recurrence has decayed into the minimal solution
    let mut start = (x + 30.0 + (40.0 * x).sqrt()) as usize;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
        }
        if k == 1 {
            j0 = cur;
        }
    }
    j0 / (norm + j0)
}

/// Configuration of the sign-change scan used by [`solve_drive_ratio_in`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSearch {
    /// Upper end of the ratio window `(0, max_ratio]`.
    pub max_ratio: f64,
    /// Bracketing grid step.
    pub grid_step: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch { max_ratio: 3.0, grid_step: 0.01, tolerance: 1e-12 }
    }
}

/// Every drive ratio `r = g/omega` in `(0, 3]` with `J0(2r) = target_a`.
pub fn solve_drive_ratio(target_a: f64) -> Vec<f64> {
    solve_drive_ratio_in(target_a, &RootSearch::default())
}

pub fn solve_drive_ratio_in(target_a: f64, search: &RootSearch) -> Vec<f64> {
    if !target_a.is_finite() || !(search.grid_step > 0.0) || !(search.max_ratio > 0.0) {
        return Vec::new();
    }
    let f = |r: f64| j0_series_or_miller(2.0 * r) - target_a;
    let steps = (search.max_ratio / search.grid_step).round() as usize;
    let mut roots = Vec::new();
    let mut lo = search.grid_step;
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        roots.push(lo);
    }
    for i in 2..=steps {
        let hi = (i as f64 * search.grid_step).min(search.max_ratio);
        let f_hi = f(hi);
        if f_hi == 0.0 {
            roots.push(hi);
        } else if f_lo * f_hi < 0.0 {
            roots.push(bisect(&f, lo, hi, f_lo, search.tolerance));
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots
}

fn j0_series_or_miller(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_miller(x)
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}
