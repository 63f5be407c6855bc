use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power law `xi^2 = prefactor * N^exponent` fitted in log-log space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub label: String,
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub n_range: (usize, usize),
}

pub const MIN_FIT_POINTS: usize = 5;

/// Ordinary least squares of `ln xi2` against `ln n`.
pub fn fit_power_law(label: &str, n_atoms: &[usize], xi2: &[f64]) -> Result<ScalingFit> {
    if n_atoms.len() != xi2.len() {
        return Err(Error::invalid("fit inputs differ in length"));
    }
    if n_atoms.len() < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "a scaling fit needs at least {MIN_FIT_POINTS} points, got {}",
            n_atoms.len()
        )));
    }
    if xi2.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("squeezing values must be positive to fit in log space"));
    }
    let x: Vec<f64> = n_atoms.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = xi2.iter().map(|v| v.ln()).collect();
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("all N values are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(ScalingFit {
        label: label.to_string(),
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        n_range: (*n_atoms.iter().min().unwrap(), *n_atoms.iter().max().unwrap()),
    })
}
