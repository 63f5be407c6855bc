//! Hamiltonians of the driven one-axis-twisting model and its effective limits.
//!
//! All energies are in units of the twisting strength scale and `hbar = 1`.

mod bessel;

pub use bessel::{bessel_j0, solve_drive_ratio, solve_drive_ratio_in, RootSearch, J0_GLOBAL_MIN};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{check_atoms, CollectiveOperator, SpinOperators};

/// `omega / (N chi)` at or above which the rotating-wave picture is trusted.
pub const RWA_VALIDITY_THRESHOLD: f64 = 10.0;

/// Continuous drive `Omega(t) = g cos(omega t)` along `Jz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub amplitude_g: f64,
    pub frequency_omega: f64,
}

impl DriveParams {
    pub fn new(amplitude_g: f64, frequency_omega: f64) -> Result<Self> {
        let d = DriveParams { amplitude_g, frequency_omega };
        d.validate()?;
        Ok(d)
    }

    /// Drive with amplitude `ratio * omega`.
    pub fn from_ratio(ratio: f64, frequency_omega: f64) -> Result<Self> {
        DriveParams::new(ratio * frequency_omega, frequency_omega)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_omega.is_finite() && self.frequency_omega > 0.0) {
            return Err(Error::invalid(format!(
                "drive frequency must be positive and finite, got {}",
                self.frequency_omega
            )));
        }
        if !(self.amplitude_g.is_finite() && self.amplitude_g >= 0.0) {
            return Err(Error::invalid(format!(
                "drive amplitude must be non-negative and finite, got {}",
                self.amplitude_g
            )));
        }
        Ok(())
    }

    /// `g / omega`.
    pub fn ratio(&self) -> f64 {
        self.amplitude_g / self.frequency_omega
    }

    /// Effective coefficient `A = J0(2g/omega)` left after the rotating-wave approximation.
    pub fn bessel_coefficient(&self) -> f64 {
        bessel_j0(2.0 * self.ratio()).expect("validated drive ratio is finite")
    }

    pub fn field(&self, t: f64) -> f64 {
        self.amplitude_g * (self.frequency_omega * t).cos()
    }

    /// Accumulated drive phase `int_0^t Omega = (g/omega) sin(omega t)`.
    pub fn phase(&self, t: f64) -> f64 {
        self.ratio() * (self.frequency_omega * t).sin()
    }
}

/// Which Hamiltonian to build.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum HamiltonianSpec {
    /// `chi Jx^2 + g cos(omega t) Jz`.
    FullDriven { chi: f64, drive: DriveParams },
    /// `chi Jx^2`.
    Oat { chi: f64 },
    /// `(chi/2) [(A+1) Jx^2 - (A-1) Jy^2]`.
    EffectiveMixed { chi: f64, a: f64 },
    /// `(chi/3) (Jx^2 - Jz^2)`.
    TatXz { chi: f64 },
    /// `(chi/3) (Jy^2 - Jz^2)`.
    TatYz { chi: f64 },
}

impl HamiltonianSpec {
    pub fn full_driven(chi: f64, amplitude_g: f64, frequency_omega: f64) -> Result<Self> {
        let spec = HamiltonianSpec::FullDriven { chi, drive: DriveParams::new(amplitude_g, frequency_omega)? };
        spec.validate()?;
        Ok(spec)
    }

    pub fn effective_mixed(chi: f64, a: f64) -> Result<Self> {
        let spec = HamiltonianSpec::EffectiveMixed { chi, a };
        spec.validate()?;
        Ok(spec)
    }

    /// Effective Hamiltonian of a fast drive with the given `g/omega`.
    pub fn effective_for_ratio(chi: f64, ratio: f64) -> Result<Self> {
        let a = bessel_j0(2.0 * ratio)?;
        HamiltonianSpec::effective_mixed(chi, a)
    }

    pub fn chi(&self) -> f64 {
        match *self {
            HamiltonianSpec::FullDriven { chi, .. }
            | HamiltonianSpec::Oat { chi }
            | HamiltonianSpec::EffectiveMixed { chi, .. }
            | HamiltonianSpec::TatXz { chi }
            | HamiltonianSpec::TatYz { chi } => chi,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, HamiltonianSpec::FullDriven { .. })
    }

    /// Short name used on the command line and in column headers.
    pub fn label(&self) -> &'static str {
        match self {
            HamiltonianSpec::FullDriven { .. } => "full",
            HamiltonianSpec::Oat { .. } => "oat",
            HamiltonianSpec::EffectiveMixed { .. } => "mixed",
            HamiltonianSpec::TatXz { .. } => "tat-xz",
            HamiltonianSpec::TatYz { .. } => "tat-yz",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let chi = self.chi();
        if !(chi.is_finite() && chi > 0.0) {
            return Err(Error::invalid(format!("chi must be positive and finite, got {chi}")));
        }
        match self {
            HamiltonianSpec::FullDriven { drive, .. } => drive.validate(),
            HamiltonianSpec::EffectiveMixed { a, .. } => {
                if !(a.is_finite() && *a >= J0_GLOBAL_MIN - 1e-9 && *a <= 1.0) {
                    return Err(Error::invalid(format!(
                        "Bessel coefficient A = {a} outside [{J0_GLOBAL_MIN}, 1]"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Kind of Hamiltonian without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    Full,
    Oat,
    TatXz,
    TatYz,
    Mixed,
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HamiltonianKind::Full => "full",
            HamiltonianKind::Oat => "oat",
            HamiltonianKind::TatXz => "tat-xz",
            HamiltonianKind::TatYz => "tat-yz",
            HamiltonianKind::Mixed => "mixed",
        })
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(HamiltonianKind::Full),
            "oat" => Ok(HamiltonianKind::Oat),
            "tat-xz" => Ok(HamiltonianKind::TatXz),
            "tat-yz" => Ok(HamiltonianKind::TatYz),
            "mixed" => Ok(HamiltonianKind::Mixed),
            other => Err(Error::invalid(format!(
                "unknown Hamiltonian '{other}' (expected full, oat, tat-xz, tat-yz or mixed)"
            ))),
        }
    }
}

/// Time-independent part of each Hamiltonian plus the `Jz` drive, if any.
pub(crate) struct Decomposed {
    pub static_part: DMatrix<C64>,
    pub drive: Option<DriveParams>,
}

pub(crate) fn decompose(spec: &HamiltonianSpec, ops: &SpinOperators) -> Result<Decomposed> {
    spec.validate()?;
    let sq = |op: &CollectiveOperator| op.matrix() * op.matrix();
    let (jx2, jy2, jz2) = (sq(ops.jx()), sq(ops.jy()), sq(ops.jz()));
    let (static_part, drive) = match *spec {
        HamiltonianSpec::FullDriven { chi, drive } => (jx2.scale(chi), Some(drive)),
        HamiltonianSpec::Oat { chi } => (jx2.scale(chi), None),
        HamiltonianSpec::EffectiveMixed { chi, a } => {
            ((jx2.scale(a + 1.0) - jy2.scale(a - 1.0)).scale(0.5 * chi), None)
        }
        HamiltonianSpec::TatXz { chi } => ((jx2 - jz2).scale(chi / 3.0), None),
        HamiltonianSpec::TatYz { chi } => ((jy2 - jz2).scale(chi / 3.0), None),
    };
    Ok(Decomposed { static_part, drive })
}

/// Matrix of `spec` for `n_atoms` spins at time `time` (ignored unless driven).
pub fn build_hamiltonian(spec: &HamiltonianSpec, n_atoms: usize, time: f64) -> Result<CollectiveOperator> {
    check_atoms(n_atoms)?;
    let ops = SpinOperators::new(n_atoms)?;
    build_hamiltonian_with(spec, &ops, time)
}

pub(crate) fn build_hamiltonian_with(
    spec: &HamiltonianSpec,
    ops: &SpinOperators,
    time: f64,
) -> Result<CollectiveOperator> {
    let Decomposed { mut static_part, drive } = decompose(spec, ops)?;
    if let Some(drive) = drive {
        if !time.is_finite() {
            return Err(Error::invalid(format!("time {time} is not finite")));
        }
        static_part += ops.jz().matrix().scale(drive.field(time));
    }
    CollectiveOperator::hamiltonian(ops.n_atoms(), static_part)
}

/// How far a driven configuration sits inside the rotating-wave regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaDiagnostic {
    /// `omega / (N chi)`.
    pub ratio: f64,
    pub is_valid: bool,
}

pub fn rwa_validity(spec: &HamiltonianSpec, n_atoms: usize) -> Result<RwaDiagnostic> {
    check_atoms(n_atoms)?;
    let HamiltonianSpec::FullDriven { chi, drive } = *spec else {
        return Err(Error::invalid(format!(
            "rwa_validity needs a full driven Hamiltonian, got '{}'",
            spec.label()
        )));
    };
    spec.validate()?;
    let ratio = drive.frequency_omega / (n_atoms as f64 * chi);
    Ok(RwaDiagnostic { ratio, is_valid: ratio >= RWA_VALIDITY_THRESHOLD })
}
