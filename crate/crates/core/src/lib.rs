//! Squeezing dynamics of a collective spin under one-axis twisting with a
//! continuous transverse drive.
//!
//! A drive `g cos(omega t) Jz` added to the twisting Hamiltonian `chi Jx^2`
//! averages, for `omega >> N chi`, to
//! `(chi/2) [(A+1) Jx^2 - (A-1) Jy^2]` with `A = J0(2g/omega)`. Tuning
//! `A = 1/3` or `A = -1/3` yields a pure two-axis-twisting Hamiltonian, whose
//! squeezing scales as `1/N` instead of `N^(-2/3)`.
//!
//! Modules, bottom-up:
//!
//! * [`spin`]: Dicke-basis states, angular momentum operators, moments.
//! * [`hamiltonians`]: the driven, one-axis, effective and two-axis Hamiltonians; `J0` and drive-ratio roots.
//! * [`evolve`]: exact propagation for static Hamiltonians, RK4 for the driven one.
//! * [`squeezing`]: the squeezing parameter and its optimum along a trajectory.
//! * [`experiments`]: sweeps, power-law fits and csv/json/svg output.

pub mod error;
pub mod evolve;
pub mod experiments;
pub mod hamiltonians;
pub mod spin;
pub mod squeezing;

pub use error::{Error, Result};
pub use evolve::{evolve, propagate_driven, propagate_static, IntegrationFrame, StepControl, Trajectory};
pub use experiments::{
    find_optimum, run_n_scaling, run_ratio_scan, run_time_curve, OptimumSearch, OutputFormat, ScalingFit, SpecTemplate,
    SweepConfig, SweepKind, SweepTable,
};
pub use hamiltonians::{
    bessel_j0, build_hamiltonian, rwa_validity, solve_drive_ratio, DriveParams, HamiltonianKind, HamiltonianSpec,
    RwaDiagnostic,
};
pub use spin::{
    build_angular_momentum, expectation, symmetrized_covariance, Axis, CollectiveOperator, Component, DickeState,
    OperatorLabel,
};
pub use squeezing::{optimal_squeezing, xi_squared, SqueezingRecord};
