//! Sweep drivers behind the command-line tool: squeezing-versus-time curves,
//! optimal squeezing against atom number with power-law fits, and optimal
//! squeezing against drive ratio.
//!
//! Sweep points are independent and run on the rayon pool; results are
//! assembled in input order so output does not depend on the thread count.

mod emit;
mod fit;

pub use emit::{emit, format_significant, load_json, render, OutputFormat};
pub use fit::{fit_power_law, ScalingFit, MIN_FIT_POINTS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{evolve, uniform_times, StepControl};
use crate::hamiltonians::{rwa_validity, DriveParams, HamiltonianSpec, RwaDiagnostic};
use crate::spin::{check_atoms, Axis, DickeState};
use crate::squeezing::{grid_minimum, optimal_squeezing, squeezing_curve, SqueezingRecord};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Drive frequency per atom used when a driven template is resolved for a given `N`.
pub const DEFAULT_OMEGA_PER_ATOM: f64 = 70.0;

/// Default search window: three times `sqrt(3) N^(-2/3) / chi`, clamped to `[0.05, 2] / chi`.
pub fn default_t_max(n_atoms: usize, chi: f64) -> f64 {
    (3.0 * 3.0_f64.sqrt() * (n_atoms as f64).powf(-2.0 / 3.0)).clamp(0.05, 2.0) / chi
}

/// How the optimum of a trajectory is searched for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimumSearch {
    pub n_samples: usize,
    /// Initial window; `None` uses [`default_t_max`].
    pub t_max: Option<f64>,
    /// Times the window may be doubled while the minimum sits on its right edge.
    pub max_extensions: usize,
}

impl Default for OptimumSearch {
    fn default() -> Self {
        OptimumSearch { n_samples: 400, t_max: None, max_extensions: 6 }
    }
}

/// Optimal squeezing together with the window that contained it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub record: SqueezingRecord,
    pub t_max: f64,
}

/// Locates the best squeezing of `spec` from a coherent state along `axis`.
pub fn find_optimum(
    spec: &HamiltonianSpec,
    n_atoms: usize,
    axis: Axis,
    search: &OptimumSearch,
    step: &StepControl,
) -> Result<Optimum> {
    if search.n_samples < 3 {
        return Err(Error::invalid("optimum search needs at least 3 samples"));
    }
    let initial = DickeState::coherent(n_atoms, axis)?;
    let mut t_max = search.t_max.unwrap_or_else(|| default_t_max(n_atoms, spec.chi()));
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid(format!("search window {t_max} must be positive")));
    }
    let mut extensions = 0;
    loop {
        let times = uniform_times(t_max, search.n_samples);
        let traj = evolve(spec, &initial, &times, step)?;
        let records = squeezing_curve(&traj)?;
        let best = grid_minimum(&records).ok_or(Error::OverSqueezed)?;
        if best + 1 < records.len() || extensions >= search.max_extensions {
            return Ok(Optimum { record: optimal_squeezing(&traj)?, t_max });
        }
        t_max *= 2.0;
        extensions += 1;
    }
}

/// A Hamiltonian that may depend on the atom number of the sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "kebab-case")]
pub enum SpecTemplate {
    Fixed { spec: HamiltonianSpec },
    /// Full driven Hamiltonian with `omega = omega_per_atom * N * chi` and `g = ratio * omega`.
    DrivenPerAtom { chi: f64, ratio: f64, omega_per_atom: f64 },
}

impl SpecTemplate {
    pub fn resolve(&self, n_atoms: usize) -> Result<HamiltonianSpec> {
        match *self {
            SpecTemplate::Fixed { spec } => {
                spec.validate()?;
                Ok(spec)
            }
            SpecTemplate::DrivenPerAtom { chi, ratio, omega_per_atom } => {
                let omega = omega_per_atom * n_atoms as f64 * chi;
                let spec = HamiltonianSpec::FullDriven { chi, drive: DriveParams::from_ratio(ratio, omega)? };
                spec.validate()?;
                Ok(spec)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SpecTemplate::Fixed { spec } => spec.label(),
            SpecTemplate::DrivenPerAtom { .. } => "full",
        }
    }
}

impl From<HamiltonianSpec> for SpecTemplate {
    fn from(spec: HamiltonianSpec) -> Self {
        SpecTemplate::Fixed { spec }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    TimeCurve,
    NScaling,
    RatioScan,
}

/// Every parameter needed to regenerate a table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepConfig {
    TimeCurve {
        spec: HamiltonianSpec,
        n_atoms: usize,
        axis: Axis,
        t_max: f64,
        n_samples: usize,
        step: StepControl,
    },
    NScaling {
        templates: Vec<SpecTemplate>,
        n_list: Vec<usize>,
        axis: Axis,
        search: OptimumSearch,
        step: StepControl,
    },
    RatioScan {
        chi: f64,
        n_atoms: usize,
        axis: Axis,
        omega: f64,
        ratios: Vec<f64>,
        search: OptimumSearch,
        step: StepControl,
    },
}

impl SweepConfig {
    pub fn kind(&self) -> SweepKind {
        match self {
            SweepConfig::TimeCurve { .. } => SweepKind::TimeCurve,
            SweepConfig::NScaling { .. } => SweepKind::NScaling,
            SweepConfig::RatioScan { .. } => SweepKind::RatioScan,
        }
    }

    /// Runs the sweep this configuration describes.
    pub fn run(&self) -> Result<SweepTable> {
        match self {
            SweepConfig::TimeCurve { spec, n_atoms, axis, t_max, n_samples, step } => {
                run_time_curve(spec, *n_atoms, *axis, *t_max, *n_samples, step)
            }
            SweepConfig::NScaling { templates, n_list, axis, search, step } => {
                run_n_scaling(templates, n_list, *axis, search, step)
            }
            SweepConfig::RatioScan { chi, n_atoms, axis, omega, ratios, search, step } => {
                run_ratio_scan(*chi, *n_atoms, *axis, ratios, *omega, search, step)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub config: SweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rwa: Option<RwaDiagnostic>,
    /// Optimal squeezing of the matching two-axis Hamiltonian at this `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tat_reference: Option<f64>,
    /// Only filled on request; its presence makes output non-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl Metadata {
    fn new(config: SweepConfig) -> Self {
        Metadata { tool_version: TOOL_VERSION.to_string(), config, rwa: None, tat_reference: None, wall_clock_seconds: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named, equal-length numeric columns plus the parameters that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub sweep_kind: SweepKind,
    pub metadata: Metadata,
    columns: Vec<Column>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<ScalingFit>,
}

impl SweepTable {
    pub fn new(metadata: Metadata) -> Self {
        SweepTable { sweep_kind: metadata.config.kind(), metadata, columns: Vec::new(), fits: Vec::new() }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.values.len() != values.len() {
                return Err(Error::invalid(format!(
                    "column '{name}' has {} rows, table has {}",
                    values.len(),
                    first.values.len()
                )));
            }
        }
        if self.columns.iter().any(|c| c.name == name) {
            return Err(Error::invalid(format!("duplicate column '{name}'")));
        }
        self.columns.push(Column { name, values });
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    fn check_lengths(&self) -> Result<()> {
        let n = self.n_rows();
        if self.columns.iter().any(|c| c.values.len() != n) {
            return Err(Error::invalid("table columns differ in length"));
        }
        Ok(())
    }
}

/// `xi^2(t)` on a uniform grid of `n_samples` points over `[0, t_max]`.
pub fn run_time_curve(
    spec: &HamiltonianSpec,
    n_atoms: usize,
    axis: Axis,
    t_max: f64,
    n_samples: usize,
    step: &StepControl,
) -> Result<SweepTable> {
    spec.validate()?;
    check_atoms(n_atoms)?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    if !(t_max.is_finite() && t_max >= 0.0) || (n_samples > 1 && t_max == 0.0) {
        return Err(Error::invalid(format!("t_max = {t_max} must be positive when sampling more than one point")));
    }
    let initial = DickeState::coherent(n_atoms, axis)?;
    let times = uniform_times(t_max, n_samples);
    let traj = evolve(spec, &initial, &times, step)?;
    let records = squeezing_curve(&traj)?;

    let mut meta = Metadata::new(SweepConfig::TimeCurve { spec: *spec, n_atoms, axis, t_max, n_samples, step: *step });
    if spec.is_time_dependent() {
        meta.rwa = Some(rwa_validity(spec, n_atoms)?);
    }
    let mut table = SweepTable::new(meta);
    table.push_column("time", times)?;
    table.push_column("xi_squared", records.iter().map(|r| r.xi_squared).collect())?;
    Ok(table)
}

/// Optimal squeezing against atom number for each template, with a power-law fit per template.
pub fn run_n_scaling(
    templates: &[SpecTemplate],
    n_list: &[usize],
    axis: Axis,
    search: &OptimumSearch,
    step: &StepControl,
) -> Result<SweepTable> {
    if templates.is_empty() {
        return Err(Error::invalid("no Hamiltonians to scan"));
    }
    if n_list.iter().any(|&n| n < 4) {
        return Err(Error::invalid("every N in a scaling scan must be at least 4"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("N list must be strictly increasing"));
    }
    let jobs: Vec<(usize, usize)> =
        (0..templates.len()).flat_map(|ti| n_list.iter().map(move |&n| (ti, n))).collect();
    let results: Vec<Optimum> = jobs
        .par_iter()
        .map(|&(ti, n)| find_optimum(&templates[ti].resolve(n)?, n, axis, search, step))
        .collect::<Result<_>>()?;

    let mut table = SweepTable::new(Metadata::new(SweepConfig::NScaling {
        templates: templates.to_vec(),
        n_list: n_list.to_vec(),
        axis,
        search: *search,
        step: *step,
    }));
    table.push_column("n_atoms", n_list.iter().map(|&n| n as f64).collect())?;
    for (ti, template) in templates.iter().enumerate() {
        let chunk = &results[ti * n_list.len()..(ti + 1) * n_list.len()];
        let xi: Vec<f64> = chunk.iter().map(|o| o.record.xi_squared).collect();
        let label = template.label();
        table.push_column(format!("{label}_optimal_xi2"), xi.clone())?;
        table.push_column(format!("{label}_optimal_time"), chunk.iter().map(|o| o.record.time).collect())?;
        if n_list.len() >= MIN_FIT_POINTS {
            table.fits.push(fit_power_law(label, n_list, &xi)?);
        }
    }
    Ok(table)
}

/// Optimal squeezing of the full driven Hamiltonian against `g/omega` at fixed `omega`.
pub fn run_ratio_scan(
    chi: f64,
    n_atoms: usize,
    axis: Axis,
    ratios: &[f64],
    omega: f64,
    search: &OptimumSearch,
    step: &StepControl,
) -> Result<SweepTable> {
    check_atoms(n_atoms)?;
    if ratios.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::invalid("drive ratios must be finite and non-negative"));
    }
    let specs: Vec<HamiltonianSpec> = ratios
        .iter()
        .map(|&r| {
            let spec = HamiltonianSpec::FullDriven { chi, drive: DriveParams::from_ratio(r, omega)? };
            spec.validate()?;
            Ok(spec)
        })
        .collect::<Result<_>>()?;
    let results: Vec<Optimum> =
        specs.par_iter().map(|spec| find_optimum(spec, n_atoms, axis, search, step)).collect::<Result<_>>()?;

    // the two-axis Hamiltonian that a CSS along this axis squeezes best under
    let reference = match axis {
        Axis::Y => HamiltonianSpec::TatXz { chi },
        Axis::X => HamiltonianSpec::TatYz { chi },
    };
    let tat = find_optimum(&reference, n_atoms, axis, search, step)?;

    let mut meta = Metadata::new(SweepConfig::RatioScan {
        chi,
        n_atoms,
        axis,
        omega,
        ratios: ratios.to_vec(),
        search: *search,
        step: *step,
    });
    meta.rwa = Some(rwa_validity(&HamiltonianSpec::FullDriven { chi, drive: DriveParams::new(0.0, omega)? }, n_atoms)?);
    meta.tat_reference = Some(tat.record.xi_squared);
    let mut table = SweepTable::new(meta);
    table.push_column("ratio", ratios.to_vec())?;
    table.push_column("optimal_xi2", results.iter().map(|o| o.record.xi_squared).collect())?;
    table.push_column("optimal_time", results.iter().map(|o| o.record.time).collect())?;
    Ok(table)
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::invalid(format!("range '{text}' is not start:stop:step")));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{s}' in range '{text}'")));
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) || stop < start {
        return Err(Error::invalid(format!("range '{text}' needs start <= stop and a positive step")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
