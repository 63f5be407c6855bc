//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p spintwist-core --release --test acceptance`.

mod common;

use std::time::Instant;

use spintwist::evolve::{evolve, uniform_times, StepControl};
use spintwist::experiments::{find_optimum, run_n_scaling, OptimumSearch, SpecTemplate};
use spintwist::hamiltonians::{bessel_j0, build_hamiltonian, solve_drive_ratio, HamiltonianSpec};
use spintwist::spin::{casimir, max_abs_diff, Axis, Component, DickeState, SpinOperators};
use spintwist::squeezing::{squeezing_curve, xi_squared, SqueezingMeter};
use spintwist::{build_angular_momentum, expectation, Result};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { passed, detail: detail.into() })
}

fn rel_err(value: f64, target: f64) -> f64 {
    (value / target - 1.0).abs()
}

fn optimum(spec: HamiltonianSpec, n: usize, axis: Axis) -> Result<f64> {
    Ok(find_optimum(&spec, n, axis, &OptimumSearch::default(), &StepControl::default())?.record.xi_squared)
}

fn driven(ratio: f64, omega: f64) -> HamiltonianSpec {
    HamiltonianSpec::full_driven(1.0, ratio * omega, omega).unwrap()
}

fn xi_curve(spec: &HamiltonianSpec, n: usize, axis: Axis, times: &[f64], step: &StepControl) -> Result<Vec<f64>> {
    let traj = evolve(spec, &DickeState::coherent(n, axis)?, times, step)?;
    Ok(squeezing_curve(&traj)?.into_iter().map(|r| r.xi_squared).collect())
}

fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn css_baseline() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for n in [2, 10, 100] {
        for axis in [Axis::X, Axis::Y] {
            worst = worst.max((xi_squared(&DickeState::coherent(n, axis)?)?.xi_squared - 1.0).abs());
        }
    }
    verdict(worst < 1e-9, format!("max |xi2 - 1| = {worst:.2e} (tol 1e-9)"))
}

fn reference_value(spec: HamiltonianSpec, n: usize, axis: Axis, target: f64, tol: f64) -> Result<Verdict> {
    let v = optimum(spec, n, axis)?;
    verdict(rel_err(v, target) <= tol, format!("xi2_opt = {v:.5}, target {target} ± {:.0}%", tol * 100.0))
}

fn rwa_convergence() -> Result<Verdict> {
    let times = uniform_times(0.5, 401);
    let step = StepControl::default();
    let tat = xi_curve(&HamiltonianSpec::TatXz { chi: 1.0 }, 10, Axis::Y, &times, &step)?;
    let mut gaps = Vec::new();
    for omega in [50.0, 100.0, 300.0] {
        gaps.push(max_abs_gap(&xi_curve(&driven(0.906, omega), 10, Axis::Y, &times, &step)?, &tat));
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    verdict(
        decreasing && gaps[2] < 0.05,
        format!("max |dxi2| at omega = 50/100/300: {:.4}/{:.4}/{:.4} (need decreasing, last < 0.05)", gaps[0], gaps[1], gaps[2]),
    )
}

fn oscillation_period() -> Result<Verdict> {
    let times = uniform_times(0.5, 2001);
    let step = StepControl::default();
    let tat = xi_curve(&HamiltonianSpec::TatXz { chi: 1.0 }, 10, Axis::Y, &times, &step)?;
    let full = xi_curve(&driven(0.906, 50.0), 10, Axis::Y, &times, &step)?;
    let residual: Vec<f64> = full.iter().zip(&tat).map(|(a, b)| a - b).collect();
    let period = common::dominant_period(&times, &residual, 0.01, 0.25);
    verdict(rel_err(period, 0.06) <= 0.2, format!("dominant residual period {period:.4}/chi, target 0.06 ± 20%"))
}

fn scaling_exponents() -> Result<Verdict> {
    let templates = [
        SpecTemplate::from(HamiltonianSpec::TatXz { chi: 1.0 }),
        SpecTemplate::from(HamiltonianSpec::Oat { chi: 1.0 }),
        SpecTemplate::DrivenPerAtom { chi: 1.0, ratio: 0.906, omega_per_atom: 70.0 },
    ];
    let table = run_n_scaling(&templates, &[10, 20, 40, 80, 160], Axis::Y, &OptimumSearch::default(), &StepControl::default())?;
    let (tat, oat, full) = (&table.fits[0], &table.fits[1], &table.fits[2]);
    let ok = (tat.exponent + 1.0).abs() <= 0.1
        && (oat.exponent + 2.0 / 3.0).abs() <= 0.1
        && (full.exponent - tat.exponent).abs() <= 0.1;
    verdict(
        ok,
        format!(
            "slopes tat {:.3} (R2 {:.4}), oat {:.3} (R2 {:.4}), full {:.3} (R2 {:.4})",
            tat.exponent, tat.r_squared, oat.exponent, oat.r_squared, full.exponent, full.r_squared
        ),
    )
}

fn bessel_structure() -> Result<Verdict> {
    let third = solve_drive_ratio(1.0 / 3.0);
    let neg = solve_drive_ratio(-1.0 / 3.0);
    // golden-section minimum of J0 on (2*1.626, 2*2.221)
    let (mut a, mut b) = (2.0 * 1.626, 2.0 * 2.221);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if bessel_j0(c)? < bessel_j0(d)? { b = d } else { a = c }
    }
    let min = bessel_j0(0.5 * (a + b))?;
    let ok = !third.is_empty()
        && (third[0] - 0.906).abs() <= 1e-3
        && neg.len() == 2
        && (neg[0] - 1.626).abs() <= 2e-3
        && (neg[1] - 2.221).abs() <= 2e-3
        && (min + 0.4027).abs() <= 1e-3;
    verdict(ok, format!("A=1/3 -> {:.5}; A=-1/3 -> {:?}; min J0 = {min:.5}", third.first().copied().unwrap_or(f64::NAN), neg))
}

fn x_axis_reversal() -> Result<Verdict> {
    let tat = optimum(HamiltonianSpec::TatXz { chi: 1.0 }, 100, Axis::Y)?;
    let oat = optimum(HamiltonianSpec::Oat { chi: 1.0 }, 100, Axis::Y)?;
    let from_x = optimum(driven(1.4, 2000.0), 100, Axis::X)?;
    let from_y = optimum(driven(1.4, 2000.0), 100, Axis::Y)?;
    verdict(
        from_x <= 2.0 * tat && from_y > oat,
        format!("g/w=1.4: +x {from_x:.5} (<= 2 x TAT {tat:.5}), +y {from_y:.5} (> OAT {oat:.5})"),
    )
}

fn property_suite() -> Result<Verdict> {
    let mut failures = Vec::new();

    // commutators
    let mut comm: f64 = 0.0;
    for n in [1, 2, 5, 10, 25, 50] {
        let ops = SpinOperators::new(n)?;
        let i = num_complex::Complex64::new(0.0, 1.0);
        for (a, b, c) in [(ops.jx(), ops.jy(), ops.jz()), (ops.jy(), ops.jz(), ops.jx()), (ops.jz(), ops.jx(), ops.jy())] {
            comm = comm.max(max_abs_diff(&a.commutator(b)?, &(c.matrix() * i)));
        }
    }
    if comm >= 1e-10 {
        failures.push(format!("commutator {comm:.1e}"));
    }

    // Casimir and norm along both propagators
    let step = StepControl::default();
    let mut casimir_err: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for spec in [HamiltonianSpec::TatXz { chi: 1.0 }, driven(0.906, 300.0)] {
        let n = 10;
        let ops = SpinOperators::new(n)?;
        let traj = evolve(&spec, &DickeState::coherent(n, Axis::Y)?, &uniform_times(0.5, 101), &step)?;
        drift = drift.max(traj.max_norm_drift());
        let j2 = ops.jx().matrix().pow(2) + ops.jy().matrix().pow(2) + ops.jz().matrix().pow(2);
        let j2 = spintwist::CollectiveOperator::hamiltonian(n, j2)?;
        for s in traj.states() {
            casimir_err = casimir_err.max((expectation(&j2, s)? - casimir(n)).abs());
        }
    }
    if casimir_err >= 1e-7 {
        failures.push(format!("casimir {casimir_err:.1e}"));
    }
    if drift >= 1e-8 {
        failures.push(format!("norm drift {drift:.1e}"));
    }

    // rotation invariance and oracle equivalence on an OAT-squeezed state
    let psi = evolve(&HamiltonianSpec::Oat { chi: 1.0 }, &DickeState::coherent(20, Axis::Y)?, &[0.0, 0.12], &step)?.states()[1].clone();
    let base = xi_squared(&psi)?.xi_squared;
    let mut rot: f64 = 0.0;
    for (axis, th) in [([0.0, 0.0, 1.0], 0.7), ([1.0, 0.3, -0.2], 2.1), ([0.0, 1.0, 0.0], 1.3)] {
        rot = rot.max((xi_squared(&common::rotate(&psi, axis, th))?.xi_squared - base).abs());
    }
    if rot >= 1e-9 {
        failures.push(format!("rotation {rot:.1e}"));
    }
    let scan = common::xi_squared_scan(&psi, 10_000);
    if (scan - base).abs() >= 1e-6 {
        failures.push(format!("oracle {:.1e}", (scan - base).abs()));
    }

    // step-halving on the time-curve parameter sets
    let mut halving: f64 = 0.0;
    for (n, omega, t_max) in [(10, 50.0, 0.6), (10, 100.0, 0.6), (10, 300.0, 0.6), (100, 1000.0, 0.15), (100, 2000.0, 0.15), (100, 7000.0, 0.15)] {
        let times = uniform_times(t_max, 61);
        let coarse = xi_curve(&driven(0.906, omega), n, Axis::Y, &times, &step)?;
        let fine = xi_curve(&driven(0.906, omega), n, Axis::Y, &times, &step.refined())?;
        halving = halving.max(max_abs_gap(&coarse, &fine));
    }
    if halving >= 1e-6 {
        failures.push(format!("step halving {halving:.1e}"));
    }

    let jp = build_angular_momentum(30, Component::Jplus)?;
    let jm = build_angular_momentum(30, Component::Jminus)?;
    if jp.matrix() != &jm.matrix().adjoint() {
        failures.push("J+ != (J-)^dagger".into());
    }
    let _ = build_hamiltonian(&HamiltonianSpec::TatYz { chi: 1.0 }, 4, 0.0)?;
    let _ = SqueezingMeter::new(4)?;

    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("commutator {comm:.1e}, casimir {casimir_err:.1e}, drift {drift:.1e}, rotation {rot:.1e}, oracle {:.1e}, halving {halving:.1e}", (scan - base).abs())
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    type Check = fn() -> Result<Verdict>;
    let criteria: [(&str, Check); 11] = [
        ("css baseline", css_baseline),
        ("TAT optimum N=10", || reference_value(HamiltonianSpec::TatXz { chi: 1.0 }, 10, Axis::Y, 0.1381, 0.05)),
        ("TAT optimum N=100", || reference_value(HamiltonianSpec::TatXz { chi: 1.0 }, 100, Axis::Y, 0.0177, 0.05)),
        ("OAT optimum N=100", || reference_value(HamiltonianSpec::Oat { chi: 1.0 }, 100, Axis::Y, 0.0479, 0.05)),
        ("mixed regime g/w=0.4", || reference_value(driven(0.4, 2000.0), 100, Axis::Y, 0.02805, 0.10)),
        ("RWA convergence N=10", rwa_convergence),
        ("oscillation period w=50", oscillation_period),
        ("scaling exponents", scaling_exponents),
        ("Bessel structure", bessel_structure),
        ("x-axis initial state", x_axis_reversal),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check().unwrap_or_else(|e| Verdict { passed: false, detail: format!("error: {e}") });
        if !v.passed {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {} ({:.1}s)",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
