use spintwist::experiments::{emit, load_json, render, SweepConfig};
use spintwist::{
    run_n_scaling, run_ratio_scan, run_time_curve, Axis, HamiltonianSpec, OptimumSearch, OutputFormat, SpecTemplate,
    StepControl, SweepTable,
};

fn quick_search() -> OptimumSearch {
    OptimumSearch { n_samples: 80, ..OptimumSearch::default() }
}

fn small_scaling() -> SweepTable {
    let templates: Vec<SpecTemplate> =
        vec![HamiltonianSpec::TatXz { chi: 1.0 }.into(), SpecTemplate::DrivenPerAtom { chi: 1.0, ratio: 0.906, omega_per_atom: 70.0 }];
    run_n_scaling(&templates, &[4, 6, 8, 10, 12], Axis::Y, &quick_search(), &StepControl::default()).unwrap()
}

#[test]
fn empty_table_renders_header_only() {
    let table = run_time_curve(&HamiltonianSpec::Oat { chi: 1.0 }, 4, Axis::Y, 0.1, 1, &StepControl::default()).unwrap();
    let mut empty = SweepTable::new(table.metadata.clone());
    empty.push_column("time", Vec::new()).unwrap();
    empty.push_column("xi_squared", Vec::new()).unwrap();
    assert_eq!(render(&empty, OutputFormat::Csv).unwrap(), "time,xi_squared\n");
}

#[test]
fn zero_length_curve_is_the_coherent_state() {
    let table = run_time_curve(&HamiltonianSpec::TatYz { chi: 1.0 }, 9, Axis::X, 0.0, 1, &StepControl::default()).unwrap();
    assert_eq!(table.column("time").unwrap(), [0.0]);
    assert!((table.column("xi_squared").unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn json_round_trip_reproduces_columns_exactly() {
    let table = small_scaling();
    assert_eq!(table.fits.len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    emit(&table, OutputFormat::Json, &path).unwrap();
    let back = load_json(&path).unwrap();
    assert_eq!(back, table);
    for (a, b) in back.columns().iter().zip(table.columns()) {
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn metadata_alone_regenerates_the_table() {
    let table = small_scaling();
    let rerun = table.metadata.config.run().unwrap();
    assert_eq!(render(&rerun, OutputFormat::Json).unwrap(), render(&table, OutputFormat::Json).unwrap());

    let ratio = run_ratio_scan(1.0, 10, Axis::Y, &[0.0, 0.5, 0.906], 700.0, &quick_search(), &StepControl::default()).unwrap();
    assert!(matches!(ratio.metadata.config, SweepConfig::RatioScan { .. }));
    assert_eq!(ratio.metadata.config.run().unwrap(), ratio);
}

#[test]
fn csv_minimum_matches_in_memory_minimum() {
    let table =
        run_time_curve(&HamiltonianSpec::TatXz { chi: 1.0 }, 10, Axis::Y, 0.6, 241, &StepControl::default()).unwrap();
    let in_memory = table.column("xi_squared").unwrap().iter().copied().fold(f64::INFINITY, f64::min);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    emit(&table, OutputFormat::Csv, &path).unwrap();

    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["time", "xi_squared"]);
    let from_file = reader
        .records()
        .map(|r| r.unwrap()[1].parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((from_file - in_memory).abs() <= 1e-11 * in_memory);
    assert!((in_memory - 0.1381).abs() < 0.05 * 0.1381);
}

#[test]
fn zero_ratio_reduces_to_one_axis_twisting() {
    let search = quick_search();
    let scan = run_ratio_scan(1.0, 20, Axis::Y, &[0.0], 1400.0, &search, &StepControl::default()).unwrap();
    let oat = spintwist::find_optimum(&HamiltonianSpec::Oat { chi: 1.0 }, 20, Axis::Y, &search, &StepControl::default())
        .unwrap();
    let driven = scan.column("optimal_xi2").unwrap()[0];
    assert!((driven - oat.record.xi_squared).abs() < 1e-6 * oat.record.xi_squared);
}

#[test]
fn missing_and_malformed_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_json(&dir.path().join("absent.json")).unwrap_err().is_io());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2").unwrap();
    assert!(load_json(&bad).unwrap_err().is_io());
    let table = small_scaling();
    assert!(emit(&table, OutputFormat::Csv, &dir.path().join("no/such/dir.csv")).unwrap_err().is_io());
}
