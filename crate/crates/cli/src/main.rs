//! `spintwist`: squeezing curves, scaling scans and drive-ratio scans from the command line.
//!
//! Exit status: 0 on success, 1 on invalid input or a failed computation, 2 on I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spintwist::experiments::{
    default_t_max, load_json, parse_range, render, run_n_scaling, run_ratio_scan, run_time_curve, OptimumSearch,
    OutputFormat, SpecTemplate, SweepTable, DEFAULT_OMEGA_PER_ATOM,
};
use spintwist::{solve_drive_ratio, Axis, Error, HamiltonianKind, HamiltonianSpec, IntegrationFrame, StepControl};

#[derive(Parser, Debug)]
#[command(name = "spintwist", version, about = "Squeezing of a collective spin under driven one-axis twisting")]
struct Cli {
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squeezing parameter against time for one Hamiltonian
    Evolve(EvolveArgs),
    /// Optimal squeezing against atom number, with power-law fits
    ScanN(ScanNArgs),
    /// Optimal squeezing of the driven Hamiltonian against g/omega
    ScanRatio(ScanRatioArgs),
    /// Drive ratios g/omega with J0(2 g/omega) = A
    SolveRatio(SolveRatioArgs),
    /// Regenerate a table from the metadata of a json output
    Rerun(RerunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Svg => OutputFormat::Svg,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FrameArg {
    Rotating,
    Lab,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Store the wall-clock time in the metadata (output is then no longer reproducible)
    #[arg(long)]
    record_timing: bool,
}

#[derive(Args, Debug)]
struct StepArgs {
    /// RK4 steps per drive period for driven Hamiltonians
    #[arg(long, default_value_t = StepControl::default().substeps_per_period)]
    substeps: usize,
    /// Largest ||H|| dt per RK4 step
    #[arg(long, default_value_t = StepControl::default().max_phase_per_step)]
    max_phase: f64,
    /// Frame the driven equation is stepped in
    #[arg(long, value_enum, default_value = "rotating")]
    frame: FrameArg,
}

impl StepArgs {
    fn control(&self) -> StepControl {
        let frame = match self.frame {
            FrameArg::Rotating => IntegrationFrame::DriveRotating,
            FrameArg::Lab => IntegrationFrame::Lab,
        };
        StepControl { substeps_per_period: self.substeps, max_phase_per_step: self.max_phase, frame }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Time samples per optimum search
    #[arg(long, default_value_t = OptimumSearch::default().n_samples)]
    samples: usize,
    /// Initial search window in units of 1/chi (default grows with N^(-2/3))
    #[arg(long)]
    tmax: Option<f64>,
}

impl SearchArgs {
    fn search(&self) -> OptimumSearch {
        OptimumSearch { n_samples: self.samples, t_max: self.tmax, ..OptimumSearch::default() }
    }
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long, value_parser = parse_kind)]
    hamiltonian: HamiltonianKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    /// Drive amplitude (full)
    #[arg(long, requires = "omega", conflicts_with = "a")]
    g: Option<f64>,
    /// Drive frequency (full)
    #[arg(long, requires = "g", conflicts_with = "a")]
    omega: Option<f64>,
    /// Bessel coefficient A (mixed)
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_enum, default_value = "y")]
    axis: AxisArg,
    /// End of the time grid in units of 1/chi (default grows with N^(-2/3))
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    step: StepArgs,
}

#[derive(Args, Debug)]
struct ScanNArgs {
    /// Comma-separated Hamiltonians: full, oat, tat-xz, tat-yz, mixed
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "tat-xz,oat,full")]
    hamiltonians: Vec<HamiltonianKind>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80,160")]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    /// Drive ratio g/omega (full)
    #[arg(long, default_value_t = 0.906)]
    ratio: f64,
    /// omega = omega_per_atom * N * chi at each point (full)
    #[arg(long, default_value_t = DEFAULT_OMEGA_PER_ATOM)]
    omega_per_atom: f64,
    /// Bessel coefficient A (mixed)
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_enum, default_value = "y")]
    axis: AxisArg,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    step: StepArgs,
}

#[derive(Args, Debug)]
struct ScanRatioArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    omega: f64,
    /// Grid of g/omega as start:stop:step
    #[arg(long)]
    ratios: String,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    #[arg(long, value_enum, default_value = "y")]
    axis: AxisArg,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    step: StepArgs,
}

#[derive(Args, Debug)]
struct SolveRatioArgs {
    #[arg(long, allow_hyphen_values = true)]
    target_a: f64,
}

#[derive(Args, Debug)]
struct RerunArgs {
    /// Json table written by an earlier run
    #[arg(long)]
    from: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_kind(s: &str) -> Result<HamiltonianKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fixed_spec(kind: HamiltonianKind, chi: f64, a: Option<f64>) -> Result<HamiltonianSpec, Error> {
    let spec = match kind {
        HamiltonianKind::Oat => HamiltonianSpec::Oat { chi },
        HamiltonianKind::TatXz => HamiltonianSpec::TatXz { chi },
        HamiltonianKind::TatYz => HamiltonianSpec::TatYz { chi },
        HamiltonianKind::Mixed => {
            let a = a.ok_or_else(|| Error::invalid("--a is required for the mixed Hamiltonian"))?;
            HamiltonianSpec::effective_mixed(chi, a)?
        }
        HamiltonianKind::Full => return Err(Error::invalid("the full Hamiltonian needs --g and --omega")),
    };
    spec.validate()?;
    Ok(spec)
}

fn write_table(mut table: SweepTable, output: &OutputArgs, started: Instant) -> Result<(), Error> {
    if output.record_timing {
        table.metadata.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    }
    let text = render(&table, output.format.into())?;
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e))?,
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))?,
    }
    for fit in &table.fits {
        eprintln!(
            "fit {}: xi2 ~ {:.4} N^{:.4} (R^2 = {:.4}, N in [{}, {}])",
            fit.label, fit.prefactor, fit.exponent, fit.r_squared, fit.n_range.0, fit.n_range.1
        );
    }
    if let Some(rwa) = &table.metadata.rwa {
        if !rwa.is_valid {
            eprintln!("warning: omega / (N chi) = {:.3} is below the rotating-wave threshold", rwa.ratio);
        }
    }
    if let Some(tat) = table.metadata.tat_reference {
        eprintln!("two-axis-twisting reference: xi2 = {tat:.6}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::invalid(e.to_string()))?;
    }
    let started = Instant::now();
    match cli.command {
        Command::Evolve(args) => {
            let spec = match (args.hamiltonian, args.g, args.omega) {
                (HamiltonianKind::Full, Some(g), Some(omega)) => HamiltonianSpec::full_driven(args.chi, g, omega)?,
                (kind, None, None) => fixed_spec(kind, args.chi, args.a)?,
                _ => return Err(Error::invalid("--g and --omega only apply to the full Hamiltonian")),
            };
            let t_max = args.tmax.unwrap_or_else(|| default_t_max(args.n, args.chi));
            let table = run_time_curve(&spec, args.n, args.axis.into(), t_max, args.samples, &args.step.control())?;
            write_table(table, &args.output, started)
        }
        Command::ScanN(args) => {
            let templates = args
                .hamiltonians
                .iter()
                .map(|&kind| match kind {
                    HamiltonianKind::Full => Ok(SpecTemplate::DrivenPerAtom {
                        chi: args.chi,
                        ratio: args.ratio,
                        omega_per_atom: args.omega_per_atom,
                    }),
                    kind => fixed_spec(kind, args.chi, args.a).map(SpecTemplate::from),
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let table =
                run_n_scaling(&templates, &args.n_list, args.axis.into(), &args.search.search(), &args.step.control())?;
            write_table(table, &args.output, started)
        }
        Command::ScanRatio(args) => {
            let ratios = parse_range(&args.ratios)?;
            let table = run_ratio_scan(
                args.chi,
                args.n,
                args.axis.into(),
                &ratios,
                args.omega,
                &args.search.search(),
                &args.step.control(),
            )?;
            write_table(table, &args.output, started)
        }
        Command::SolveRatio(args) => {
            let roots = solve_drive_ratio(args.target_a);
            if roots.is_empty() {
                eprintln!("no g/omega in (0, 3] gives J0(2 g/omega) = {}", args.target_a);
            }
            let mut out = std::io::stdout().lock();
            for r in roots {
                writeln!(out, "{r:.12}").map_err(|e| Error::io(Path::new("<stdout>"), e))?;
            }
            Ok(())
        }
        Command::Rerun(args) => {
            let previous = load_json(&args.from)?;
            let table = previous.metadata.config.run()?;
            write_table(table, &args.output, started)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
