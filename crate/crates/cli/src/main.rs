//! `tangle`: point evaluations, sweeps, figure presets and oracle checks.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tangle_core::amplitudes::compute_amplitudes;
use tangle_core::oracles::run_oracle_suite;
use tangle_core::sweep::{
    cutoff_sensitivity, figure_requests, linspace, run_figure, CutoffRow, Fixed, SweepParam,
};
use tangle_core::units::{from_dimensionless, DEFAULT_CUTOFF, REFERENCE_DIPOLE_RATIO};
use tangle_core::{
    evaluate_point, sweep, AmplitudeSet, DimensionlessPoint, Error, Execution, Figure,
    InitialState, ObservableSet, PhysicalConfig, PointObservables, QuadratureSpec,
};

use crate::config::{pick, OptionFile};

const EXIT_INVALID: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_ORACLE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "tangle",
    version,
    about = "Two-atom entanglement from finite-time photon exchange"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one configuration and print all observables as JSON.
    Point(PointArgs),
    /// Sweep one coordinate and write a CSV table.
    Sweep(SweepArgs),
    /// Regenerate one of the figure presets.
    Figure(FigureArgs),
    /// Run the brute-force oracle suite.
    OracleCheck(OracleArgs),
}

/// Options shared by `point` and `sweep`.
#[derive(Args, Debug, Default)]
struct Physics {
    /// Initial atomic state: eg, ee or gg.
    #[arg(long)]
    channel: Option<InitialState>,
    /// Form-factor cutoff in units of omega.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Panel budget of each adaptive integration.
    #[arg(long)]
    max_panels: Option<usize>,
    /// Transition frequency; sets the unit of T and L.
    #[arg(long)]
    omega: Option<f64>,
    /// Omega|d|/(ec).
    #[arg(long)]
    dipole_ratio: Option<f64>,
    /// one-photon or full.
    #[arg(long)]
    observables: Option<ObservableSet>,
    /// key=value option file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

const PHYSICS_KEYS: [&str; 7] = [
    "channel",
    "cutoff",
    "tol",
    "max-panels",
    "omega",
    "dipole-ratio",
    "observables",
];
const POINT_KEYS: [&str; 3] = ["x", "z", "omega-t"];
const SWEEP_KEYS: [&str; 8] = [
    "param", "from", "to", "steps", "fixed", "out", "plot", "serial",
];

/// Rejects option-file keys the subcommand does not know, so typos surface.
fn check_keys(file: &OptionFile, extra: &[&str]) -> Result<(), Error> {
    for key in file.keys() {
        if !PHYSICS_KEYS.contains(&key) && !extra.contains(&key) {
            return Err(Error::Parse(format!("unknown config key `{key}`")));
        }
    }
    Ok(())
}

struct Resolved {
    channel: InitialState,
    cutoff: f64,
    spec: QuadratureSpec,
    omega: f64,
    dipole_ratio: f64,
    observables: ObservableSet,
}

impl Physics {
    fn file(&self) -> Result<OptionFile, Error> {
        match &self.config {
            Some(p) => OptionFile::load(p),
            None => Ok(OptionFile::default()),
        }
    }

    fn resolve(
        &self,
        file: &OptionFile,
        default_observables: ObservableSet,
    ) -> Result<Resolved, Error> {
        let mut spec = QuadratureSpec::default();
        if let Some(tol) = pick(self.tol, file, "tol")? {
            spec = spec.with_relative_tolerance(tol);
        }
        if let Some(n) = pick(self.max_panels, file, "max-panels")? {
            spec.max_panels = n;
        }
        spec.validate()?;
        Ok(Resolved {
            channel: pick(self.channel, file, "channel")?.unwrap_or(InitialState::Eg),
            cutoff: pick(self.cutoff, file, "cutoff")?.unwrap_or(DEFAULT_CUTOFF),
            spec,
            omega: pick(self.omega, file, "omega")?.unwrap_or(1.0),
            dipole_ratio: pick(self.dipole_ratio, file, "dipole-ratio")?
                .unwrap_or(REFERENCE_DIPOLE_RATIO),
            observables: pick(self.observables, file, "observables")?
                .unwrap_or(default_observables),
        })
    }
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    omega_t: Option<f64>,
    /// Also evaluate at cutoffs 25, 50 and 100.
    #[arg(long)]
    cutoff_report: bool,
    #[command(flatten)]
    physics: Physics,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Swept coordinate: x, z, omega_t or L.
    #[arg(long)]
    param: Option<SweepParam>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    steps: Option<usize>,
    /// Held coordinate as key=value, e.g. z=10 or omega_t=8.
    #[arg(long)]
    fixed: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a gnuplot script next to the CSV.
    #[arg(long)]
    plot: bool,
    /// Evaluate grid points one after another.
    #[arg(long)]
    serial: bool,
    #[command(flatten)]
    physics: Physics,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// fig1, fig2, fig3 or fig4.
    figure: Figure,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Skip the gnuplot script.
    #[arg(long)]
    no_plot: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Print the machine-readable report instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PointOutput {
    config: PhysicalConfig,
    point: DimensionlessPoint,
    observables: PointObservables,
    amplitudes: AmplitudeSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff_sensitivity: Option<Vec<CutoffRow>>,
}

fn dimensionless_point(
    x: Option<f64>,
    z: Option<f64>,
    omega_t: Option<f64>,
) -> Result<DimensionlessPoint, Error> {
    match (x, z, omega_t) {
        (Some(x), Some(z), None) => DimensionlessPoint::from_x_z(x, z),
        (None, Some(z), Some(wt)) => DimensionlessPoint::from_z_omega_t(z, wt),
        (Some(x), None, Some(wt)) => DimensionlessPoint::from_z_omega_t(x * wt, wt),
        (Some(x), Some(z), Some(wt)) => {
            let p = DimensionlessPoint { x, z, omega_t: wt };
            if p.is_consistent() {
                Ok(p)
            } else {
                Err(Error::Inconsistent { z, product: x * wt })
            }
        }
        _ => Err(Error::Parse("give two of --x, --z and --omega-t".into())),
    }
}

fn run_point(args: &PointArgs) -> Result<(), Error> {
    let file = args.physics.file()?;
    check_keys(&file, &POINT_KEYS)?;
    let r = args.physics.resolve(&file, ObservableSet::Full)?;
    let point = dimensionless_point(
        pick(args.x, &file, "x")?,
        pick(args.z, &file, "z")?,
        pick(args.omega_t, &file, "omega-t")?,
    )?;
    let config = from_dimensionless(&point, r.omega, r.dipole_ratio, r.channel, r.cutoff)?;
    let observables = evaluate_point(&config, r.observables, &r.spec)?;
    let with_b = r.observables == ObservableSet::Full && r.channel == InitialState::Eg;
    let amplitudes = compute_amplitudes(&config, &r.spec, with_b)?.set;
    let cutoff_sensitivity = if args.cutoff_report {
        Some(cutoff_sensitivity(&config, r.observables, &r.spec)?)
    } else {
        None
    };
    let out = PointOutput {
        config,
        point,
        observables,
        amplitudes,
        cutoff_sensitivity,
    };
    let json = serde_json::to_string_pretty(&out).map_err(|e| Error::Io(e.to_string()))?;
    emit(&format!("{json}\n"))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Error> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn parse_fixed(raw: &str) -> Result<Fixed, Error> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("--fixed expects key=value, got `{raw}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("--fixed value `{value}` is not a number")))?;
    Fixed::parse(key.trim(), value)
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run_sweep(args: &SweepArgs) -> Result<(), Error> {
    let file = args.physics.file()?;
    check_keys(&file, &SWEEP_KEYS)?;
    let r = args.physics.resolve(&file, ObservableSet::OnePhoton)?;
    let require = |name: &str| Error::Parse(format!("sweep needs --{name}"));
    let param = pick(args.param, &file, "param")?.ok_or_else(|| require("param"))?;
    let from: f64 = pick(args.from, &file, "from")?.ok_or_else(|| require("from"))?;
    let to: f64 = pick(args.to, &file, "to")?.ok_or_else(|| require("to"))?;
    let steps: usize = pick(args.steps, &file, "steps")?.ok_or_else(|| require("steps"))?;
    if steps < 2 || to.partial_cmp(&from) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Parse(
            "sweep needs --to > --from and --steps >= 2".into(),
        ));
    }
    let fixed_raw = match &args.fixed {
        Some(f) => f.clone(),
        None => match file.all("fixed") {
            [] => return Err(require("fixed")),
            [one] => one.clone(),
            _ => return Err(Error::Parse("config gives `fixed` more than once".into())),
        },
    };
    let mut request = tangle_core::SweepRequest::new(
        param,
        linspace(from, to, steps),
        parse_fixed(&fixed_raw)?,
        r.channel,
    );
    request.cutoff = r.cutoff;
    request.spec = r.spec;
    request.omega = r.omega;
    request.dipole_ratio = r.dipole_ratio;
    request.observables = r.observables;
    let serial = args.serial || file.get::<bool>("serial")?.unwrap_or(false);
    let execution = if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let table = sweep(&request, execution)?;
    let out: Option<PathBuf> = match &args.out {
        Some(p) => Some(p.clone()),
        None => file.get::<PathBuf>("out")?,
    };
    match out {
        Some(path) => {
            write_file(&path, &table.to_csv())?;
            if args.plot || file.get::<bool>("plot")?.unwrap_or(false) {
                let script = table.gnuplot_script(&path.to_string_lossy());
                write_file(&path.with_extension("gp"), &script)?;
            }
        }
        None => emit(&table.to_csv())?,
    }
    Ok(())
}

fn run_figure_cmd(args: &FigureArgs) -> Result<(), Error> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let name = args.figure.as_str();
    let table = run_figure(&figure_requests(args.figure), name, Execution::Parallel)?;
    let csv = args.out.join(format!("{name}.csv"));
    write_file(&csv, &table.to_csv())?;
    if !args.no_plot {
        let script = table.gnuplot_script(&format!("{name}.csv"));
        write_file(&args.out.join(format!("{name}.gp")), &script)?;
    }
    eprintln!("wrote {} rows to {}", table.rows.len(), csv.display());
    Ok(())
}

/// Ok(true) when every oracle agrees.
fn run_oracles(args: &OracleArgs) -> Result<bool, Error> {
    let report = run_oracle_suite(&QuadratureSpec::default())?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    if let Some(path) = &args.json_out {
        write_file(path, &json)?;
    }
    if args.json {
        emit(&format!("{json}\n"))?;
    } else {
        emit(&report.to_text())?;
    }
    Ok(report.passed)
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::NonConvergence { .. } | Error::InvalidIntegrand { .. } => EXIT_NONCONVERGENCE,
        Error::Io(_) | Error::Eigen(_) | Error::Positivity { .. } => 1,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Point(a) => run_point(a).map(|_| true),
        Command::Sweep(a) => run_sweep(a).map(|_| true),
        Command::Figure(a) => run_figure_cmd(a).map(|_| true),
        Command::OracleCheck(a) => run_oracles(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ORACLE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
