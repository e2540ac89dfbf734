//! Command-line front end.
//!
//! Verbs: `simulate`, `report`, `sweep` and `preset <name>`. Errors are printed
//! to stderr as one JSON object per line; exit codes are 0 on success, 1 on
//! I/O failure, 2 for usage or configuration errors, 3 for numerical
//! inconsistencies and 4 when a trajectory hit the overflow guard.

pub mod config;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use self::config::{Axis, ConfigLayer, Format, PrimaryColumn};
use self::output::{point_stem, regime_report, run_simulation, ReportDocument, RunOutcome, VERSION};
use self::presets::Preset;
use crate::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_TRUNCATED: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, kind: "usage", message: msg.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self { code: EXIT_IO, kind: "io", message: format!("{}: {err}", path.display()) }
    }

    pub fn to_json_line(&self) -> String {
        json!({ "error": self.kind, "code": self.code, "message": self.message }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Self { code: EXIT_USAGE, kind: "config", message: e.to_string() },
            Error::Degenerate(_) | Error::NumericalInconsistency(_) => {
                Self { code: EXIT_NUMERICAL, kind: "numerical", message: e.to_string() }
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "xxcouple", version, about = "Entanglement dynamics of two position-coupled oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one configuration and write a trajectory plus sidecar
    Simulate(RunArgs),
    /// Print the regime diagnostics of one configuration as JSON
    Report(RunArgs),
    /// Run one configuration per value of a parameter
    Sweep(SweepArgs),
    /// Run one of the built-in presets
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` file; command-line flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long, conflicts_with = "g_over_gc")]
    pub g: Option<f64>,
    #[arg(long)]
    pub g_over_gc: Option<f64>,
    #[arg(long)]
    pub eta1: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long)]
    pub nbar1: Option<f64>,
    #[arg(long)]
    pub nbar2: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Output file (simulate, report) or directory (sweep)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Append the 16 covariance entries to every row
    #[arg(long)]
    pub emit_sigma: bool,
    /// Also locate the entanglement death time (dissipative runs)
    #[arg(long)]
    pub death_time: bool,
}

impl RunArgs {
    fn layer(&self) -> Result<ConfigLayer, CliError> {
        let base = match &self.config {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            omega1: self.omega1,
            omega2: self.omega2,
            g: self.g,
            g_over_gc: self.g_over_gc,
            eta1: self.eta1,
            eta2: self.eta2,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            nbar1: self.nbar1,
            nbar2: self.nbar2,
            t_max: self.t_max,
            dt: self.dt,
            emit_sigma: self.emit_sigma.then_some(true),
            death_time: self.death_time.then_some(true),
            format: self.format,
            out: self.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
        };
        Ok(base.overlay(&flags))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated values
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<f64>,
    /// Concurrent runs; 0 picks one per core
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    #[arg(value_enum)]
    pub name: Preset,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub emit_sigma: bool,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

/// Parses `args` (including the program name) and runs the command, printing
/// diagnostics. Returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::usage(first).to_json_line());
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command) {
        Ok(outcomes) => {
            let mut stdout = std::io::stdout().lock();
            for o in &outcomes {
                let _ = writeln!(stdout, "{}", serde_json::to_string(o).expect("outcome serializes"));
                if o.truncated {
                    eprintln!("{}", json!({ "warning": "truncated", "file": o.data_file, "rows": o.rows }));
                }
            }
            if outcomes.iter().any(|o| o.truncated) {
                EXIT_TRUNCATED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            e.code
        }
    }
}

/// Runs a parsed command. `report` prints its document itself and returns no
/// outcomes.
pub fn execute(cmd: &Command) -> Result<Vec<RunOutcome>, CliError> {
    match cmd {
        Command::Simulate(args) => {
            let layer = args.layer()?;
            let cfg = layer.resolve(PrimaryColumn::LogNegativity)?;
            let out = layer
                .out
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(format!("trajectory.{}", cfg.format.extension())));
            Ok(vec![run_simulation(&cfg, &out, None)?])
        }
        Command::Report(args) => {
            let layer = args.layer()?;
            let cfg = layer.resolve(PrimaryColumn::LogNegativity)?;
            let doc = ReportDocument { version: VERSION, config: &cfg, report: regime_report(&cfg)? };
            let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
            match layer.out {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::io(Path::new(&p), e))?,
                None => print!("{text}"),
            }
            Ok(Vec::new())
        }
        Command::Sweep(args) => {
            let layer = args.run.layer()?;
            let dir = layer.out.clone().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            let plan = presets::PresetPlan {
                name: "sweep",
                base: layer,
                axis: args.axis,
                values: args.values.clone(),
                primary: PrimaryColumn::LogNegativity,
            };
            run_plan(&plan, &dir, None, args.workers)
        }
        Command::Preset(args) => {
            let mut plan = args.name.plan();
            plan.base.format = args.format;
            plan.base.emit_sigma = Some(args.emit_sigma);
            run_plan(&plan, &args.out, Some(plan.name), args.workers)
        }
    }
}

/// Resolves every point first so that a bad value fails before any file is
/// written, then runs the points concurrently. Outcomes keep the value order.
pub fn run_plan(
    plan: &presets::PresetPlan,
    dir: &Path,
    preset: Option<&str>,
    workers: usize,
) -> Result<Vec<RunOutcome>, CliError> {
    if plan.values.is_empty() {
        return Err(CliError::usage("sweep needs at least one value"));
    }
    let points = plan
        .values
        .iter()
        .map(|&v| {
            let cfg = plan.base.with_axis(plan.axis, v).resolve(plan.primary)?;
            let file = dir.join(format!("{}.{}", point_stem(plan.name, plan.axis.key(), v), cfg.format.extension()));
            Ok((cfg, file))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut seen = std::collections::BTreeSet::new();
    if !points.iter().all(|(_, f)| seen.insert(f.clone())) {
        return Err(CliError::usage("sweep values must be distinct"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| points.par_iter().map(|(cfg, file)| run_simulation(cfg, file, preset)).collect())
}
