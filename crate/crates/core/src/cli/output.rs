//! Trajectory files, JSON sidecars and the regime report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Format, PrimaryColumn, RunConfig};
use super::CliError;
use crate::dynamics::{
    death_time_with_step, drift_and_diffusion, drift_eigenvalues, entanglement_trajectory, Trajectory,
    TrajectoryOptions, TrajectoryRecord, DEFAULT_DEATH_TOL,
};
use crate::model::{
    classify_regime, diagonal_hamiltonian, diagonalizer_params, normal_mode_energies_sq, symplectic_frequencies,
    ModeHamiltonian, OnZeroCoupling, Regime,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergiesSq {
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticFrequencies {
    pub nu_plus: f64,
    pub nu_minus_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagonalizer {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub g_c: f64,
    pub regime: Regime,
    pub energies_sq: EnergiesSq,
    pub symplectic_frequencies: SymplecticFrequencies,
    pub diagonalizer: Diagonalizer,
    pub modes: [ModeHamiltonian; 2],
    /// `[re, im]` pairs, sorted by real then imaginary part, descending.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_eigenvalues: Option<Vec<[f64; 2]>>,
}

pub fn regime_report(cfg: &RunConfig) -> Result<RegimeReport, CliError> {
    let osc = cfg.oscillators();
    let h = cfg.hamiltonian();
    let (plus, minus) = normal_mode_energies_sq(&osc);
    let (nu_plus, nu_minus_sq) = symplectic_frequencies(&h);
    let params = diagonalizer_params(&osc, OnZeroCoupling::Identity)?;
    let (mode_plus, mode_minus) = diagonal_hamiltonian(&osc);
    let drift = cfg.dissipation_spec().map(|d| {
        let (a, _) = drift_and_diffusion(&h, &d);
        let mut eig: Vec<[f64; 2]> = drift_eigenvalues(&a).iter().map(|l| [l.re, l.im]).collect();
        eig.sort_by(|x, y| y[0].total_cmp(&x[0]).then(y[1].total_cmp(&x[1])));
        eig
    });
    Ok(RegimeReport {
        g_c: osc.critical_coupling(),
        regime: classify_regime(&osc),
        energies_sq: EnergiesSq { plus, minus },
        symplectic_frequencies: SymplecticFrequencies { nu_plus, nu_minus_sq },
        diagonalizer: Diagonalizer { a: params.a, b: params.b },
        modes: [mode_plus, mode_minus],
        drift_eigenvalues: drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub report: RegimeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sidecar<'a> {
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<&'a str>,
    pub data_file: String,
    pub config: &'a RunConfig,
    pub report: RegimeReport,
    pub rows: usize,
    pub truncated: bool,
    pub truncated_at: Option<f64>,
    /// Present only when requested; `null` when no death was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub death_time: Option<Option<f64>>,
}

/// Summary of one finished run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub data_file: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub death_time: Option<Option<f64>>,
}

pub fn header(primary: PrimaryColumn, emit_sigma: bool) -> Vec<String> {
    let lead = match primary {
        PrimaryColumn::LogNegativity => ["E_N", "Delta"],
        PrimaryColumn::Seralian => ["Delta", "E_N"],
    };
    let mut cols: Vec<String> = ["t", lead[0], lead[1], "nu_minus", "purity"].map(String::from).to_vec();
    if emit_sigma {
        for i in 1..=4 {
            for j in 1..=4 {
                cols.push(format!("s{i}{j}"));
            }
        }
    }
    cols
}

fn row(rec: &TrajectoryRecord, primary: PrimaryColumn) -> Vec<f64> {
    let lead = match primary {
        PrimaryColumn::LogNegativity => [rec.log_negativity, rec.seralian],
        PrimaryColumn::Seralian => [rec.seralian, rec.log_negativity],
    };
    let mut v = vec![rec.t, lead[0], lead[1], rec.nu_minus, rec.purity];
    if let Some(s) = &rec.sigma {
        v.extend_from_slice(s);
    }
    v
}

pub fn render_csv(traj: &Trajectory, cfg: &RunConfig) -> String {
    let mut out = header(cfg.primary, cfg.emit_sigma).join(",");
    out.push('\n');
    for rec in &traj.records {
        let cells: Vec<String> = row(rec, cfg.primary).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn render_json(traj: &Trajectory, cfg: &RunConfig) -> String {
    let table = JsonTable {
        columns: header(cfg.primary, cfg.emit_sigma),
        rows: traj.records.iter().map(|r| row(r, cfg.primary)).collect(),
    };
    let mut s = serde_json::to_string(&table).expect("finite table");
    s.push('\n');
    s
}

/// `run.csv` -> `run.meta.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("meta.json")
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Integrates one configuration and writes its data file and sidecar.
pub fn run_simulation(cfg: &RunConfig, data_file: &Path, preset: Option<&str>) -> Result<RunOutcome, CliError> {
    let h = cfg.hamiltonian();
    let sigma0 = cfg.initial_state();
    let d = cfg.dissipation_spec();
    let grid = crate::dynamics::uniform_grid(cfg.t_max, cfg.dt)?;
    let opts = TrajectoryOptions { keep_sigma: cfg.emit_sigma, ..Default::default() };
    let traj = entanglement_trajectory(&sigma0, &h, d.as_ref(), &grid, opts)?;
    let death_time = match (&d, cfg.find_death_time) {
        (Some(d), true) => Some(death_time_with_step(&sigma0, &h, d, cfg.t_max, DEFAULT_DEATH_TOL, cfg.dt)?),
        _ => None,
    };
    let body = match cfg.format {
        Format::Csv => render_csv(&traj, cfg),
        Format::Json => render_json(&traj, cfg),
    };
    write(data_file, &body)?;
    let file_name = data_file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let sidecar = Sidecar {
        version: VERSION,
        preset,
        data_file: file_name,
        config: cfg,
        report: regime_report(cfg)?,
        rows: traj.records.len(),
        truncated: traj.truncated_at.is_some(),
        truncated_at: traj.truncated_at,
        death_time,
    };
    let meta = sidecar_path(data_file);
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    write(&meta, &json)?;
    Ok(RunOutcome {
        data_file: data_file.to_path_buf(),
        sidecar: meta,
        rows: traj.records.len(),
        truncated: traj.truncated_at.is_some(),
        death_time,
    })
}

/// Deterministic file stem for one sweep point, e.g. `fig2a_g_over_gc_0.5`.
pub fn point_stem(prefix: &str, axis: &str, value: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{prefix}_{axis}_{value:?}");
    s
}
