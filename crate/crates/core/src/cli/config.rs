//! Run configuration: flat `key = value` files layered under command-line
//! flags, resolved and validated into a [`RunConfig`].

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use super::CliError;
use crate::dynamics::{uniform_grid, DissipationSpec};
use crate::model::{build_hamiltonian, HamiltonianMatrix, OscillatorPair};
use crate::states::{thermal_covariance, CovarianceMatrix, ThermalSpec};

pub const DEFAULT_T_MAX: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Observable placed in the second output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrimaryColumn {
    #[serde(rename = "E_N")]
    LogNegativity,
    #[serde(rename = "Delta")]
    Seralian,
}

/// Parameters that may be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Axis {
    G,
    GOverGc,
    Eta1,
    Eta2,
    Gamma1,
    Gamma2,
    Nbar1,
    Nbar2,
}

impl Axis {
    pub fn key(self) -> &'static str {
        match self {
            Axis::G => "g",
            Axis::GOverGc => "g_over_gc",
            Axis::Eta1 => "eta1",
            Axis::Eta2 => "eta2",
            Axis::Gamma1 => "gamma1",
            Axis::Gamma2 => "gamma2",
            Axis::Nbar1 => "nbar1",
            Axis::Nbar2 => "nbar2",
        }
    }
}

/// Partially specified configuration; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub g: Option<f64>,
    pub g_over_gc: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub nbar1: Option<f64>,
    pub nbar2: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub emit_sigma: Option<bool>,
    pub death_time: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<String>,
}

impl ConfigLayer {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut layer = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected `key = value`", n + 1)))?;
            layer
                .set(&key.trim().replace('-', "_"), value.trim())
                .map_err(|e| CliError::usage(format!("line {}: {}", n + 1, e.message)))?;
        }
        Ok(layer)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {}", path.display(), e.message)))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num =
            || value.parse::<f64>().map_err(|_| CliError::usage(format!("`{key}` expects a number, got `{value}`")));
        let flag = || match value {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(CliError::usage(format!("`{key}` expects true or false, got `{value}`"))),
        };
        match key {
            "omega1" => self.omega1 = Some(num()?),
            "omega2" => self.omega2 = Some(num()?),
            "g" => self.g = Some(num()?),
            "g_over_gc" => self.g_over_gc = Some(num()?),
            "eta1" => self.eta1 = Some(num()?),
            "eta2" => self.eta2 = Some(num()?),
            "gamma1" => self.gamma1 = Some(num()?),
            "gamma2" => self.gamma2 = Some(num()?),
            "nbar1" => self.nbar1 = Some(num()?),
            "nbar2" => self.nbar2 = Some(num()?),
            "t_max" => self.t_max = Some(num()?),
            "dt" => self.dt = Some(num()?),
            "emit_sigma" => self.emit_sigma = Some(flag()?),
            "death_time" => self.death_time = Some(flag()?),
            "format" => {
                self.format = Some(
                    Format::from_str(value, true)
                        .map_err(|_| CliError::usage(format!("`format` must be csv or json, got `{value}`")))?,
                )
            }
            "out" => self.out = Some(value.to_string()),
            _ => return Err(CliError::usage(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// `other` wins field by field. A coupling in `other`, in either form,
    /// replaces both coupling fields of `self`.
    pub fn overlay(mut self, other: &ConfigLayer) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        if other.g.is_some() || other.g_over_gc.is_some() {
            self.g = other.g;
            self.g_over_gc = other.g_over_gc;
        }
        take!(omega1, omega2, eta1, eta2, gamma1, gamma2, nbar1, nbar2, t_max, dt, emit_sigma, death_time, format, out);
        self
    }

    pub fn with_axis(&self, axis: Axis, value: f64) -> Self {
        let mut next = self.clone();
        match axis {
            Axis::G => {
                next.g = Some(value);
                next.g_over_gc = None;
            }
            Axis::GOverGc => {
                next.g_over_gc = Some(value);
                next.g = None;
            }
            Axis::Eta1 => next.eta1 = Some(value),
            Axis::Eta2 => next.eta2 = Some(value),
            Axis::Gamma1 => next.gamma1 = Some(value),
            Axis::Gamma2 => next.gamma2 = Some(value),
            Axis::Nbar1 => next.nbar1 = Some(value),
            Axis::Nbar2 => next.nbar2 = Some(value),
        }
        next
    }

    pub fn resolve(&self, primary: PrimaryColumn) -> Result<RunConfig, CliError> {
        let omega1 = self.omega1.unwrap_or(1.0);
        let omega2 = self.omega2.unwrap_or(1.0);
        let osc = match (self.g, self.g_over_gc) {
            (Some(_), Some(_)) => return Err(CliError::usage("g and g_over_gc are mutually exclusive")),
            (Some(g), None) => OscillatorPair::new(omega1, omega2, g)?,
            (None, Some(r)) => OscillatorPair::with_relative_coupling(omega1, omega2, r)?,
            (None, None) => return Err(CliError::usage("a coupling is required: set g or g_over_gc")),
        };
        let thermal = ThermalSpec::new(self.eta1.unwrap_or(0.0), self.eta2.unwrap_or(0.0))?;
        let dissipative = [self.gamma1, self.gamma2, self.nbar1, self.nbar2].iter().any(Option::is_some);
        let dissipation = if dissipative {
            let d = DissipationSpec::new(
                self.gamma1.unwrap_or(0.0),
                self.gamma2.unwrap_or(0.0),
                self.nbar1.unwrap_or(0.0),
                self.nbar2.unwrap_or(0.0),
            )?;
            Some(DissipationConfig { gamma1: d.gamma1, gamma2: d.gamma2, nbar1: d.nbar1, nbar2: d.nbar2 })
        } else {
            None
        };
        let t_max = self.t_max.unwrap_or(DEFAULT_T_MAX);
        let dt = self.dt.unwrap_or(crate::dynamics::DEFAULT_DT);
        if !(t_max > 0.0) || !(dt > 0.0) || dt > t_max {
            return Err(CliError::usage(format!("need 0 < dt <= t_max, got dt = {dt}, t_max = {t_max}")));
        }
        uniform_grid(t_max, dt)?;
        let death_time = self.death_time.unwrap_or(false);
        if death_time && dissipation.is_none() {
            return Err(CliError::usage("death_time needs a dissipative run (set gamma/nbar)"));
        }
        Ok(RunConfig {
            omega1,
            omega2,
            g: osc.g(),
            g_over_gc: osc.g() / osc.critical_coupling(),
            eta1: thermal.eta1,
            eta2: thermal.eta2,
            dissipation,
            t_max,
            dt,
            emit_sigma: self.emit_sigma.unwrap_or(false),
            find_death_time: death_time,
            format: self.format.unwrap_or(Format::Csv),
            primary,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipationConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nbar1: f64,
    pub nbar2: f64,
}

/// Fully resolved, validated run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub g: f64,
    pub g_over_gc: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub dissipation: Option<DissipationConfig>,
    pub t_max: f64,
    pub dt: f64,
    pub emit_sigma: bool,
    pub find_death_time: bool,
    pub format: Format,
    pub primary: PrimaryColumn,
}

impl RunConfig {
    pub fn oscillators(&self) -> OscillatorPair {
        OscillatorPair::new(self.omega1, self.omega2, self.g).expect("validated on resolve")
    }

    pub fn hamiltonian(&self) -> HamiltonianMatrix {
        build_hamiltonian(&self.oscillators())
    }

    pub fn initial_state(&self) -> CovarianceMatrix {
        thermal_covariance(&ThermalSpec::new(self.eta1, self.eta2).expect("validated on resolve"))
    }

    pub fn dissipation_spec(&self) -> Option<DissipationSpec> {
        self.dissipation
            .map(|d| DissipationSpec::new(d.gamma1, d.gamma2, d.nbar1, d.nbar2).expect("validated on resolve"))
    }
}
