//! Scenario configuration documents.
//!
//! A config is a TOML document with flat keys and one optional `[sweep]`
//! table. Dimensional values are strings carrying a unit:
//!
//! ```toml
//! scenario = "thermalize"
//! omega_q = "5.448 GHz"
//! drive = "2 MHz"
//! t_bath = "20 mK"
//! t1 = "5.2 us"
//! fock_dim = 15
//! outputs = ["csv", "json"]
//!
//! [sweep]
//! omega_d_min = "5.43 GHz"
//! omega_d_max = "5.47 GHz"
//! omega_d_points = 81
//! drive = "5.8 MHz"
//! ```
//!
//! Unknown keys are rejected. Missing keys take the scenario defaults.

use std::fmt;
use std::path::PathBuf;

use serde_json::{json, Value};
use toml::Table;

use super::units::{format_quantity, parse_quantity, Quantity};
use crate::model::{ghz, mhz, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Rabi,
    Thermalize,
    PowerSeries,
    Sweep,
    ChannelCompare,
    Fit,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Rabi,
        Scenario::Thermalize,
        Scenario::PowerSeries,
        Scenario::Sweep,
        Scenario::ChannelCompare,
        Scenario::Fit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Rabi => "rabi",
            Scenario::Thermalize => "thermalize",
            Scenario::PowerSeries => "power_series",
            Scenario::Sweep => "sweep",
            Scenario::ChannelCompare => "channel_compare",
            Scenario::Fit => "fit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Full,
    Channel,
    Both,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Full => "full",
            Engine::Channel => "channel",
            Engine::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(Engine::Full),
            "channel" => Some(Engine::Channel),
            "both" => Some(Engine::Both),
            _ => None,
        }
    }

    pub fn full(self) -> bool {
        matches!(self, Engine::Full | Engine::Both)
    }

    pub fn channel(self) -> bool {
        matches!(self, Engine::Channel | Engine::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            "svg" => Some(OutputFormat::Svg),
            _ => None,
        }
    }

    /// Comma-separated list such as "csv,json".
    pub fn parse_list(s: &str) -> Option<Vec<Self>> {
        let mut out: Vec<Self> = s.split(',').map(|x| Self::parse(x.trim())).collect::<Option<_>>()?;
        out.sort();
        out.dedup();
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range { lo: f64, hi: f64, n: usize },
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(x) => vec![x],
            Axis::Range { lo, hi, n } => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub omega_d: Axis,
    pub drive: Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FitParam {
    Eta,
    Omega,
    T1,
    GammaR,
}

impl FitParam {
    pub fn name(self) -> &'static str {
        match self {
            FitParam::Eta => "eta",
            FitParam::Omega => "Omega",
            FitParam::T1 => "t1",
            FitParam::GammaR => "gamma_r",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eta" => Some(FitParam::Eta),
            "Omega" | "omega" | "drive" => Some(FitParam::Omega),
            "t1" => Some(FitParam::T1),
            "gamma_r" => Some(FitParam::GammaR),
            _ => None,
        }
    }

    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            FitParam::Eta => p.eta,
            FitParam::Omega => p.drive,
            FitParam::T1 => p.t1,
            FitParam::GammaR => p.gamma_r,
        }
    }

    pub fn set(self, p: &mut SystemParams, v: f64) {
        match self {
            FitParam::Eta => p.eta = v,
            FitParam::Omega => p.drive = v,
            FitParam::T1 => p.t1 = v,
            FitParam::GammaR => p.gamma_r = v,
        }
    }

    pub fn quantity(self) -> Quantity {
        match self {
            FitParam::T1 => Quantity::Time,
            _ => Quantity::Frequency,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitSpec {
    pub free: Vec<FitParam>,
    /// CSV of `t_us,p_e` samples to fit.
    pub data: Option<PathBuf>,
    /// Fit the steady population to this value instead of a trace.
    pub target_pe: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: SystemParams,
    pub t_max: f64,
    pub samples: usize,
    pub tol: f64,
    pub engine: Engine,
    pub outputs: Vec<OutputFormat>,
    /// Qubit frequency used for effective temperatures.
    pub omega_q_ref: f64,
    /// Drive strengths of the power series.
    pub drive_series: Vec<f64>,
    /// First nonzero sample of logarithmic grids.
    pub t_min_log: f64,
    pub sweep: SweepSpec,
    pub fit: FitSpec,
}

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let params = match scenario {
            Scenario::Rabi => SystemParams::rabi_defaults(),
            _ => SystemParams::thermalization_defaults(),
        };
        let (t_max, samples) = match scenario {
            Scenario::Rabi => (1.0, 1001),
            Scenario::PowerSeries => (100.0, 241),
            _ => (5.0, 501),
        };
        Self {
            scenario,
            omega_q_ref: params.omega_q,
            params,
            t_max,
            samples,
            tol: 1e-10,
            engine: Engine::Full,
            outputs: vec![OutputFormat::Csv, OutputFormat::Json],
            drive_series: [1.5, 2.0, 3.5, 5.0].map(mhz).to_vec(),
            t_min_log: 1e-3,
            sweep: SweepSpec {
                omega_d: Axis::Range { lo: ghz(5.43), hi: ghz(5.47), n: 81 },
                drive: Axis::Fixed(mhz(5.8)),
            },
            fit: FitSpec { free: vec![FitParam::Eta], data: None, target_pe: None },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(|e| ConfigError::new(param_key(&e.to_string()), e.to_string()))?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(ConfigError::new("t_max", "must be positive"));
        }
        if self.samples < 2 {
            return Err(ConfigError::new("samples", "must be at least 2"));
        }
        if !(1e-12..=1e-4).contains(&self.tol) {
            return Err(ConfigError::new("tol", "must lie in [1e-12, 1e-4]"));
        }
        if !(self.omega_q_ref > 0.0) {
            return Err(ConfigError::new("omega_q_ref", "must be positive"));
        }
        if self.drive_series.is_empty() || self.drive_series.iter().any(|&w| !(w >= 0.0)) {
            return Err(ConfigError::new("drive_series", "needs at least one non-negative drive"));
        }
        if !(self.t_min_log > 0.0 && self.t_min_log < self.t_max) {
            return Err(ConfigError::new("t_min_log", "must be positive and below t_max"));
        }
        for (key, axis) in [("sweep.omega_d", &self.sweep.omega_d), ("sweep.drive", &self.sweep.drive)] {
            match *axis {
                Axis::Range { lo, hi, n } => {
                    if n < 2 || !(lo < hi) || lo < 0.0 {
                        return Err(ConfigError::new(key, "range needs lo < hi, lo >= 0 and at least 2 points"));
                    }
                }
                Axis::Fixed(x) if !(x >= 0.0) => return Err(ConfigError::new(key, "must be non-negative")),
                Axis::Fixed(_) => {}
            }
        }
        if self.sweep.omega_d.points().iter().any(|&w| w <= 0.0) {
            return Err(ConfigError::new("sweep.omega_d", "must be positive"));
        }
        if let Some(t) = self.fit.target_pe {
            if !(0.0..0.5).contains(&t) {
                return Err(ConfigError::new("fit_target_pe", "must lie in [0, 0.5)"));
            }
        }
        Ok(())
    }

    /// Echo of every setting with units, for run summaries.
    pub fn echo(&self) -> Value {
        let p = &self.params;
        let f = |x: f64| format_quantity(x, Quantity::Frequency);
        let t = |x: f64| format_quantity(x, Quantity::Time);
        let axis = |a: &Axis| match *a {
            Axis::Fixed(x) => json!(f(x)),
            Axis::Range { lo, hi, n } => json!({ "min": f(lo), "max": f(hi), "points": n }),
        };
        json!({
            "scenario": self.scenario.name(),
            "omega_q": f(p.omega_q),
            "omega_r": f(p.omega_r),
            "omega_d": f(p.omega_d),
            "eta": f(p.eta),
            "drive": f(p.drive),
            "gamma_r": f(p.gamma_r),
            "t1": t(p.t1),
            "t_bath": format_quantity(p.t_bath, Quantity::Temperature),
            "fock_dim": p.fock_dim,
            "qubit_thermal": p.qubit_thermal,
            "dephasing": f(p.dephasing),
            "hbar_over_kb": p.hbar_over_kb,
            "t_max": t(self.t_max),
            "samples": self.samples,
            "tol": self.tol,
            "engine": self.engine.name(),
            "outputs": self.outputs.iter().map(|o| o.name()).collect::<Vec<_>>(),
            "omega_q_ref": f(self.omega_q_ref),
            "drive_series": self.drive_series.iter().map(|&x| f(x)).collect::<Vec<_>>(),
            "t_min_log": t(self.t_min_log),
            "sweep": { "omega_d": axis(&self.sweep.omega_d), "drive": axis(&self.sweep.drive) },
            "fit": {
                "free": self.fit.free.iter().map(|x| x.name()).collect::<Vec<_>>(),
                "data": self.fit.data.as_ref().map(|d| d.display().to_string()),
                "target_pe": self.fit.target_pe,
            },
        })
    }
}

fn param_key(message: &str) -> String {
    message
        .split_whitespace()
        .find_map(|w| {
            let w = w.trim_start_matches("error:");
            [
                "omega_q",
                "omega_r",
                "omega_d",
                "eta",
                "drive",
                "gamma_r",
                "t1",
                "t_bath",
                "fock_dim",
                "dephasing",
                "hbar_over_kb",
            ]
            .into_iter()
            .find(|k| *k == w)
        })
        .unwrap_or("params")
        .to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parses a config document that names its scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config_for(text, None)
}

/// Parses a config document. `scenario` supplies the scenario when the
/// document omits it and must agree with it otherwise.
pub fn parse_config_for(text: &str, scenario: Option<Scenario>) -> Result<ScenarioConfig, ConfigError> {
    let table: Table =
        text.parse().map_err(|e: toml::de::Error| ConfigError::new("document", e.message().to_string()))?;
    let named = match table.get("scenario") {
        Some(v) => {
            let s = v.as_str().ok_or_else(|| ConfigError::new("scenario", "must be a string"))?;
            Some(Scenario::parse(s).ok_or_else(|| ConfigError::new("scenario", format!("unknown scenario \"{s}\"")))?)
        }
        None => None,
    };
    let scenario = match (named, scenario) {
        (Some(a), Some(b)) if a != b => {
            return Err(ConfigError::new("scenario", format!("document selects {a} but {b} was requested")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(ConfigError::new("scenario", "missing")),
    };

    let mut c = ScenarioConfig::defaults(scenario);
    let mut omega_q_ref_set = false;
    for (key, value) in &table {
        let k = key.as_str();
        match k {
            "scenario" => {}
            "omega_q" => c.params.omega_q = quantity(k, value, Quantity::Frequency)?,
            "omega_r" => c.params.omega_r = quantity(k, value, Quantity::Frequency)?,
            "omega_d" => c.params.omega_d = quantity(k, value, Quantity::Frequency)?,
            "eta" => c.params.eta = quantity(k, value, Quantity::Frequency)?,
            "drive" => c.params.drive = quantity(k, value, Quantity::Frequency)?,
            "gamma_r" => c.params.gamma_r = quantity(k, value, Quantity::Frequency)?,
            "dephasing" => c.params.dephasing = quantity(k, value, Quantity::Frequency)?,
            "t1" => c.params.t1 = quantity(k, value, Quantity::Time)?,
            "t_bath" => c.params.t_bath = quantity(k, value, Quantity::Temperature)?,
            "fock_dim" => c.params.fock_dim = count(k, value)?,
            "qubit_thermal" => {
                c.params.qubit_thermal = value.as_bool().ok_or_else(|| ConfigError::new(k, "must be true or false"))?
            }
            "hbar_over_kb" => c.params.hbar_over_kb = number(k, value)?,
            "t_max" => c.t_max = quantity(k, value, Quantity::Time)?,
            "t_min_log" => c.t_min_log = quantity(k, value, Quantity::Time)?,
            "samples" => c.samples = count(k, value)?,
            "tol" => c.tol = number(k, value)?,
            "engine" => {
                let s = value.as_str().ok_or_else(|| ConfigError::new(k, "must be a string"))?;
                c.engine = Engine::parse(s).ok_or_else(|| ConfigError::new(k, format!("unknown engine \"{s}\"")))?;
            }
            "outputs" => {
                let items = value.as_array().ok_or_else(|| ConfigError::new(k, "must be a list of strings"))?;
                let mut outs = items
                    .iter()
                    .map(|v| v.as_str().and_then(OutputFormat::parse))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| ConfigError::new(k, "entries must be \"csv\", \"json\" or \"svg\""))?;
                outs.sort();
                outs.dedup();
                c.outputs = outs;
            }
            "omega_q_ref" => {
                c.omega_q_ref = quantity(k, value, Quantity::Frequency)?;
                omega_q_ref_set = true;
            }
            "drive_series" => {
                let items = value.as_array().ok_or_else(|| ConfigError::new(k, "must be a list of frequencies"))?;
                c.drive_series = items.iter().map(|v| quantity(k, v, Quantity::Frequency)).collect::<Result<_, _>>()?;
            }
            "fit_free" => {
                let items = value.as_array().ok_or_else(|| ConfigError::new(k, "must be a list of parameter names"))?;
                let mut free = items
                    .iter()
                    .map(|v| v.as_str().and_then(FitParam::parse))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| ConfigError::new(k, "entries must be eta, Omega, t1 or gamma_r"))?;
                free.sort();
                free.dedup();
                c.fit.free = free;
            }
            "fit_data" => {
                c.fit.data =
                    Some(PathBuf::from(value.as_str().ok_or_else(|| ConfigError::new(k, "must be a path string"))?));
            }
            "fit_target_pe" => c.fit.target_pe = Some(number(k, value)?),
            "sweep" => parse_sweep(value, &mut c.sweep)?,
            _ => return Err(ConfigError::new(k, "unknown key")),
        }
    }
    if !omega_q_ref_set {
        c.omega_q_ref = c.params.omega_q;
    }
    c.validate()?;
    Ok(c)
}

/// Sets one `SystemParams` field from its config key and a value written
/// as in a config document without quotes ("5.2 us", "15", "true").
pub fn set_param(p: &mut SystemParams, key: &str, text: &str) -> Result<(), ConfigError> {
    let q = |quantity| parse_quantity(text, quantity).map_err(|m| ConfigError::new(key, m));
    match key {
        "omega_q" => p.omega_q = q(Quantity::Frequency)?,
        "omega_r" => p.omega_r = q(Quantity::Frequency)?,
        "omega_d" => p.omega_d = q(Quantity::Frequency)?,
        "eta" => p.eta = q(Quantity::Frequency)?,
        "drive" => p.drive = q(Quantity::Frequency)?,
        "gamma_r" => p.gamma_r = q(Quantity::Frequency)?,
        "dephasing" => p.dephasing = q(Quantity::Frequency)?,
        "t1" => p.t1 = q(Quantity::Time)?,
        "t_bath" => p.t_bath = q(Quantity::Temperature)?,
        "fock_dim" => {
            p.fock_dim = text.trim().parse().map_err(|_| ConfigError::new(key, "must be a non-negative integer"))?
        }
        "qubit_thermal" => {
            p.qubit_thermal = text.trim().parse().map_err(|_| ConfigError::new(key, "must be true or false"))?
        }
        "hbar_over_kb" => {
            p.hbar_over_kb = text.trim().parse().map_err(|_| ConfigError::new(key, "must be a number"))?
        }
        _ => return Err(ConfigError::new(key, "unknown key")),
    }
    p.validate().map_err(|e| ConfigError::new(param_key(&e.to_string()), e.to_string()))
}

/// The model parameters of a config document; a document without a
/// `scenario` key is read as a thermalize config.
pub fn parse_params(text: &str) -> Result<SystemParams, ConfigError> {
    let named = text.parse::<Table>().map(|t| t.contains_key("scenario")).unwrap_or(true);
    let c = if named { parse_config(text)? } else { parse_config_for(text, Some(Scenario::Thermalize))? };
    Ok(c.params)
}

fn parse_sweep(value: &toml::Value, spec: &mut SweepSpec) -> Result<(), ConfigError> {
    let t = value.as_table().ok_or_else(|| ConfigError::new("sweep", "must be a table"))?;
    let mut w = (None, None, None);
    let mut d = (None, None, None);
    let mut fixed = None;
    for (key, v) in t {
        let full = format!("sweep.{key}");
        match key.as_str() {
            "omega_d_min" => w.0 = Some(quantity(&full, v, Quantity::Frequency)?),
            "omega_d_max" => w.1 = Some(quantity(&full, v, Quantity::Frequency)?),
            "omega_d_points" => w.2 = Some(count(&full, v)?),
            "drive" => fixed = Some(quantity(&full, v, Quantity::Frequency)?),
            "drive_min" => d.0 = Some(quantity(&full, v, Quantity::Frequency)?),
            "drive_max" => d.1 = Some(quantity(&full, v, Quantity::Frequency)?),
            "drive_points" => d.2 = Some(count(&full, v)?),
            _ => return Err(ConfigError::new(full, "unknown key")),
        }
    }
    if let Axis::Range { lo, hi, n } = spec.omega_d {
        spec.omega_d = Axis::Range { lo: w.0.unwrap_or(lo), hi: w.1.unwrap_or(hi), n: w.2.unwrap_or(n) };
    }
    match (fixed, d) {
        (Some(_), (Some(_), _, _) | (_, Some(_), _) | (_, _, Some(_))) => {
            return Err(ConfigError::new("sweep.drive", "give either a fixed drive or a drive range, not both"));
        }
        (Some(x), _) => spec.drive = Axis::Fixed(x),
        (None, (Some(lo), Some(hi), Some(n))) => spec.drive = Axis::Range { lo, hi, n },
        (None, (None, None, None)) => {}
        (None, _) => {
            return Err(ConfigError::new(
                "sweep.drive_min",
                "a drive range needs drive_min, drive_max and drive_points",
            ))
        }
    }
    Ok(())
}

fn quantity(key: &str, v: &toml::Value, q: Quantity) -> Result<f64, ConfigError> {
    let s = v.as_str().ok_or_else(|| ConfigError::new(key, "must be a string with a unit, e.g. \"5.2 us\""))?;
    parse_quantity(s, q).map_err(|m| ConfigError::new(key, m))
}

fn number(key: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::new(key, "must be a number")),
    }
}

fn count(key: &str, v: &toml::Value) -> Result<usize, ConfigError> {
    match v.as_integer() {
        Some(i) if i >= 0 => Ok(i as usize),
        _ => Err(ConfigError::new(key, "must be a non-negative integer")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_thermalize_document() {
        let c = parse_config("scenario = \"thermalize\"\n").unwrap();
        let p = &c.params;
        assert_eq!(p.omega_q, ghz(5.448));
        assert_eq!(p.omega_r, ghz(5.445));
        assert_eq!(p.omega_d, ghz(5.45));
        assert_eq!(p.drive, mhz(2.0));
        assert_eq!(p.gamma_r, mhz(1.2));
        assert_eq!(p.t1, 5.2);
        assert_eq!(p.t_bath, 0.02);
        assert_eq!(p.fock_dim, 15);
        assert_eq!(c.engine, Engine::Full);
    }

    #[test]
    fn frequency_units_interchangeable() {
        let a = parse_config("scenario = \"thermalize\"\nomega_q = \"5448 MHz\"\n").unwrap();
        let b = parse_config("scenario = \"thermalize\"\nomega_q = \"5.448 GHz\"\n").unwrap();
        assert!((a.params.omega_q - b.params.omega_q).abs() <= 1e-12 * a.params.omega_q);
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_config("scenario = \"thermalize\"\nt1 = \"-5.2 us\"\n").unwrap_err();
        assert_eq!(e.key, "t1");
        let e = parse_config("scenario = \"thermalize\"\ncolour = \"blue\"\n").unwrap_err();
        assert_eq!(e.key, "colour");
        let e = parse_config("scenario = \"thermalize\"\nt1 = \"5.2 GHz\"\n").unwrap_err();
        assert_eq!(e.key, "t1");
        let e = parse_config("scenario = \"sweep\"\n[sweep]\nomega_d_points = 1\n").unwrap_err();
        assert_eq!(e.key, "sweep.omega_d");
        assert_eq!(parse_config("t1 = \"5 us\"").unwrap_err().key, "scenario");
        assert_eq!(parse_config("scenario = \"thermalize\"\nsamples = 1\n").unwrap_err().key, "samples");
    }

    #[test]
    fn scenario_agreement() {
        assert!(parse_config_for("", Some(Scenario::Rabi)).is_ok());
        assert!(parse_config_for("scenario = \"sweep\"", Some(Scenario::Rabi)).is_err());
        let c = parse_config_for("", Some(Scenario::Rabi)).unwrap();
        assert_eq!(c.params.omega_d, ghz(5.46));
        assert_eq!(c.params.drive, mhz(5.2));
        assert_eq!(c.t_max, 1.0);
    }

    #[test]
    fn single_parameter_updates() {
        let mut p = SystemParams::thermalization_defaults();
        set_param(&mut p, "eta", "2.5 MHz").unwrap();
        assert_eq!(p.eta, mhz(2.5));
        set_param(&mut p, "fock_dim", "20").unwrap();
        assert_eq!(p.fock_dim, 20);
        assert_eq!(set_param(&mut p, "t1", "-3 us").unwrap_err().key, "t1");
        assert_eq!(set_param(&mut p, "nope", "1").unwrap_err().key, "nope");
        assert_eq!(parse_params("drive = \"3 MHz\"").unwrap().drive, mhz(3.0));
        assert_eq!(parse_params("scenario = \"rabi\"").unwrap().omega_d, ghz(5.46));
    }

    #[test]
    fn sweep_table() {
        let c = parse_config(
            "scenario = \"sweep\"\n[sweep]\nomega_d_min = \"5.44 GHz\"\nomega_d_max = \"5.45 GHz\"\nomega_d_points = 3\ndrive_min = \"1 MHz\"\ndrive_max = \"2 MHz\"\ndrive_points = 2\n",
        )
        .unwrap();
        assert_eq!(c.sweep.omega_d.points().len(), 3);
        assert_eq!(c.sweep.drive.points(), vec![mhz(1.0), mhz(2.0)]);
        assert!(parse_config("scenario = \"sweep\"\n[sweep]\ndrive = \"1 MHz\"\ndrive_points = 3\n").is_err());
    }

    #[test]
    fn echo_is_reparseable_for_params() {
        let c = ScenarioConfig::defaults(Scenario::Thermalize);
        let e = c.echo();
        let doc = format!(
            "scenario = \"thermalize\"\nomega_q = \"{}\"\nt1 = \"{}\"\nt_bath = \"{}\"\n",
            e["omega_q"].as_str().unwrap(),
            e["t1"].as_str().unwrap(),
            e["t_bath"].as_str().unwrap()
        );
        let back = parse_config(&doc).unwrap();
        assert!((back.params.omega_q - c.params.omega_q).abs() <= 1e-12 * c.params.omega_q);
        assert!((back.params.t_bath - c.params.t_bath).abs() <= 1e-15);
    }
}
