//! Experiment runner: config ingestion, scenario presets, sweeps, fitting
//! and CSV/JSON/SVG emission.
//!
//! Exit codes used by the `chanheat` binary: 0 success, 1 config error,
//! 2 engine or I/O failure, 3 non-convergence (unsettled trace, fit cap).

mod config;
mod fit;
mod output;
mod scenario;
mod units;

use std::io;
use std::path::{Path, PathBuf};

pub use config::{
    parse_config, parse_config_for, parse_params, set_param, Axis, ConfigError, Engine, FitParam, FitSpec,
    OutputFormat, Scenario, ScenarioConfig, SweepSpec,
};
pub use fit::{fit_params, nelder_mead, rms, FitResult, Minimum, BOUND_FACTOR, MAX_ITERATIONS, SIMPLEX_TOL};
pub use output::{
    fmt_g12, json_text, render_svg, series_csv, sweep_csv, Chart, Series, SweepRow, SERIES_HEADER, SWEEP_HEADER,
};
pub use scenario::{
    channel_trace, execute, fit_steady, fit_trace, full_steady, full_trace, initial_state, linear_grid, load_trace,
    local_maxima, log_grid, peak_times, rabi_summary, simulate_trace, steady_population, ChannelTrace, Diagnostics,
    Outcome,
};
pub use units::{format_quantity, parse_quantity, Quantity};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{context}: {source}")]
    Engine {
        context: String,
        #[source]
        source: Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Engine { source: Error::NoConvergence(_), .. } => 3,
            RunError::Engine { .. } | RunError::Io { .. } => 2,
        }
    }
}

/// Files written by a run, alongside its in-memory outcome.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.outcome.converged() {
            0
        } else {
            3
        }
    }
}

pub fn load_config(path: &Path, scenario: Option<Scenario>) -> Result<ScenarioConfig, RunError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
    Ok(parse_config_for(&text, scenario)?)
}

/// Executes the scenario and writes `<scenario>.json` plus the requested
/// CSV and SVG files into `out_dir`.
pub fn run_scenario(c: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    let outcome = execute(c)?;
    let files = write_outputs(&outcome, out_dir)?;
    Ok(RunReport { outcome, files })
}

pub fn write_outputs(o: &Outcome, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let stem = o.config.scenario.name();
    let mut files = Vec::new();
    for f in &o.config.outputs {
        match f {
            OutputFormat::Csv => {
                let text =
                    if o.config.scenario == Scenario::Sweep { sweep_csv(&o.sweep) } else { series_csv(&o.series) };
                files.push(output::write_file(&out_dir.join(format!("{stem}.csv")), &text)?);
            }
            OutputFormat::Svg => {
                files.push(output::write_file(&out_dir.join(format!("{stem}.svg")), &render_svg(&chart(o)))?);
            }
            OutputFormat::Json => {}
        }
    }
    files.push(output::write_file(&out_dir.join(format!("{stem}.json")), &json_text(&o.summary()))?);
    Ok(files)
}

fn chart(o: &Outcome) -> Chart {
    if o.config.scenario == Scenario::Sweep {
        let mut by_drive: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for r in &o.sweep {
            let label = format!("{} MHz", fmt_g12(r.omega_mhz));
            match by_drive.iter_mut().find(|(l, _)| *l == label) {
                Some((_, pts)) => pts.push((r.omega_d_ghz, r.p_e_ss)),
                None => by_drive.push((label, vec![(r.omega_d_ghz, r.p_e_ss)])),
            }
        }
        return Chart {
            title: "Steady-state P_e vs drive frequency".into(),
            x_label: "omega_d / 2pi (GHz)".into(),
            y_label: "P_e".into(),
            log_x: false,
            series: by_drive,
        };
    }
    Chart {
        title: format!("P_e ({})", o.config.scenario.name()),
        x_label: "t (us)".into(),
        y_label: "P_e".into(),
        log_x: o.config.scenario == Scenario::PowerSeries,
        series: o
            .series
            .iter()
            .map(|s| (s.label.clone(), s.times.iter().cloned().zip(s.p_e.iter().cloned()).collect()))
            .collect(),
    }
}
