use std::path::PathBuf;
use std::process::ExitCode;

use chanheat::expcli::{
    load_config, parse_config_for, run_scenario, ConfigError, Engine, FitParam, OutputFormat, RunError, Scenario,
    ScenarioConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chanheat", version, about = "Driven qubit-resonator thermalization scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bare-qubit Rabi oscillation
    Rabi(Common),
    /// Thermalization trace and steady state
    Thermalize(Common),
    /// Thermalization at several drive strengths on a log time grid
    #[command(name = "power_series")]
    PowerSeries(Common),
    /// Steady states over a drive-frequency (and drive-strength) grid
    Sweep(Common),
    /// Full numerics against the channel-state model
    #[command(name = "channel_compare")]
    ChannelCompare(Common),
    /// Fit parameters to a trace or to a target steady population
    Fit {
        #[command(flatten)]
        common: Common,
        /// CSV of t_us,p_e samples
        #[arg(long)]
        data: Option<PathBuf>,
        /// Fit the steady population to this value
        #[arg(long)]
        target_pe: Option<f64>,
        /// Comma-separated free parameters (eta, Omega, t1, gamma_r)
        #[arg(long)]
        free: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration document
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// full, channel or both
    #[arg(long)]
    engine: Option<String>,
    /// Comma-separated output formats: csv, json, svg
    #[arg(long)]
    format: Option<String>,
}

fn configure(scenario: Scenario, common: &Common) -> Result<ScenarioConfig, RunError> {
    let mut c = match &common.config {
        Some(path) => load_config(path, Some(scenario))?,
        None => parse_config_for("", Some(scenario))?,
    };
    if let Some(e) = &common.engine {
        c.engine = Engine::parse(e).ok_or_else(|| ConfigError::new("engine", format!("unknown engine \"{e}\"")))?;
    }
    if let Some(f) = &common.format {
        c.outputs = OutputFormat::parse_list(f)
            .ok_or_else(|| ConfigError::new("format", format!("unknown format list \"{f}\"")))?;
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<i32, RunError> {
    let (scenario, common) = match &cli.command {
        Command::Rabi(c) => (Scenario::Rabi, c),
        Command::Thermalize(c) => (Scenario::Thermalize, c),
        Command::PowerSeries(c) => (Scenario::PowerSeries, c),
        Command::Sweep(c) => (Scenario::Sweep, c),
        Command::ChannelCompare(c) => (Scenario::ChannelCompare, c),
        Command::Fit { common, .. } => (Scenario::Fit, common),
    };
    let mut c = configure(scenario, common)?;
    if let Command::Fit { data, target_pe, free, .. } = &cli.command {
        if let Some(d) = data {
            c.fit.data = Some(d.clone());
        }
        if target_pe.is_some() {
            c.fit.target_pe = *target_pe;
        }
        if let Some(list) = free {
            c.fit.free = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| FitParam::parse(s.trim()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ConfigError::new("free", format!("unknown parameter in \"{list}\"")))?;
        }
        c.validate()?;
    }
    let report = run_scenario(&c, &common.out)?;
    for f in &report.files {
        println!("{}", f.display());
    }
    let d = &report.outcome.diagnostics;
    if !d.unsettled.is_empty() {
        eprintln!("warning: traces never settled: {}", d.unsettled.join(", "));
    }
    if let Some(f) = &report.outcome.fit {
        if !f.converged {
            eprintln!("warning: fit stopped at the iteration cap (residual {:.3e})", f.residual);
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
