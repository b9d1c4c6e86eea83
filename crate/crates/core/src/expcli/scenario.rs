//! Scenario execution: the runs behind each subcommand.

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::config::{Engine, Scenario, ScenarioConfig};
use super::fit::{self, FitResult};
use super::output::{fmt_g12, num, Series, SweepRow};
use super::units::{format_quantity, Quantity};
use super::RunError;
use crate::channel::{
    channel_rates, channel_states, channel_steady_report, evolve_channel, qubit_population_channel, ChannelState,
};
use crate::error::{Error, Result};
use crate::evolve::{
    build_liouvillian, evolve_adaptive, steady_state_report, DensityMatrix, EvolutionResult, SteadyState,
};
use crate::model::{
    basis_projector, build_h_bare_qubit, build_h_rotating, collapse_set_bare, collapse_set_full, to_ghz, to_mhz,
    SystemParams,
};
use crate::qop::{expect, Dims, Operator, GROUND};
use crate::thermo::{detect_stages_in, effective_temperature_with};

/// Physicality and numerical-health figures gathered over a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub trace_err_max: f64,
    pub herm_err_max: f64,
    pub min_eig_min: Option<f64>,
    pub steady_clipped_max: f64,
    pub steady_residual_max: f64,
    /// Largest |closed-form − rate-equation| channel steady population.
    pub channel_formula_gap_max: Option<f64>,
    pub channel_expm_fallback: bool,
    /// Populations above 1/2, reported with a NaN temperature.
    pub negative_temperature_points: usize,
    pub integrator_steps: usize,
    /// Traces that never entered the settling band.
    pub unsettled: Vec<String>,
}

impl Diagnostics {
    fn states(&mut self, trace: f64, herm: f64, min_eig: f64) {
        self.trace_err_max = self.trace_err_max.max(trace);
        self.herm_err_max = self.herm_err_max.max(herm);
        self.min_eig_min = Some(self.min_eig_min.map_or(min_eig, |m| m.min(min_eig)));
    }

    fn trace(&mut self, r: &EvolutionResult) {
        self.states(r.trace_err_max, r.herm_err_max, r.min_eig_min);
        self.integrator_steps += r.steps_taken;
    }

    fn steady(&mut self, s: &SteadyState) {
        self.steady_clipped_max = self.steady_clipped_max.max(s.clipped);
        self.steady_residual_max = self.steady_residual_max.max(s.residual);
    }

    fn channel_gap(&mut self, gap: f64) {
        self.channel_formula_gap_max = Some(self.channel_formula_gap_max.map_or(gap, |g| g.max(gap)));
    }

    fn merge(&mut self, o: Diagnostics) {
        self.trace_err_max = self.trace_err_max.max(o.trace_err_max);
        self.herm_err_max = self.herm_err_max.max(o.herm_err_max);
        if let Some(m) = o.min_eig_min {
            self.min_eig_min = Some(self.min_eig_min.map_or(m, |x| x.min(m)));
        }
        self.steady_clipped_max = self.steady_clipped_max.max(o.steady_clipped_max);
        self.steady_residual_max = self.steady_residual_max.max(o.steady_residual_max);
        if let Some(g) = o.channel_formula_gap_max {
            self.channel_gap(g);
        }
        self.channel_expm_fallback |= o.channel_expm_fallback;
        self.negative_temperature_points += o.negative_temperature_points;
        self.integrator_steps += o.integrator_steps;
        self.unsettled.extend(o.unsettled);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trace_err_max": num(self.trace_err_max),
            "herm_err_max": num(self.herm_err_max),
            "min_eig_min": self.min_eig_min.map(num),
            "steady_clipped_max": num(self.steady_clipped_max),
            "steady_residual_max": num(self.steady_residual_max),
            "channel_formula_gap_max": self.channel_formula_gap_max.map(num),
            "channel_expm_fallback": self.channel_expm_fallback,
            "negative_temperature_points": self.negative_temperature_points,
            "integrator_steps": self.integrator_steps,
            "unsettled": self.unsettled,
        })
    }
}

/// Everything a scenario produced, before any file is written.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub config: ScenarioConfig,
    pub series: Vec<Series>,
    pub sweep: Vec<SweepRow>,
    pub results: Value,
    pub diagnostics: Diagnostics,
    pub fit: Option<FitResult>,
}

impl Outcome {
    /// False when a trace never settled or a fit hit its iteration cap.
    pub fn converged(&self) -> bool {
        self.diagnostics.unsettled.is_empty() && self.fit.as_ref().is_none_or(|f| f.converged)
    }

    pub fn summary(&self) -> Value {
        json!({
            "config_echo": self.config.echo(),
            "results": self.results,
            "diagnostics": self.diagnostics.to_json(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

/// Diagnostics and (series, summary) pairs of one power-series drive.
type DriveRuns = (Diagnostics, Vec<(Series, Value)>);

/// Full-model P_ss, channel (rates, formula) P_ss and diagnostics at one grid point.
type SweepPoint = (Option<f64>, Option<(f64, f64)>, Diagnostics);

fn engine_err(context: impl Into<String>) -> impl FnOnce(Error) -> RunError {
    let context = context.into();
    move |source| RunError::Engine { context, source }
}

pub fn linear_grid(t_max: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect()
}

/// t = 0 followed by `samples − 1` log-spaced times from `t_min` to `t_max`.
pub fn log_grid(t_min: f64, t_max: f64, samples: usize) -> Vec<f64> {
    let m = samples - 1;
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut g = vec![0.0];
    g.extend((0..m).map(|k| if m == 1 { t_max } else { (a + (b - a) * k as f64 / (m - 1) as f64).exp() }));
    if let Some(last) = g.last_mut() {
        *last = t_max;
    }
    g
}

/// |g,0><g,0|.
pub fn initial_state(p: &SystemParams) -> Result<DensityMatrix> {
    DensityMatrix::new(basis_projector(p.dims()?, GROUND, 0))
}

/// Full rotating-frame trace from |g,0>.
pub fn full_trace(p: &SystemParams, times: &[f64], tol: f64) -> Result<EvolutionResult> {
    let h = build_h_rotating(p)?;
    let c = collapse_set_full(p)?;
    let mut r = evolve_adaptive(&h, &c, &initial_state(p)?, times, tol)?;
    unit_clamp(&mut r.p_e);
    Ok(r)
}

/// Engine populations carry round-off of order the integration tolerance;
/// emitted values are pinned to [0, 1].
fn unit_clamp(p_e: &mut [f64]) {
    for x in p_e {
        *x = x.clamp(0.0, 1.0);
    }
}

/// Steady state of the full model and its excited population.
pub fn full_steady(p: &SystemParams) -> Result<(SteadyState, f64)> {
    let h = build_h_rotating(p)?;
    let l = build_liouvillian(&h, &collapse_set_full(p)?)?;
    let s = steady_state_report(&l)?;
    let pe = expect(&Operator::excited_projector(Dims::Composite(p.dims()?))?, s.rho.matrix())?.re;
    Ok((s, pe.clamp(0.0, 1.0)))
}

#[derive(Clone, Debug)]
pub struct ChannelTrace {
    pub p_e: Vec<f64>,
    pub trace_err_max: f64,
    pub herm_err_max: f64,
    pub min_eig_min: f64,
    pub used_expm_fallback: bool,
}

/// Channel-model trace from |g,0> written in the channel basis.
pub fn channel_trace(p: &SystemParams, times: &[f64]) -> Result<ChannelTrace> {
    let b = channel_states(p)?;
    let g = channel_rates(&b, &p.bath(), p);
    let ev = evolve_channel(&b, &g, &ChannelState::ground(&b), times)?;
    let mut out = ChannelTrace {
        p_e: Vec::with_capacity(times.len()),
        trace_err_max: 0.0,
        herm_err_max: 0.0,
        min_eig_min: f64::INFINITY,
        used_expm_fallback: ev.used_expm_fallback,
    };
    for s in &ev.states {
        out.p_e.push(qubit_population_channel(s, &b).clamp(0.0, 1.0));
        out.trace_err_max = out.trace_err_max.max(s.rho.trace_error());
        out.herm_err_max = out.herm_err_max.max(s.rho.hermiticity_error());
        out.min_eig_min = out.min_eig_min.min(s.rho.min_eigenvalue()?);
    }
    Ok(out)
}

/// Model P_e on `times` for the chosen engine ("both" uses the full model).
pub fn simulate_trace(p: &SystemParams, engine: Engine, times: &[f64], tol: f64) -> Result<Vec<f64>> {
    if engine == Engine::Channel {
        Ok(channel_trace(p, times)?.p_e)
    } else {
        Ok(full_trace(p, times, tol)?.p_e)
    }
}

/// Steady P_e for the chosen engine. The channel engine uses the null
/// vector of its rate equations.
pub fn steady_population(p: &SystemParams, engine: Engine) -> Result<f64> {
    if engine == Engine::Channel {
        Ok(channel_steady_report(p)?.p_e_rates.clamp(0.0, 1.0))
    } else {
        Ok(full_steady(p)?.1)
    }
}

/// Effective temperature in mK; NaN above P_e = 1/2 (counted), infinite at 1/2.
fn t_eff_mk(p_e: f64, c: &ScenarioConfig, d: &mut Diagnostics) -> f64 {
    match effective_temperature_with(p_e.max(0.0), c.omega_q_ref, c.params.hbar_over_kb) {
        Ok(t) => t.millikelvin(),
        Err(Error::NegativeTemperature(_)) => {
            d.negative_temperature_points += 1;
            f64::NAN
        }
        Err(_) => f64::NAN,
    }
}

fn stages(times: &[f64], p_e: &[f64], p_ss: f64, label: &str, d: &mut Diagnostics) -> Value {
    match detect_stages_in(times, p_e, p_ss) {
        Ok(s) => json!({
            "settled": true,
            "t_boundary_us": num(s.t_boundary),
            "boundary_index": s.boundary_index,
            "stage1_us": [num(s.stage1.0), num(s.stage1.1)],
            "stage2_us": [num(s.stage2.0), num(s.stage2.1)],
        }),
        Err(Error::NoConvergence(r)) => {
            d.unsettled.push(label.to_string());
            json!({ "settled": false, "final_residual": num(r) })
        }
        Err(e) => json!({ "settled": false, "error": e.to_string() }),
    }
}

fn series_json(s: &Series) -> Value {
    json!({
        "label": s.label,
        "t_us": s.times.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "p_e": s.p_e.iter().map(|&p| num(p)).collect::<Vec<_>>(),
    })
}

fn steady_json(s: &SteadyState) -> Value {
    json!({
        "smallest_singular": num(s.smallest_singular),
        "second_singular": num(s.second_singular),
        "clipped": num(s.clipped),
        "residual": num(s.residual),
    })
}

fn drive_label(engine: &str, drive: f64) -> String {
    format!("{engine}@{}MHz", fmt_g12(to_mhz(drive)))
}

/// A full run on `times`: trace, steady state, temperature and stages.
fn full_run(
    p: &SystemParams,
    c: &ScenarioConfig,
    times: &[f64],
    label: &str,
    d: &mut Diagnostics,
) -> Result<(Series, Value)> {
    let r = full_trace(p, times, c.tol)?;
    d.trace(&r);
    let (ss, p_ss) = full_steady(p)?;
    d.steady(&ss);
    let t_eff = t_eff_mk(p_ss, c, d);
    let st = stages(times, &r.p_e, p_ss, label, d);
    let series = Series { label: label.to_string(), times: times.to_vec(), p_e: r.p_e };
    let result = json!({
        "engine": "full",
        "label": label,
        "drive_mhz": num(to_mhz(p.drive)),
        "p_e_ss": num(p_ss),
        "t_eff_mk": num(t_eff),
        "final_p_e": num(*series.p_e.last().expect("non-empty grid")),
        "max_p_e": num(series.p_e.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        "stages": st,
        "steps": r.steps_taken,
        "steady_state": steady_json(&ss),
    });
    Ok((series, result))
}

fn channel_run(
    p: &SystemParams,
    c: &ScenarioConfig,
    times: &[f64],
    label: &str,
    d: &mut Diagnostics,
) -> Result<(Series, Value)> {
    let tr = channel_trace(p, times)?;
    d.states(tr.trace_err_max, tr.herm_err_max, tr.min_eig_min);
    d.channel_expm_fallback |= tr.used_expm_fallback;
    let mut rep = channel_steady_report(p)?;
    d.channel_gap((rep.p_e_formula - rep.p_e_rates).abs());
    rep.p_e_rates = rep.p_e_rates.clamp(0.0, 1.0);
    let t_eff = t_eff_mk(rep.p_e_rates, c, d);
    let st = stages(times, &tr.p_e, rep.p_e_rates, label, d);
    let series = Series { label: label.to_string(), times: times.to_vec(), p_e: tr.p_e };
    let result = json!({
        "engine": "channel",
        "label": label,
        "drive_mhz": num(to_mhz(p.drive)),
        "p_e_ss": num(rep.p_e_rates),
        "p_e_ss_formula": num(rep.p_e_formula),
        "channel_populations": rep.populations.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "near_singular": rep.near_singular,
        "t_eff_mk": num(t_eff),
        "final_p_e": num(*series.p_e.last().expect("non-empty grid")),
        "stages": st,
    });
    Ok((series, result))
}

/// Runs a scenario in memory.
pub fn execute(c: &ScenarioConfig) -> std::result::Result<Outcome, RunError> {
    c.validate()?;
    let mut d = Diagnostics::default();
    let mut series = Vec::new();
    let mut sweep = Vec::new();
    let mut fit_result = None;
    let name = c.scenario.name();
    let results = match c.scenario {
        Scenario::Rabi => {
            let times = linear_grid(c.t_max, c.samples);
            let p = &c.params;
            let h = build_h_bare_qubit(p).map_err(engine_err(name))?;
            let set = collapse_set_bare(p).map_err(engine_err(name))?;
            let rho0 = DensityMatrix::basis(2, GROUND).map_err(engine_err(name))?;
            let mut r = evolve_adaptive(&h, &set, &rho0, &times, c.tol).map_err(engine_err(name))?;
            d.trace(&r);
            unit_clamp(&mut r.p_e);
            let summary = rabi_summary(&times, &r.p_e, p.drive, 0.5);
            series.push(Series { label: "full".into(), times, p_e: r.p_e });
            json!({ "model": "bare_qubit", "rabi": summary, "series": series.iter().map(series_json).collect::<Vec<_>>() })
        }
        Scenario::Thermalize | Scenario::ChannelCompare => {
            let times = linear_grid(c.t_max, c.samples);
            let engine = if c.scenario == Scenario::ChannelCompare { Engine::Both } else { c.engine };
            let mut runs = Vec::new();
            if engine.full() {
                let (s, v) = full_run(&c.params, c, &times, "full", &mut d)
                    .map_err(engine_err(format!("{name} (full engine)")))?;
                series.push(s);
                runs.push(v);
            }
            if engine.channel() {
                let (s, v) = channel_run(&c.params, c, &times, "channel", &mut d)
                    .map_err(engine_err(format!("{name} (channel engine)")))?;
                series.push(s);
                runs.push(v);
            }
            let mut out = Map::new();
            if series.len() == 2 {
                let dev = series[0].p_e.iter().zip(&series[1].p_e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                out.insert("max_abs_deviation".into(), num(dev));
                let gap = (runs[0]["p_e_ss"].as_f64().unwrap_or(f64::NAN)
                    - runs[1]["p_e_ss"].as_f64().unwrap_or(f64::NAN))
                .abs();
                out.insert("steady_abs_deviation".into(), num(gap));
            }
            out.insert("runs".into(), Value::Array(runs));
            out.insert("series".into(), series.iter().map(series_json).collect());
            Value::Object(out)
        }
        Scenario::PowerSeries => {
            let times = log_grid(c.t_min_log, c.t_max, c.samples);
            let runs: Vec<std::result::Result<DriveRuns, RunError>> = c
                .drive_series
                .par_iter()
                .map(|&drive| {
                    let mut p = c.params.clone();
                    p.drive = drive;
                    let mut dd = Diagnostics::default();
                    let mut got = Vec::new();
                    if c.engine.full() {
                        let label = drive_label("full", drive);
                        got.push(
                            full_run(&p, c, &times, &label, &mut dd)
                                .map_err(engine_err(format!("{name} at {label}")))?,
                        );
                    }
                    if c.engine.channel() {
                        let label = drive_label("channel", drive);
                        got.push(
                            channel_run(&p, c, &times, &label, &mut dd)
                                .map_err(engine_err(format!("{name} at {label}")))?,
                        );
                    }
                    Ok((dd, got))
                })
                .collect();
            let mut values = Vec::new();
            for r in runs {
                let (dd, got) = r?;
                d.merge(dd);
                for (s, v) in got {
                    series.push(s);
                    values.push(v);
                }
            }
            let mut ordering = Map::new();
            for engine in ["full", "channel"] {
                let pe: Vec<f64> = values
                    .iter()
                    .filter(|v| v["engine"] == engine)
                    .map(|v| v["p_e_ss"].as_f64().unwrap_or(f64::NAN))
                    .collect();
                if pe.is_empty() {
                    continue;
                }
                let t: Vec<f64> = values
                    .iter()
                    .filter(|v| v["engine"] == engine)
                    .map(|v| v["t_eff_mk"].as_f64().unwrap_or(f64::NAN))
                    .collect();
                ordering.insert(
                    engine.into(),
                    json!({
                        "p_e_increasing": pe.windows(2).all(|w| w[1] > w[0]),
                        "t_eff_increasing": t.windows(2).all(|w| w[1] > w[0]),
                    }),
                );
            }
            json!({ "runs": values, "ordering": ordering, "series": series.iter().map(series_json).collect::<Vec<_>>() })
        }
        Scenario::Sweep => {
            let (rows, value, dd) = run_sweep(c)?;
            d.merge(dd);
            sweep = rows;
            value
        }
        Scenario::Fit => {
            let (s, value, fr) = run_fit(c, &mut d)?;
            series = s;
            fit_result = Some(fr);
            value
        }
    };
    Ok(Outcome { config: c.clone(), series, sweep, results, diagnostics: d, fit: fit_result })
}

/// Mean, extrema and peak spacing of a Rabi trace over [0, window].
pub fn rabi_summary(times: &[f64], p_e: &[f64], drive: f64, window: f64) -> Value {
    let n = times.iter().take_while(|&&t| t <= window + 1e-12).count();
    let (t, y) = (&times[..n], &p_e[..n]);
    let mut area = 0.0;
    for k in 1..n {
        area += 0.5 * (y[k] + y[k - 1]) * (t[k] - t[k - 1]);
    }
    let mean = if n > 1 { area / (t[n - 1] - t[0]) } else { f64::NAN };
    let peaks = peak_times(t, y);
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let avg = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    let spread = gaps.iter().map(|g| (g - avg).abs()).fold(0.0, f64::max) / avg;
    json!({
        "window_us": num(window),
        "mean_p_e": num(mean),
        "min_p_e": num(y.iter().cloned().fold(f64::INFINITY, f64::min)),
        "max_p_e": num(y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        "peak_times_us": peaks.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "mean_peak_spacing_us": num(if gaps.is_empty() { f64::NAN } else { avg }),
        "peak_spacing_spread": num(if gaps.is_empty() { f64::NAN } else { spread }),
        "expected_period_us": num(std::f64::consts::PI / drive),
    })
}

/// Interior local maxima, refined by a parabola through three samples.
pub fn peak_times(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            let (a, b, c) = (y[k - 1], y[k], y[k + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let h = 0.5 * (t[k + 1] - t[k - 1]);
            out.push(t[k] + shift.clamp(-1.0, 1.0) * h);
        }
    }
    out
}

/// Indices of interior local maxima.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len().saturating_sub(1)).filter(|&k| y[k] > y[k - 1] && y[k] > y[k + 1]).collect()
}

type SweepOut = (Vec<SweepRow>, Value, Diagnostics);

fn run_sweep(c: &ScenarioConfig) -> std::result::Result<SweepOut, RunError> {
    let wd = c.sweep.omega_d.points();
    let dr = c.sweep.drive.points();
    let grid: Vec<(f64, f64)> = wd.iter().flat_map(|&w| dr.iter().map(move |&o| (w, o))).collect();
    let points: Vec<std::result::Result<SweepPoint, RunError>> = grid
        .par_iter()
        .map(|&(w, o)| {
            let mut p = c.params.clone();
            p.omega_d = w;
            p.drive = o;
            let ctx = || {
                format!(
                    "sweep at omega_d = {}, drive = {}",
                    format_quantity(w, Quantity::Frequency),
                    format_quantity(o, Quantity::Frequency)
                )
            };
            let mut dd = Diagnostics::default();
            let full = if c.engine.full() {
                let (s, pe) = full_steady(&p).map_err(engine_err(ctx()))?;
                dd.steady(&s);
                Some(pe)
            } else {
                None
            };
            let channel = if c.engine.channel() {
                let r = channel_steady_report(&p).map_err(engine_err(ctx()))?;
                dd.channel_gap((r.p_e_formula - r.p_e_rates).abs());
                Some((r.p_e_rates.clamp(0.0, 1.0), r.p_e_formula))
            } else {
                None
            };
            Ok((full, channel, dd))
        })
        .collect();
    let mut d = Diagnostics::default();
    let mut rows = Vec::with_capacity(grid.len());
    let mut grid_json = Vec::with_capacity(grid.len());
    for (&(w, o), r) in grid.iter().zip(points) {
        let (full, channel, dd) = r?;
        d.merge(dd);
        let p_e = full.or(channel.map(|x| x.0)).expect("at least one engine");
        let t = t_eff_mk(p_e, c, &mut d);
        rows.push(SweepRow { omega_d_ghz: to_ghz(w), omega_mhz: to_mhz(o), p_e_ss: p_e, t_eff_mk: t });
        let mut entry = Map::new();
        entry.insert("omega_d_ghz".into(), num(to_ghz(w)));
        entry.insert("omega_mhz".into(), num(to_mhz(o)));
        entry.insert("p_e_ss".into(), num(p_e));
        entry.insert("t_eff_mk".into(), num(t));
        if let Some(f) = full {
            entry.insert("p_e_ss_full".into(), num(f));
        }
        if let Some((rates, formula)) = channel {
            entry.insert("p_e_ss_channel".into(), num(rates));
            entry.insert("p_e_ss_channel_formula".into(), num(formula));
        }
        grid_json.push(Value::Object(entry));
    }
    let mut maxima = Vec::new();
    for (j, &o) in dr.iter().enumerate() {
        let curve: Vec<f64> = (0..wd.len()).map(|i| rows[i * dr.len() + j].p_e_ss).collect();
        let at: Vec<Value> = local_maxima(&curve).into_iter().map(|i| num(to_ghz(wd[i]))).collect();
        maxima.push(json!({ "omega_mhz": num(to_mhz(o)), "omega_d_ghz": at }));
    }
    let engine = if c.engine.full() { "full" } else { "channel" };
    let value = json!({ "engine": engine, "grid": grid_json, "local_maxima": maxima });
    Ok((rows, value, d))
}

/// Reads a `t_us,p_e[,...]` trace; a non-numeric first line is a header.
pub fn load_trace(path: &Path) -> std::result::Result<(Vec<f64>, Vec<f64>), RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    let mut times = Vec::new();
    let mut p_e = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(t), Ok(p)) => {
                times.push(t);
                p_e.push(p);
            }
            _ if i == 0 => {}
            _ => {
                return Err(super::ConfigError::new(
                    "fit_data",
                    format!("{}: line {} is not `t_us,p_e`", path.display(), i + 1),
                )
                .into());
            }
        }
    }
    Ok((times, p_e))
}

/// Fits the free parameters to a measured trace by RMS P_e residual.
pub fn fit_trace(times: &[f64], data: &[f64], c: &ScenarioConfig) -> std::result::Result<FitResult, RunError> {
    if times.len() < 10 || times.len() != data.len() {
        return Err(super::ConfigError::new(
            "fit_data",
            format!("need at least 10 (t, p_e) points, got {}", times.len()),
        )
        .into());
    }
    if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(super::ConfigError::new("fit_data", "times must be non-negative and strictly increasing").into());
    }
    fit::fit_params(&c.params, &c.fit.free, |p| Ok(fit::rms(&simulate_trace(p, c.engine, times, c.tol)?, data)))
        .map_err(engine_err("fit"))
}

/// Fits the free parameters so the steady population equals `target`.
pub fn fit_steady(target: f64, c: &ScenarioConfig) -> std::result::Result<FitResult, RunError> {
    fit::fit_params(&c.params, &c.fit.free, |p| Ok((steady_population(p, c.engine)? - target).abs()))
        .map_err(engine_err("fit"))
}

fn fitted_json(f: &FitResult) -> Value {
    let mut m = Map::new();
    for &(k, v) in &f.fitted {
        m.insert(k.name().into(), Value::String(format_quantity(v, k.quantity())));
    }
    json!({
        "fitted": m,
        "residual": num(f.residual),
        "iterations": f.iterations,
        "converged": f.converged,
    })
}

fn run_fit(c: &ScenarioConfig, d: &mut Diagnostics) -> std::result::Result<(Vec<Series>, Value, FitResult), RunError> {
    let label = if c.engine == Engine::Channel { "channel" } else { "full" };
    if let Some(target) = c.fit.target_pe {
        let f = fit_steady(target, c)?;
        let mut p = c.params.clone();
        f.apply(&mut p);
        let times = linear_grid(c.t_max, c.samples);
        let (s, mut v) = if c.engine == Engine::Channel {
            channel_run(&p, c, &times, label, d)
        } else {
            full_run(&p, c, &times, label, d)
        }
        .map_err(engine_err("fit (model at fitted parameters)"))?;
        v["target_p_e"] = num(target);
        let series = vec![s];
        let value = json!({ "mode": "steady_state", "fit": fitted_json(&f), "run": v, "series": series.iter().map(series_json).collect::<Vec<_>>() });
        return Ok((series, value, f));
    }
    let path = c
        .fit
        .data
        .as_ref()
        .ok_or_else(|| super::ConfigError::new("fit_data", "fit needs fit_data or fit_target_pe"))?;
    let (times, data) = load_trace(path)?;
    let f = fit_trace(&times, &data, c)?;
    let mut p = c.params.clone();
    f.apply(&mut p);
    let model = simulate_trace(&p, c.engine, &times, c.tol).map_err(engine_err("fit (model at fitted parameters)"))?;
    let series = vec![
        Series { label: "data".into(), times: times.clone(), p_e: data },
        Series { label: label.into(), times, p_e: model },
    ];
    let value = json!({ "mode": "trace", "fit": fitted_json(&f), "series": series.iter().map(series_json).collect::<Vec<_>>() });
    Ok((series, value, f))
}
