//! C ABI for the chanheat engines.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible call returns a [`ChqStatus`];
//! the message of the most recent failure on the calling thread is
//! available from [`chq_last_error`]. Frequencies are angular, in rad/µs,
//! times in µs and temperatures in K, except where a function takes a
//! unit-suffixed string.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use chanheat::channel::{channel_rates, channel_states, channel_steady_report};
use chanheat::expcli::{self, Engine, RunError, ScenarioConfig};
use chanheat::model::SystemParams;
use chanheat::thermo::{effective_temperature, population_from_temperature};
use chanheat::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    EngineError = 4,
    NoConvergence = 5,
    NegativeTemperature = 6,
    IoError = 7,
    Panic = 8,
}

/// Engine selector for [`chq_evolve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChqEngine {
    Full = 0,
    Channel = 1,
}

/// Model parameters.
pub struct ChqParams {
    inner: SystemParams,
}

/// A sampled P_e(t) trace.
pub struct ChqTrace {
    times: Vec<f64>,
    p_e: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs removed"));
}

fn engine_status(e: &Error) -> ChqStatus {
    match e {
        Error::NoConvergence(_) => ChqStatus::NoConvergence,
        Error::NegativeTemperature(_) => ChqStatus::NegativeTemperature,
        Error::Domain(_) | Error::Dimension(_) | Error::InvalidState(_) => ChqStatus::InvalidArgument,
        _ => ChqStatus::EngineError,
    }
}

fn run_status(e: &RunError) -> ChqStatus {
    match e {
        RunError::Config(_) => ChqStatus::ConfigError,
        RunError::Engine { source, .. } => engine_status(source),
        RunError::Io { .. } => ChqStatus::IoError,
    }
}

/// Runs `f`, recording its error message and turning panics into
/// `ChqStatus::Panic`.
fn guard<F>(f: F) -> ChqStatus
where
    F: FnOnce() -> Result<(), (ChqStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ChqStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ChqStatus::Panic
        }
    }
}

fn engine(e: Error) -> (ChqStatus, String) {
    (engine_status(&e), e.to_string())
}

fn null(what: &str) -> (ChqStatus, String) {
    (ChqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ChqStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (ChqStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn params_arg<'a>(p: *const ChqParams) -> Result<&'a SystemParams, (ChqStatus, String)> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("params"))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn chq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Thermalization defaults. Never null.
#[no_mangle]
pub extern "C" fn chq_params_default() -> *mut ChqParams {
    Box::into_raw(Box::new(ChqParams { inner: SystemParams::thermalization_defaults() }))
}

/// Parses the model parameters of a config document into `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chq_params_from_config(text: *const c_char, out: *mut *mut ChqParams) -> ChqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let inner = expcli::parse_params(text).map_err(|e| (ChqStatus::ConfigError, e.to_string()))?;
        *out = Box::into_raw(Box::new(ChqParams { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn chq_params_free(p: *mut ChqParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets one parameter from its config key and a unit-suffixed value, e.g.
/// ("eta", "2.5 MHz"). The parameters are unchanged on failure.
///
/// # Safety
/// `p` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn chq_params_set(p: *mut ChqParams, key: *const c_char, value: *const c_char) -> ChqStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("params"))?;
        let (key, value) = (str_arg(key, "key")?, str_arg(value, "value")?);
        let mut next = p.inner.clone();
        expcli::set_param(&mut next, key, value).map_err(|e| (ChqStatus::ConfigError, e.to_string()))?;
        p.inner = next;
        Ok(())
    })
}

/// Reads one parameter in internal units (rad/µs, µs, K).
///
/// # Safety
/// `p` must be a live handle, `key` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn chq_params_get(p: *const ChqParams, key: *const c_char, out: *mut f64) -> ChqStatus {
    guard(|| {
        let p = params_arg(p)?;
        let key = str_arg(key, "key")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match key {
            "omega_q" => p.omega_q,
            "omega_r" => p.omega_r,
            "omega_d" => p.omega_d,
            "eta" => p.eta,
            "drive" => p.drive,
            "gamma_r" => p.gamma_r,
            "dephasing" => p.dephasing,
            "t1" => p.t1,
            "t_bath" => p.t_bath,
            "fock_dim" => p.fock_dim as f64,
            "qubit_thermal" => f64::from(u8::from(p.qubit_thermal)),
            "hbar_over_kb" => p.hbar_over_kb,
            _ => return Err((ChqStatus::ConfigError, format!("unknown key `{key}`"))),
        };
        Ok(())
    })
}

/// Steady P_e of the full Lindblad model.
///
/// # Safety
/// `p` must be a live handle and `p_e` valid.
#[no_mangle]
pub unsafe extern "C" fn chq_steady_state_full(p: *const ChqParams, p_e: *mut f64) -> ChqStatus {
    guard(|| {
        let params = params_arg(p)?;
        let out = p_e.as_mut().ok_or_else(|| null("p_e"))?;
        *out = expcli::full_steady(params).map_err(engine)?.1;
        Ok(())
    })
}

/// Steady P_e of the channel model: closed-form inversion and the null
/// vector of the rate equations. Either output pointer may be null.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn chq_steady_state_channel(
    p: *const ChqParams,
    formula: *mut f64,
    rates: *mut f64,
) -> ChqStatus {
    guard(|| {
        let params = params_arg(p)?;
        let r = channel_steady_report(params).map_err(engine)?;
        if let Some(f) = formula.as_mut() {
            *f = r.p_e_formula;
        }
        if let Some(x) = rates.as_mut() {
            *x = r.p_e_rates;
        }
        Ok(())
    })
}

/// Channel-state energies ε_k (rad/µs) in ascending order.
///
/// # Safety
/// `p` must be a live handle and `out` point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn chq_channel_energies(p: *const ChqParams, out: *mut f64) -> ChqStatus {
    guard(|| {
        let params = params_arg(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = channel_states(params).map_err(engine)?;
        ptr::copy_nonoverlapping(b.energies.as_ptr(), out, 3);
        Ok(())
    })
}

/// Channel rates Γ_kn (1/µs), row-major 3×3.
///
/// # Safety
/// `p` must be a live handle and `out` point to 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn chq_channel_rates(p: *const ChqParams, out: *mut f64) -> ChqStatus {
    guard(|| {
        let params = params_arg(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = channel_states(params).map_err(engine)?;
        let g = channel_rates(&b, &params.bath(), params);
        for (k, row) in g.gamma.iter().enumerate() {
            ptr::copy_nonoverlapping(row.as_ptr(), out.add(3 * k), 3);
        }
        Ok(())
    })
}

/// P_e(t) from |g,0> on `samples` evenly spaced times in [0, t_max] µs.
/// `tol` is the integrator tolerance of the full engine.
///
/// # Safety
/// `p` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn chq_evolve(
    p: *const ChqParams,
    engine_kind: ChqEngine,
    t_max: f64,
    samples: usize,
    tol: f64,
    out: *mut *mut ChqTrace,
) -> ChqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = params_arg(p)?;
        if !(t_max > 0.0 && t_max.is_finite()) || samples < 2 {
            return Err((ChqStatus::InvalidArgument, "need t_max > 0 and at least 2 samples".into()));
        }
        let times = expcli::linear_grid(t_max, samples);
        let e = match engine_kind {
            ChqEngine::Full => Engine::Full,
            ChqEngine::Channel => Engine::Channel,
        };
        let p_e = expcli::simulate_trace(params, e, &times, tol).map_err(engine)?;
        *out = Box::into_raw(Box::new(ChqTrace { times, p_e }));
        Ok(())
    })
}

/// Number of samples; 0 for null.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chq_trace_len(t: *const ChqTrace) -> usize {
    t.as_ref().map_or(0, |t| t.times.len())
}

/// Copies up to `len` samples into `times` and `p_e` (either may be null).
///
/// # Safety
/// `t` must be a live handle; non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn chq_trace_copy(t: *const ChqTrace, times: *mut f64, p_e: *mut f64, len: usize) -> ChqStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trace"))?;
        let n = len.min(t.times.len());
        if !times.is_null() {
            ptr::copy_nonoverlapping(t.times.as_ptr(), times, n);
        }
        if !p_e.is_null() {
            ptr::copy_nonoverlapping(t.p_e.as_ptr(), p_e, n);
        }
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn chq_trace_free(t: *mut ChqTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Gibbs temperature (K) of a two-level population at qubit frequency
/// `omega_q` (rad/µs). Infinite at P_e = 1/2.
///
/// # Safety
/// `kelvin` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chq_effective_temperature(p_e: f64, omega_q: f64, kelvin: *mut f64) -> ChqStatus {
    guard(|| {
        let out = kelvin.as_mut().ok_or_else(|| null("kelvin"))?;
        *out = effective_temperature(p_e, omega_q).map_err(engine)?.kelvin;
        Ok(())
    })
}

/// Inverse of [`chq_effective_temperature`].
///
/// # Safety
/// `p_e` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chq_population_from_temperature(kelvin: f64, omega_q: f64, p_e: *mut f64) -> ChqStatus {
    guard(|| {
        let out = p_e.as_mut().ok_or_else(|| null("p_e"))?;
        *out = population_from_temperature(kelvin, omega_q).map_err(engine)?;
        Ok(())
    })
}

/// Runs the scenario a config document selects and writes its files into
/// `out_dir`. `exit_code`, if non-null, receives the CLI exit code.
///
/// # Safety
/// `config` and `out_dir` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn chq_run_scenario(
    config: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut c_int,
) -> ChqStatus {
    let mut code = 0;
    let status = guard(|| {
        let text = str_arg(config, "config")?;
        let dir = str_arg(out_dir, "out_dir")?;
        let result = expcli::parse_config(text)
            .map_err(RunError::from)
            .and_then(|c: ScenarioConfig| expcli::run_scenario(&c, Path::new(dir)));
        match result {
            Ok(report) => {
                code = report.exit_code();
                if code == 3 {
                    return Err((ChqStatus::NoConvergence, "run finished without settling".into()));
                }
                Ok(())
            }
            Err(e) => {
                code = e.exit_code();
                Err((run_status(&e), e.to_string()))
            }
        }
    });
    if let Some(c) = exit_code.as_mut() {
        *c = if status == ChqStatus::Panic { 2 } else { code };
    }
    status
}
