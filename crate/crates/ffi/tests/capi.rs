use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use chanheat::model::{ghz, mhz};
use chanheat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(chq_last_error()) }.to_string_lossy().into_owned()
}

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(chq_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn params_set_get_and_errors() {
    let p = chq_params_default();
    unsafe {
        let mut v = 0.0;
        assert_eq!(chq_params_get(p, cs("omega_q").as_ptr(), &mut v), ChqStatus::Ok);
        assert_eq!(v, ghz(5.448));
        assert_eq!(chq_params_set(p, cs("eta").as_ptr(), cs("2.5 MHz").as_ptr()), ChqStatus::Ok);
        chq_params_get(p, cs("eta").as_ptr(), &mut v);
        assert_eq!(v, mhz(2.5));

        assert_eq!(chq_params_set(p, cs("t1").as_ptr(), cs("-1 us").as_ptr()), ChqStatus::ConfigError);
        assert!(last_error().contains("t1"), "{}", last_error());
        chq_params_get(p, cs("t1").as_ptr(), &mut v);
        assert_eq!(v, 5.2);

        assert_eq!(chq_params_get(p, cs("colour").as_ptr(), &mut v), ChqStatus::ConfigError);
        assert_eq!(chq_params_get(ptr::null(), cs("eta").as_ptr(), &mut v), ChqStatus::NullPointer);
        assert_eq!(chq_params_set(p, ptr::null(), cs("1 MHz").as_ptr()), ChqStatus::NullPointer);
        chq_params_free(p);
        chq_params_free(ptr::null_mut());
    }
}

#[test]
fn params_from_config_document() {
    unsafe {
        let mut p = ptr::null_mut();
        let doc = cs("drive = \"3.5 MHz\"\nfock_dim = 6\n");
        assert_eq!(chq_params_from_config(doc.as_ptr(), &mut p), ChqStatus::Ok);
        let mut v = 0.0;
        chq_params_get(p, cs("drive").as_ptr(), &mut v);
        assert_eq!(v, mhz(3.5));
        chq_params_get(p, cs("fock_dim").as_ptr(), &mut v);
        assert_eq!(v, 6.0);
        chq_params_free(p);

        let bad = cs("colour = \"blue\"");
        let mut q = ptr::null_mut();
        assert_eq!(chq_params_from_config(bad.as_ptr(), &mut q), ChqStatus::ConfigError);
        assert!(q.is_null());
        assert!(last_error().contains("colour"));
    }
}

#[test]
fn steady_states_and_channel_quantities() {
    let p = chq_params_default();
    unsafe {
        chq_params_set(p, cs("fock_dim").as_ptr(), cs("8").as_ptr());
        let mut full = 0.0;
        assert_eq!(chq_steady_state_full(p, &mut full), ChqStatus::Ok);
        assert!(full > 0.0 && full < 0.5, "{full}");

        let (mut formula, mut rates) = (0.0, 0.0);
        assert_eq!(chq_steady_state_channel(p, &mut formula, &mut rates), ChqStatus::Ok);
        assert!((0.0..=1.0).contains(&formula) && (0.0..=1.0).contains(&rates));
        assert_eq!(chq_steady_state_channel(p, ptr::null_mut(), ptr::null_mut()), ChqStatus::Ok);

        let mut e = [0.0; 3];
        assert_eq!(chq_channel_energies(p, e.as_mut_ptr()), ChqStatus::Ok);
        assert!(e[0] <= e[1] && e[1] <= e[2]);
        let mut g = [f64::NAN; 9];
        assert_eq!(chq_channel_rates(p, g.as_mut_ptr()), ChqStatus::Ok);
        assert!(g.iter().all(|x| x.is_finite() && *x >= 0.0));
        assert_eq!(chq_channel_rates(p, ptr::null_mut()), ChqStatus::NullPointer);
        chq_params_free(p);
    }
}

#[test]
fn evolve_and_copy_trace() {
    let p = chq_params_default();
    unsafe {
        chq_params_set(p, cs("fock_dim").as_ptr(), cs("5").as_ptr());
        for engine in [ChqEngine::Full, ChqEngine::Channel] {
            let mut t = ptr::null_mut();
            assert_eq!(chq_evolve(p, engine, 1.0, 11, 1e-10, &mut t), ChqStatus::Ok, "{}", last_error());
            assert_eq!(chq_trace_len(t), 11);
            let mut times = [0.0; 11];
            let mut pe = [f64::NAN; 11];
            assert_eq!(chq_trace_copy(t, times.as_mut_ptr(), pe.as_mut_ptr(), 11), ChqStatus::Ok);
            assert_eq!(times[10], 1.0);
            assert!(pe[0].abs() < 1e-12);
            assert!(pe.iter().all(|x| (0.0..=1.0).contains(x)));
            chq_trace_free(t);
        }
        let mut t = ptr::null_mut();
        assert_eq!(chq_evolve(p, ChqEngine::Full, -1.0, 11, 1e-10, &mut t), ChqStatus::InvalidArgument);
        assert_eq!(chq_evolve(p, ChqEngine::Full, 1.0, 11, 1.0, &mut t), ChqStatus::InvalidArgument);
        assert!(t.is_null());
        assert_eq!(chq_trace_len(ptr::null()), 0);
        chq_params_free(p);
    }
}

#[test]
fn temperature_conversions() {
    let w = ghz(5.448);
    unsafe {
        let mut k = 0.0;
        assert_eq!(chq_effective_temperature(0.330, w, &mut k), ChqStatus::Ok);
        let mut p = 0.0;
        assert_eq!(chq_population_from_temperature(k, w, &mut p), ChqStatus::Ok);
        assert!((p - 0.330).abs() < 1e-12);
        assert_eq!(chq_effective_temperature(0.6, w, &mut k), ChqStatus::NegativeTemperature);
        assert_eq!(chq_effective_temperature(0.5, w, &mut k), ChqStatus::Ok);
        assert!(k.is_infinite());
        assert_eq!(chq_population_from_temperature(-1.0, w, &mut p), ChqStatus::InvalidArgument);
    }
}

#[test]
fn run_scenario_writes_files_and_reports_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cs(dir.path().to_str().unwrap());
    unsafe {
        let doc = cs("scenario = \"rabi\"\nt_max = \"0.2 us\"\nsamples = 21\noutputs = [\"csv\"]\n");
        let mut code = -1;
        assert_eq!(chq_run_scenario(doc.as_ptr(), out.as_ptr(), &mut code), ChqStatus::Ok, "{}", last_error());
        assert_eq!(code, 0);
        assert!(dir.path().join("rabi.csv").exists());
        assert!(dir.path().join("rabi.json").exists());

        let bad = cs("scenario = \"rabi\"\nt1 = \"-2 us\"\n");
        assert_eq!(chq_run_scenario(bad.as_ptr(), out.as_ptr(), &mut code), ChqStatus::ConfigError);
        assert_eq!(code, 1);
        assert!(last_error().contains("t1"));
    }
}

/// The generated header is valid C.
#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("chanheat.h");
    assert!(header.exists());
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
