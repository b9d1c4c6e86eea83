use chanheat::expcli::{
    fit_steady, fit_trace, linear_grid, load_trace, series_csv, simulate_trace, steady_population, Engine, FitParam,
    Scenario, ScenarioConfig, Series,
};
use chanheat::model::{mhz, to_mhz};

fn small_fit_config(engine: Engine, free: Vec<FitParam>) -> ScenarioConfig {
    let mut c = ScenarioConfig::defaults(Scenario::Fit);
    c.params.fock_dim = 4;
    c.engine = engine;
    c.fit.free = free;
    c
}

fn synthetic(c: &ScenarioConfig, eta_mhz: f64) -> (Vec<f64>, Vec<f64>) {
    let times = linear_grid(3.0, 31);
    let mut p = c.params.clone();
    p.eta = mhz(eta_mhz);
    let data = simulate_trace(&p, c.engine, &times, c.tol).unwrap();
    (times, data)
}

#[test]
fn recovers_coupling_from_full_model_trace() {
    let c = small_fit_config(Engine::Full, vec![FitParam::Eta]);
    let (times, data) = synthetic(&c, 2.6);
    let f = fit_trace(&times, &data, &c).unwrap();
    let eta = to_mhz(f.fitted[0].1);
    assert!(f.converged, "{f:?}");
    assert!((eta / 2.6 - 1.0).abs() < 0.01, "eta = {eta} MHz");
    assert!(f.residual < 1e-6, "rms {}", f.residual);
}

#[test]
fn recovers_coupling_from_channel_trace() {
    let c = small_fit_config(Engine::Channel, vec![FitParam::Eta]);
    let (times, data) = synthetic(&c, 1.4);
    let f = fit_trace(&times, &data, &c).unwrap();
    let eta = to_mhz(f.fitted[0].1);
    assert!((eta / 1.4 - 1.0).abs() < 0.01, "eta = {eta} MHz");
    assert!(f.residual < 1e-6, "rms {}", f.residual);
}

#[test]
fn flat_trace_with_free_drive_is_handled() {
    let c = small_fit_config(Engine::Full, vec![FitParam::Omega]);
    let times = linear_grid(2.0, 21);
    let data = vec![0.25; times.len()];
    let f = fit_trace(&times, &data, &c).unwrap();
    assert!(f.residual.is_finite());
    assert!(f.fitted[0].1 > 0.0);
    assert!(f.iterations <= chanheat::expcli::MAX_ITERATIONS);
}

#[test]
fn empty_free_set_evaluates_once() {
    let c = small_fit_config(Engine::Full, Vec::new());
    let (times, data) = synthetic(&c, 2.0);
    let f = fit_trace(&times, &data, &c).unwrap();
    assert_eq!(f.iterations, 0);
    assert!(f.fitted.is_empty());
    assert!(f.residual < 1e-12);
}

#[test]
fn steady_target_is_reached() {
    let c = small_fit_config(Engine::Full, vec![FitParam::Eta]);
    let target = 0.2;
    let f = fit_steady(target, &c).unwrap();
    let mut p = c.params.clone();
    f.apply(&mut p);
    assert!((steady_population(&p, Engine::Full).unwrap() - target).abs() < 1e-6);
}

#[test]
fn trace_round_trips_through_csv() {
    let c = small_fit_config(Engine::Full, vec![FitParam::Eta]);
    let (times, data) = synthetic(&c, 2.2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    std::fs::write(&path, series_csv(&[Series { label: "data".into(), times: times.clone(), p_e: data.clone() }]))
        .unwrap();
    let (t, y) = load_trace(&path).unwrap();
    assert_eq!(t.len(), times.len());
    for (a, b) in t.iter().chain(&y).zip(times.iter().chain(&data)) {
        assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-300), "{a} vs {b}");
    }
}

#[test]
fn short_or_unordered_data_rejected() {
    let c = small_fit_config(Engine::Full, vec![FitParam::Eta]);
    let err = fit_trace(&[0.0, 1.0], &[0.0, 0.1], &c).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let times: Vec<f64> = (0..12).map(|k| (k % 6) as f64).collect();
    let err = fit_trace(&times, &[0.0; 12], &c).unwrap_err();
    assert!(err.to_string().contains("fit_data"));
}
