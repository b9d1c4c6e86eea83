//! CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::RunError;

/// One P_e trace with its engine label ("full", "channel@2MHz", ...).
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
}

/// One steady-state grid point of a sweep, in display units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub omega_d_ghz: f64,
    pub omega_mhz: f64,
    pub p_e_ss: f64,
    /// mK; infinite at P_e = 1/2, NaN above.
    pub t_eff_mk: f64,
}

pub const SERIES_HEADER: &str = "t_us,p_e,engine";
pub const SWEEP_HEADER: &str = "omega_d_ghz,omega_mhz,p_e_ss,t_eff_mk";

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside [1e-4, 1e12). Non-finite values print as inf, -inf, nan.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn series_csv(series: &[Series]) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for s in series {
        for (t, p) in s.times.iter().zip(&s.p_e) {
            let _ = writeln!(out, "{},{},{}", fmt_g12(*t), fmt_g12(*p), s.label);
        }
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_g12(r.omega_d_ghz),
            fmt_g12(r.omega_mhz),
            fmt_g12(r.p_e_ss),
            fmt_g12(r.t_eff_mk)
        );
    }
    out
}

/// A JSON number, or the CSV literal for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(fmt_g12(x)))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf, RunError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
        }
    }
    fs::write(path, contents).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#d62728", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Standalone SVG 1.1 line chart.
pub fn render_svg(chart: &Chart) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let tx = |x: f64| if chart.log_x { x.log10() } else { x };
    let points = || {
        chart
            .series
            .iter()
            .flat_map(|(_, pts)| pts.iter())
            .filter(|(x, y)| y.is_finite() && x.is_finite() && (!chart.log_x || *x > 0.0))
    };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points() {
        x0 = x0.min(tx(x));
        x1 = x1.max(tx(x));
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    y0 = y0.min(0.0);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| left + (tx(x) - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(s, r#"<path d="M{left} {top} V{} H{}" fill="none" stroke="black"/>"#, top + ph, left + pw);
    let tick = |v: f64| if chart.log_x { fmt_g12(10f64.powf(v)) } else { fmt_g12(v) };
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let px = left + f * pw;
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            top + ph,
            top + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            top + ph + 18.0,
            short(&tick(xv))
        );
        let yv = y0 + f * (y1 - y0);
        let py = top + (1.0 - f) * ph;
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            short(&fmt_g12(yv))
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        top + ph / 2.0,
        escape(&chart.y_label)
    );
    for (i, (label, pts)) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for &(x, y) in pts.iter().filter(|(x, y)| y.is_finite() && x.is_finite() && (!chart.log_x || *x > 0.0)) {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ =
            writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.trim_end());
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn short(s: &str) -> String {
    s.parse::<f64>()
        .map(|v| format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_string())
        .unwrap_or_else(|_| s.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1");
        assert_eq!(fmt_g12(0.1), "0.1");
        assert_eq!(fmt_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g12(2.0 / 3.0 * 1e3), "666.666666667");
        assert_eq!(fmt_g12(-5.448), "-5.448");
        assert_eq!(fmt_g12(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g12(1e-4), "0.0001");
        assert_eq!(fmt_g12(123456789012.0), "123456789012");
        assert_eq!(fmt_g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g12(f64::INFINITY), "inf");
        assert_eq!(fmt_g12(f64::NAN), "nan");
        // 9.9999999999995 rounds up across a decade
        assert_eq!(fmt_g12(9.9999999999996), "10");
    }

    #[test]
    fn csv_headers() {
        let s = Series { label: "full".into(), times: vec![0.0, 0.5], p_e: vec![0.0, 0.25] };
        let csv = series_csv(&[s]);
        assert_eq!(csv.lines().next(), Some("t_us,p_e,engine"));
        assert_eq!(csv.lines().nth(2), Some("0.5,0.25,full"));
        let rows = [SweepRow { omega_d_ghz: 5.43, omega_mhz: 5.8, p_e_ss: 0.5, t_eff_mk: f64::INFINITY }];
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().next(), Some("omega_d_ghz,omega_mhz,p_e_ss,t_eff_mk"));
        assert_eq!(csv.lines().nth(1), Some("5.43,5.8,0.5,inf"));
    }

    #[test]
    fn json_round_trip_keeps_order() {
        let v = serde_json::json!({"version": "x", "config_echo": {"b": 1, "a": num(f64::INFINITY)}, "results": [num(0.25)]});
        let text = json_text(&v);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(json_text(&back), text);
        assert!(text.find("config_echo").unwrap() < text.find("version").unwrap());
        assert_eq!(v["config_echo"]["a"], "inf");
    }

    #[test]
    fn svg_is_standalone() {
        let chart = Chart {
            title: "P_e <test>".into(),
            x_label: "t (us)".into(),
            y_label: "P_e".into(),
            log_x: true,
            series: vec![("a".into(), vec![(0.0, 0.0), (0.01, 0.1), (1.0, 0.3)]), ("b".into(), vec![(0.1, 0.2)])],
        };
        let svg = render_svg(&chart);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"version="1.1""#));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&lt;test&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
