//! Gibbs effective temperatures and two-stage segmentation of P_e traces.

use crate::error::{Error, Result};
use crate::evolve::EvolutionResult;
use crate::model::HBAR_OVER_KB;

/// Relative settling band around the steady value.
pub const STAGE_REL_TOL: f64 = 0.05;
/// Absolute floor of the settling band.
pub const STAGE_ABS_TOL: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveTemperature {
    /// Kelvin; `f64::INFINITY` at P_e = 1/2.
    pub kelvin: f64,
    pub p_e: f64,
    pub omega_q: f64,
}

impl EffectiveTemperature {
    pub fn is_infinite(&self) -> bool {
        self.kelvin.is_infinite()
    }

    pub fn millikelvin(&self) -> f64 {
        self.kelvin * 1e3
    }
}

pub fn effective_temperature(p_e: f64, omega_q: f64) -> Result<EffectiveTemperature> {
    effective_temperature_with(p_e, omega_q, HBAR_OVER_KB)
}

/// Two-level Gibbs temperature: P_e/(1 − P_e) = exp(−ħω_q/k_B T).
pub fn effective_temperature_with(p_e: f64, omega_q: f64, hbar_over_kb: f64) -> Result<EffectiveTemperature> {
    if !(omega_q > 0.0 && omega_q.is_finite()) {
        return Err(Error::Domain(format!("omega_q must be positive, got {omega_q}")));
    }
    if !(p_e >= 0.0) {
        return Err(Error::Domain(format!("population must be non-negative, got {p_e}")));
    }
    if p_e > 0.5 {
        return Err(Error::NegativeTemperature(p_e));
    }
    let kelvin = if p_e == 0.0 {
        0.0
    } else if p_e == 0.5 {
        f64::INFINITY
    } else {
        hbar_over_kb * omega_q / ((1.0 - p_e) / p_e).ln()
    };
    Ok(EffectiveTemperature { kelvin, p_e, omega_q })
}

pub fn population_from_temperature(t: f64, omega_q: f64) -> Result<f64> {
    population_from_temperature_with(t, omega_q, HBAR_OVER_KB)
}

/// P_e = 1/(1 + exp(ħω_q/k_B T)); zero at T = 0, 1/2 at T = ∞.
pub fn population_from_temperature_with(t: f64, omega_q: f64, hbar_over_kb: f64) -> Result<f64> {
    if !(omega_q > 0.0 && omega_q.is_finite()) {
        return Err(Error::Domain(format!("omega_q must be positive, got {omega_q}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + (hbar_over_kb * omega_q / t).exp()))
}

/// Endothermic stage [start, t_boundary) and quasi-equilibrium stage
/// [t_boundary, end].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageSplit {
    pub t_boundary: f64,
    pub boundary_index: usize,
    pub stage1: (f64, f64),
    pub stage2: (f64, f64),
}

pub fn detect_stages(result: &EvolutionResult, p_ss: f64) -> Result<StageSplit> {
    detect_stages_in(&result.times, &result.p_e, p_ss)
}

/// Earliest sample after which |P_e − p_ss| stays within
/// max(0.05·p_ss, 0.005).
pub fn detect_stages_in(times: &[f64], p_e: &[f64], p_ss: f64) -> Result<StageSplit> {
    if times.is_empty() || times.len() != p_e.len() {
        return Err(Error::Dimension(format!("trace has {} times and {} values", times.len(), p_e.len())));
    }
    if !(p_ss > 0.0 && p_ss < 1.0) {
        return Err(Error::Domain(format!("steady population must lie in (0, 1), got {p_ss}")));
    }
    let band = (STAGE_REL_TOL * p_ss).max(STAGE_ABS_TOL);
    let last = p_e.len() - 1;
    let residual = (p_e[last] - p_ss).abs();
    if residual > band {
        return Err(Error::NoConvergence(residual));
    }
    let mut idx = last;
    while idx > 0 && (p_e[idx - 1] - p_ss).abs() <= band {
        idx -= 1;
    }
    let (t0, t_end) = (times[0], times[last]);
    Ok(StageSplit {
        t_boundary: times[idx],
        boundary_index: idx,
        stage1: (t0, times[idx]),
        stage2: (times[idx], t_end),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ghz;
    use proptest::prelude::*;

    #[test]
    fn temperature_endpoints() {
        let w = ghz(5.448);
        assert_eq!(effective_temperature(0.0, w).unwrap().kelvin, 0.0);
        assert!(effective_temperature(0.5, w).unwrap().is_infinite());
        assert!(matches!(effective_temperature(0.6, w), Err(Error::NegativeTemperature(_))));
        assert!(effective_temperature(-0.1, w).is_err());
        assert_eq!(population_from_temperature(0.0, w).unwrap(), 0.0);
        assert!(population_from_temperature(-1.0, w).is_err());
    }

    #[test]
    fn gibbs_images_of_quoted_temperatures() {
        let w = ghz(5.448);
        // ħω/k_B T and the Boltzmann ratio evaluated by hand.
        let x = 7.6382e-6 * 2.0 * std::f64::consts::PI * 5448.0;
        for (t, p) in [(0.37, 0.330), (0.150, 0.149), (0.190, 0.202), (0.300, 0.295), (0.450, 0.359)] {
            let pe = population_from_temperature(t, w).unwrap();
            assert!((pe - 1.0 / (1.0 + (x / t).exp())).abs() < 1e-15);
            assert!((pe - p).abs() < 1e-3, "T = {t}: {pe}");
        }
        let pe = population_from_temperature(0.020, w).unwrap();
        assert!((pe - 2.1e-6).abs() < 0.05e-6, "{pe}");
        let t = effective_temperature(0.330, w).unwrap().kelvin;
        assert!((t - 0.37).abs() < 0.005, "{t}");
    }

    #[test]
    fn constant_trace_splits_at_first_sample() {
        let times = [0.0, 0.5, 1.0];
        let s = detect_stages_in(&times, &[0.3, 0.3, 0.3], 0.3).unwrap();
        assert_eq!(s.t_boundary, 0.0);
        assert_eq!(s.boundary_index, 0);
    }

    #[test]
    fn exponential_approach_boundary() {
        let tau = 0.4;
        let p_ss = 0.3;
        let times: Vec<f64> = (0..=20000).map(|k| k as f64 * 1e-4).collect();
        let trace: Vec<f64> = times.iter().map(|t| p_ss * (1.0 - (-t / tau).exp())).collect();
        let s = detect_stages_in(&times, &trace, p_ss).unwrap();
        assert!((s.t_boundary - tau * 20f64.ln()).abs() < 2e-4, "{}", s.t_boundary);
    }

    #[test]
    fn unsettled_trace_rejected() {
        let r = detect_stages_in(&[0.0, 1.0], &[0.0, 0.1], 0.3);
        assert!(matches!(r, Err(Error::NoConvergence(x)) if (x - 0.2).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn temperature_increases_with_population(a in 1e-6f64..0.499, b in 1e-6f64..0.499) {
            prop_assume!((a - b).abs() > 1e-9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let w = ghz(5.448);
            prop_assert!(effective_temperature(lo, w).unwrap().kelvin < effective_temperature(hi, w).unwrap().kelvin);
        }

        #[test]
        fn population_increases_and_stays_below_half(a in 1e-3f64..50.0, b in 1e-3f64..50.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let w = ghz(5.448);
            let (pl, ph) = (population_from_temperature(lo, w).unwrap(), population_from_temperature(hi, w).unwrap());
            prop_assert!(pl < ph);
            prop_assert!(ph < 0.5);
        }

        #[test]
        fn round_trip(p in 1e-6f64..0.499, f in 4.0f64..8.0) {
            let w = ghz(f);
            let t = effective_temperature(p, w).unwrap().kelvin;
            prop_assert!((population_from_temperature(t, w).unwrap() - p).abs() <= 1e-12);
        }
    }
}
