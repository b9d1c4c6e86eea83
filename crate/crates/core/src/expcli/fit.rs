//! Derivative-free parameter fitting.

use crate::error::{Error, Result};
use crate::model::SystemParams;

use super::config::FitParam;

pub const MAX_ITERATIONS: usize = 500;
/// Simplex diameter (in log-parameter space) at which the search stops.
pub const SIMPLEX_TOL: f64 = 1e-6;
/// Parameters stay within [start/10, 10·start].
pub const BOUND_FACTOR: f64 = 10.0;
const INITIAL_STEP: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Fitted values in internal units, in the order of `free`.
    pub fitted: Vec<(FitParam, f64)>,
    /// Root-mean-square P_e residual at the fitted values.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn apply(&self, p: &mut SystemParams) {
        for &(k, v) in &self.fitted {
            k.set(p, v);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead on a box. Points are clamped into [lo, hi] per coordinate;
/// the initial simplex offsets each coordinate of `x0` by `step`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, lo: &[f64], hi: &[f64], max_iter: usize, tol: f64) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let clamp = |x: Vec<f64>| -> Vec<f64> { x.iter().enumerate().map(|(i, v)| v.clamp(lo[i], hi[i])).collect() };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let start = clamp(x0.to_vec());
    let v0 = f(&start);
    if n == 0 {
        return Minimum { x: start, value: v0, iterations: 0, converged: true };
    }
    simplex.push((start.clone(), v0));
    for i in 0..n {
        let mut x = start.clone();
        // Step inward when the start sits on the upper bound.
        x[i] = if x[i] + step <= hi[i] { x[i] + step } else { x[i] - step };
        let x = clamp(x);
        let v = f(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    loop {
        order(&mut simplex);
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> =
            (0..n).map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let along = |t: f64| clamp(centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect());
        let xr = along(alpha);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(rho * alpha);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(-rho);
            let v = f(&x);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = clamp(best.iter().zip(&vertex.0).map(|(b, v)| b + sigma * (v - b)).collect());
            let v = f(&x);
            *vertex = (x, v);
        }
    }
    order(&mut simplex);
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations, converged }
}

/// Fits the free parameters of `base` by minimizing `rms(params)`, the RMS
/// P_e residual, in log-parameter space.
pub fn fit_params<F>(base: &SystemParams, free: &[FitParam], rms: F) -> Result<FitResult>
where
    F: Fn(&SystemParams) -> Result<f64>,
{
    let mut free = free.to_vec();
    free.sort();
    free.dedup();
    let start: Vec<f64> = free.iter().map(|k| k.get(base)).collect();
    if let Some((k, v)) = free.iter().zip(&start).find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Domain(format!("cannot fit {} from a non-positive start value {v}", k.name())));
    }
    let at = |u: &[f64]| {
        let mut p = base.clone();
        for ((k, s), ui) in free.iter().zip(&start).zip(u) {
            k.set(&mut p, s * ui.exp());
        }
        p
    };
    let mut failure = None;
    let bound = BOUND_FACTOR.ln();
    let lo = vec![-bound; free.len()];
    let hi = vec![bound; free.len()];
    let m = nelder_mead(
        |u| match rms(&at(u)) {
            Ok(r) if r.is_finite() => r,
            Ok(_) => f64::INFINITY,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        &vec![0.0; free.len()],
        INITIAL_STEP,
        &lo,
        &hi,
        MAX_ITERATIONS,
        SIMPLEX_TOL,
    );
    if !m.value.is_finite() {
        return Err(failure.unwrap_or_else(|| Error::Domain("fit objective is not finite anywhere visited".into())));
    }
    let p = at(&m.x);
    Ok(FitResult {
        fitted: free.iter().map(|k| (*k, k.get(&p))).collect(),
        residual: m.value,
        iterations: m.iterations,
        converged: m.converged,
    })
}

/// Root-mean-square difference of two equally long traces.
pub fn rms(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(1) as f64;
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mhz;

    #[test]
    fn rosenbrock_minimum() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            0.1,
            &[-5.0, -5.0],
            &[5.0, 5.0],
            5000,
            1e-10,
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn bounded_minimum_sits_on_the_wall() {
        let m = nelder_mead(|x| x[0], &[0.5], 0.1, &[0.0], &[1.0], 500, 1e-9);
        assert!(m.converged);
        assert!(m.x[0].abs() < 1e-8);
    }

    #[test]
    fn recovers_a_scale_in_log_space() {
        let base = SystemParams::thermalization_defaults();
        let target = mhz(2.7);
        let r = fit_params(&base, &[FitParam::Eta], |p| Ok((p.eta / target - 1.0).abs())).unwrap();
        assert!(r.converged);
        assert!((r.fitted[0].1 / target - 1.0).abs() < 1e-5);
        assert!(r.iterations <= MAX_ITERATIONS);
    }

    #[test]
    fn empty_free_set_evaluates_once() {
        let base = SystemParams::thermalization_defaults();
        let r = fit_params(&base, &[], |_| Ok(0.125)).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.residual, 0.125);
        assert!(r.fitted.is_empty());
    }

    #[test]
    fn out_of_range_target_stops_at_the_bound() {
        let base = SystemParams::thermalization_defaults();
        let r = fit_params(&base, &[FitParam::Omega], |p| Ok((p.drive - 1e6).abs())).unwrap();
        assert!((r.fitted[0].1 / (base.drive * BOUND_FACTOR) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors_everywhere_propagate() {
        let base = SystemParams::thermalization_defaults();
        let r = fit_params(&base, &[FitParam::T1], |_| Err(Error::Domain("boom".into())));
        assert!(matches!(r, Err(Error::Domain(m)) if m == "boom"));
    }
}
