//! Dormand-Prince 5(4) with PI step control and 4th-order dense output.

use crate::error::{Error, Result};
use crate::qop::C64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Clone, Copy, Debug)]
pub struct DopriOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl DopriOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 5_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct DopriOutput {
    /// One state per requested sample time.
    pub samples: Vec<Vec<C64>>,
    pub steps_taken: usize,
    pub steps_rejected: usize,
}

/// Integrates y' = f(t, y) from t = 0 (or `t_grid[0]` if negative start is
/// never requested) and returns the state at each time in `t_grid`.
///
/// `t_grid` must be non-decreasing with `t_grid[0] >= t0`.
pub fn integrate<F>(mut f: F, t0: f64, y0: &[C64], t_grid: &[f64], opts: DopriOptions) -> Result<DopriOutput>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let mut samples = Vec::with_capacity(t_grid.len());
    let Some(&t_end) = t_grid.last() else {
        return Ok(DopriOutput { samples, steps_taken: 0, steps_rejected: 0 });
    };
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid[0] < t0 {
        return Err(Error::Domain("sample times must be ascending and start at or after t0".into()));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut next = 0;
    while next < t_grid.len() && t_grid[next] <= t {
        samples.push(y.clone());
        next += 1;
    }
    if next == t_grid.len() {
        return Ok(DopriOutput { samples, steps_taken: 0, steps_rejected: 0 });
    }

    let mut k1 = vec![C64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut ytmp = k1.clone();
    let mut y1 = k1.clone();
    let mut dense = k1.clone();

    f(t, &y, &mut k1);
    let span = t_end - t;
    let mut h = initial_step(&mut f, t, &y, &k1, span, &opts);
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;
    let mut rejected = 0usize;

    while next < t_grid.len() {
        if steps + rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        stage(&mut ytmp, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &ytmp, &mut k2);
        stage(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &ytmp, &mut k3);
        stage(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &ytmp, &mut k4);
        stage(&mut ytmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &ytmp, &mut k5);
        stage(&mut ytmp, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + h, &ytmp, &mut k6);
        stage(&mut y1, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        f(t + h, &y1, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sk = opts.atol + opts.rtol * y[i].norm().max(y1[i].norm());
            err += e.norm_sqr() / (sk * sk);
        }
        let err = (err / n.max(1) as f64).sqrt();

        let fac11 = err.powf(0.2 - BETA * 0.75);
        if err <= 1.0 {
            let mut fac = fac11 / facold.powf(BETA);
            fac = (fac / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            facold = err.max(1e-4);
            steps += 1;

            let t_new = t + h;
            while next < t_grid.len() && t_grid[next] <= t_new {
                let theta = ((t_grid[next] - t) / h).clamp(0.0, 1.0);
                for i in 0..n {
                    let ydiff = y1[i] - y[i];
                    let bspl = k1[i] * h - ydiff;
                    let r4 = ydiff - k7[i] * h - bspl;
                    let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
                    let th1 = 1.0 - theta;
                    dense[i] = y[i] + (ydiff + (bspl + (r4 + r5 * th1) * theta) * th1) * theta;
                }
                samples.push(if theta == 1.0 { y1.clone() } else { dense.clone() });
                next += 1;
            }

            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            h = h_new;
            last_rejected = false;
        } else {
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
            last_rejected = true;
            rejected += 1;
        }
    }
    Ok(DopriOutput { samples, steps_taken: steps, steps_rejected: rejected })
}

fn stage(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &Vec<C64>)]) {
    for i in 0..y.len() {
        let mut acc = C64::default();
        for (a, k) in terms {
            acc += k[i] * *a;
        }
        out[i] = y[i] + acc * h;
    }
}

fn initial_step<F>(f: &mut F, t: f64, y: &[C64], f0: &[C64], span: f64, opts: &DopriOptions) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len().max(1) as f64;
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let norm = |v: &[C64]| (v.iter().zip(&scale).map(|(x, s)| x.norm_sqr() / (s * s)).sum::<f64>() / n).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 <= 1e-10 || d1 <= 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::default(); y.len()];
    f(t + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}
