//! Null-space steady state of a Liouvillian.
//!
//! The trace-constrained system [L; tᵀ] v = [0; 1] is consistent for any
//! trace-preserving L (tᵀL = 0), so its least-squares solution is the exact
//! solution of the bordered square system
//!
//! ```text
//! [ L    u ] [v]   [0]
//! [ t̂ᵀ   0 ] [s] = [1/√d]
//! ```
//!
//! with u = t̂ = t/√d. Uniqueness is checked through the singular values of
//! L: bordering L with its left null vector and the computed right null
//! vector (each scaled by α ≥ ‖L‖₂) removes σ₁ and leaves σ₂ as the smallest
//! singular value, which inverse iteration finds from a single LU.

use super::{unvectorize, DensityMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::qop::{herm_eig_matrix, CMatrix, Lu, C64, ZERO};

/// Minimum separation σ₂/σ₁ for a unique steady state.
pub const KERNEL_GAP: f64 = 1e3;
/// Eigenvalues below this are clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;

const INVERSE_ITERATIONS: usize = 60;

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ‖L v₁‖ for the normalized null vector; the smallest singular value.
    pub smallest_singular: f64,
    /// Second-smallest singular value of L.
    pub second_singular: f64,
    /// Largest magnitude of a clipped negative eigenvalue.
    pub clipped: f64,
    /// ‖L·vec(ρ)‖ after Hermitizing and clipping.
    pub residual: f64,
}

pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    steady_state_report(l).map(|s| s.rho)
}

pub fn steady_state_report(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.hilbert_dim();
    let n = d * d;
    let lm = l.matrix();
    let sqrt_d = (d as f64).sqrt();
    let t_hat: Vec<C64> = (0..n).map(|k| if k % (d + 1) == 0 { C64::new(1.0 / sqrt_d, 0.0) } else { ZERO }).collect();

    let bordered = border(lm, &t_hat, &t_hat, 1.0);
    let mut rhs = vec![ZERO; n + 1];
    rhs[n] = C64::new(1.0 / sqrt_d, 0.0);
    let x = match Lu::factor(&bordered) {
        Ok(lu) => lu.solve(&rhs),
        Err(_) => {
            return Err(Error::DegenerateKernel { smallest: 0.0, second: 0.0 });
        }
    };
    let v: Vec<C64> = x[..n].to_vec();
    let v_norm = norm(&v);
    let v1: Vec<C64> = v.iter().map(|z| z / v_norm).collect();

    let smallest = norm(&lm.matvec(&v1));
    let alpha = lm.one_norm().max(inf_norm(lm)).max(1.0);
    let second = smallest_singular_value(&border(lm, &t_hat, &v1, alpha))?;
    if !(second > KERNEL_GAP * smallest) {
        return Err(Error::DegenerateKernel { smallest, second });
    }

    let raw = unvectorize(&v)?;
    let herm = raw.hermitian_part();
    let tr = herm.trace().re;
    let mut rho = herm.scale_real(1.0 / tr);
    let eig = herm_eig_matrix(&rho)?;
    let clipped = eig.values.iter().filter(|&&x| x < -CLIP_TOL).map(|x| -x).fold(0.0, f64::max);
    if clipped > 0.0 {
        let mut fixed = eig.clone();
        for x in fixed.values.iter_mut() {
            if *x < -CLIP_TOL {
                *x = 0.0;
            }
        }
        let m = fixed.reconstruct().hermitian_part();
        let tr = m.trace().re;
        rho = m.scale_real(1.0 / tr);
    }
    let residual = norm(&lm.matvec(&super::vectorize(&rho)?));
    Ok(SteadyState {
        rho: DensityMatrix::from_matrix_unchecked(rho),
        smallest_singular: smallest,
        second_singular: second,
        clipped,
        residual,
    })
}

/// [[L, α·u], [α·w†, 0]]
fn border(l: &CMatrix, u: &[C64], w: &[C64], alpha: f64) -> CMatrix {
    let n = l.rows();
    let mut b = CMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        b.row_mut(i)[..n].copy_from_slice(l.row(i));
        b[(i, n)] = u[i] * alpha;
        b[(n, i)] = w[i].conj() * alpha;
    }
    b
}

/// Inverse iteration on B†B using one LU of B.
fn smallest_singular_value(b: &CMatrix) -> Result<f64> {
    let lu = match Lu::factor(b) {
        Ok(lu) => lu,
        Err(_) => return Ok(0.0),
    };
    let n = b.rows();
    // Deterministic start with no special alignment to the structure.
    let mut w: Vec<C64> = (0..n).map(|k| C64::new(1.0 + (k as f64 * 0.618).sin(), (k as f64 * 1.414).cos())).collect();
    let w_norm = norm(&w);
    w.iter_mut().for_each(|z| *z /= w_norm);
    let mut sigma = f64::INFINITY;
    for _ in 0..INVERSE_ITERATIONS {
        let z = lu.solve(&lu.solve_adjoint(&w));
        let growth = norm(&z);
        if !growth.is_finite() || growth == 0.0 {
            return Ok(0.0);
        }
        let next = 1.0 / growth.sqrt();
        w = z.into_iter().map(|x| x / growth).collect();
        let converged = (next - sigma).abs() <= 1e-6 * next;
        sigma = next;
        if converged {
            break;
        }
    }
    Ok(sigma)
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}
