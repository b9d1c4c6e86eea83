//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative Frobenius asymmetry tolerated on input.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V·diag(λ)·V†
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Eigenvalues (ascending) and an orthonormal eigenvector set of a Hermitian
/// matrix. Each eigenvector is phased so its largest-magnitude component is
/// real and positive.
pub fn herm_eig_matrix(h: &CMatrix) -> Result<HermEigen> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let asym = h.hermiticity_error();
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();

    if norm > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * norm {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));

    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.column(k);
        fix_phase(&mut vec);
        for i in 0..n {
            vectors[(i, col)] = vec[i];
        }
    }
    Ok(HermEigen { values, vectors })
}

/// Zeroes a[p,q] by J = D·R, where D = diag(1, conj(e)) removes the phase e
/// of a[p,q] and R is the real Jacobi rotation of the resulting block.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= 1e-300 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let e = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -e.conj() * s;
    let jqq = e.conj() * c;

    let n = a.rows();
    // A ← A·J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V·J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn fix_phase(vec: &mut [C64]) {
    let Some(big) = vec.iter().cloned().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return;
    };
    if big.norm() == 0.0 {
        return;
    }
    let ph = big.conj() / big.norm();
    for z in vec.iter_mut() {
        *z *= ph;
    }
}
