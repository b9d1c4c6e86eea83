//! Matrix exponential by scaling and squaring with a degree-13 Padé kernel.

use super::lu::Lu;
use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// exp(A) for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("expm needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::Domain("expm of a non-finite matrix".into()));
    }
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));

    let b = &PADE_13;
    let id = CMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| a6[(i, j)] * c6 + a4[(i, j)] * c4 + a2[(i, j)] * c2 + id[(i, j)] * c0)
    };
    let u_inner = &a6.matmul(&lin(b[13], b[11], b[9], 0.0)) + &lin(b[7], b[5], b[3], b[1]);
    let u = scaled.matmul(&u_inner);
    let v = &a6.matmul(&lin(b[12], b[10], b[8], 0.0)) + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = Lu::factor(&q)?.solve_matrix(&p);
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// exp(A·t)·v without forming a separate scaled copy at the call site.
pub fn expm_apply(a: &CMatrix, t: f64, v: &[C64]) -> Result<Vec<C64>> {
    Ok(expm(&a.scale_real(t))?.matvec(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        let z = CMatrix::zeros(4, 4);
        assert!(expm(&z).unwrap().max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -θ],[θ, 0]]) is a rotation by θ.
        let theta = 2.3;
        let a = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(-theta, 0.0),
            (1, 0) => C64::new(theta, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-13);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-13);
    }

    #[test]
    fn large_norm_diagonal_uses_squaring() {
        let a = CMatrix::from_real_diag(&[-40.0, 3.0, 0.5]);
        let e = expm(&a).unwrap();
        for (k, x) in [-40.0f64, 3.0, 0.5].iter().enumerate() {
            let rel = (e[(k, k)].re - x.exp()).abs() / x.exp();
            assert!(rel < 1e-12, "entry {k}: rel err {rel}");
        }
    }
}
