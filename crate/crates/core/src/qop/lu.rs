//! LU factorization with partial pivoting.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// PA = LU, packed in one matrix (unit lower triangle implied).
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);

        for k in 0..n {
            let (p, pmax) =
                (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= scale * 1e-300 {
                return Err(Error::Singular { column: k, pivot: pmax });
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            let pivot_row: Vec<C64> = lu.row(k)[k + 1..].to_vec();
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                let row = &mut lu.row_mut(i)[k + 1..];
                for (r, &u) in row.iter_mut().zip(&pivot_row) {
                    *r -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Smallest |U_kk| relative to the largest.
    pub fn pivot_ratio(&self) -> f64 {
        let d: Vec<f64> = self.lu.diagonal().iter().map(|z| z.norm()).collect();
        let max = d.iter().cloned().fold(0.0, f64::max);
        let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        min / max
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves A† x = b.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        // A = Pᵀ L U, so A† = U† L† P and x = Pᵀ (L†)⁻¹ (U†)⁻¹ b.
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // U† is lower triangular: forward substitution, column-oriented.
        for j in 0..n {
            y[j] /= self.lu[(j, j)].conj();
            let yj = y[j];
            let row = self.lu.row(j);
            for i in j + 1..n {
                y[i] -= row[i].conj() * yj;
            }
        }
        // L† is unit upper triangular.
        for j in (0..n).rev() {
            let yj = y[j];
            let row = self.lu.row(j);
            for i in 0..j {
                y[i] -= row[i].conj() * yj;
            }
        }
        let mut x = vec![ZERO; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Solves A X = B column by column.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut out = CMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 13) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 - 2.0)
                + if i == j { C64::new(3.0, 0.0) } else { ZERO }
        })
    }

    #[test]
    fn solve_and_adjoint_solve_round_trip() {
        let a = test_matrix(9);
        let lu = Lu::factor(&a).unwrap();
        let b: Vec<C64> = (0..9).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let x = lu.solve(&b);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-10);
        }
        let y = lu.solve_adjoint(&b);
        let r = a.adjoint().matvec(&y);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = CMatrix::from_fn(3, 3, |i, _| C64::new(i as f64, 0.0));
        assert!(matches!(Lu::factor(&a), Err(Error::Singular { .. })));
    }
}
