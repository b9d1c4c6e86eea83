use crate::qop::{CMatrix, C64};

/// Compressed-sparse-row copy of a dense matrix, exact zeros dropped.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n_rows: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut row_ptr = Vec::with_capacity(m.rows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..m.rows() {
            for (j, v) in m.row(i).iter().enumerate() {
                if *v != C64::default() {
                    cols.push(j);
                    vals.push(*v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n_rows: m.rows(), row_ptr, cols, vals }
    }

    /// CSR form of a superoperator on column-stacked d×d matrices that maps
    /// Hermitian matrices to Hermitian matrices exactly in floating point.
    ///
    /// Row (j,i) is stored as the entrywise mirror of row (i,j), in the same
    /// order, and diagonal rows pair each (k,l) with (l,k); products then
    /// round identically on both sides of the diagonal. Returns `None` when
    /// the matrix lacks the exact symmetry L[(i,j),(k,l)] = conj L[(j,i),(l,k)].
    pub fn from_superoperator(m: &CMatrix, d: usize) -> Option<Self> {
        let n = d * d;
        if m.rows() != n || m.cols() != n {
            return None;
        }
        let mirror = |r: usize| (r % d) * d + r / d;
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
        for r in 0..n {
            let (i, j) = (r % d, r / d);
            if i < j {
                let entries: Vec<(usize, C64)> =
                    m.row(r).iter().enumerate().filter(|(_, v)| **v != C64::default()).map(|(c, v)| (c, *v)).collect();
                let mirrored: Vec<(usize, C64)> = entries.iter().map(|&(c, v)| (mirror(c), v.conj())).collect();
                rows[mirror(r)] = mirrored;
                rows[r] = entries;
            } else if i == j {
                let mut entries = Vec::new();
                for c in 0..n {
                    let mc = mirror(c);
                    if mc < c {
                        continue;
                    }
                    let v = m[(r, c)];
                    if mc == c {
                        if v.im != 0.0 {
                            return None;
                        }
                        if v != C64::default() {
                            entries.push((c, v));
                        }
                    } else if m[(r, mc)] != v.conj() {
                        return None;
                    } else if v != C64::default() {
                        entries.push((c, v));
                        entries.push((mc, m[(r, mc)]));
                    }
                }
                rows[r] = entries;
            }
        }
        // Every stored row must reproduce the dense matrix exactly.
        for (r, entries) in rows.iter().enumerate() {
            let nnz = m.row(r).iter().filter(|v| **v != C64::default()).count();
            if entries.iter().filter(|(_, v)| *v != C64::default()).count() != nnz {
                return None;
            }
            if entries.iter().any(|&(c, v)| m[(r, c)] != v) {
                return None;
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for entries in rows {
            for (c, v) in entries {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Some(Self { n_rows: n, row_ptr, cols, vals })
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for i in 0..self.n_rows {
            let mut acc = C64::default();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superoperator_form_preserves_hermiticity_exactly() {
        let d = 3;
        // ρ ↦ AρA† in superoperator form: L[(i,j),(k,l)] = A_ik conj(A_jl).
        let a = CMatrix::from_fn(d, d, |i, k| {
            C64::new(0.3 + i as f64 * 0.7 - k as f64 * 0.11, (i * k) as f64 * 0.13 - 0.05)
        });
        let l = CMatrix::from_fn(d * d, d * d, |r, c| a[(r % d, c % d)] * a[(r / d, c / d)].conj());
        let csr = CsrMatrix::from_superoperator(&l, d).expect("symmetric superoperator");
        let h = CMatrix::from_fn(d, d, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => C64::new(0.2 + i as f64, 0.0),
            std::cmp::Ordering::Less => C64::new(0.1 * (i + 2 * j) as f64, 0.37 * (j - i) as f64),
            std::cmp::Ordering::Greater => C64::new(0.1 * (j + 2 * i) as f64, -0.37 * (i - j) as f64),
        });
        let x: Vec<C64> = (0..d * d).map(|r| h[(r % d, r / d)]).collect();
        let mut y = vec![C64::default(); d * d];
        csr.matvec_into(&x, &mut y);
        for i in 0..d {
            for j in 0..d {
                assert_eq!(y[i + d * j], y[j + d * i].conj());
            }
        }
        let dense = l.matvec(&x);
        for (u, v) in y.iter().zip(&dense) {
            assert!((u - v).norm() < 1e-13);
        }
        let mut broken = l.clone();
        broken[(1, 0)] += C64::new(1e-3, 0.0);
        assert!(CsrMatrix::from_superoperator(&broken, d).is_none());
    }

    #[test]
    fn matches_dense_product() {
        let m =
            CMatrix::from_fn(
                4,
                3,
                |i, j| {
                    if (i + j) % 2 == 0 {
                        C64::new(i as f64 + 1.0, j as f64)
                    } else {
                        C64::default()
                    }
                },
            );
        let x = vec![C64::new(1.0, -1.0), C64::new(0.5, 2.0), C64::new(-3.0, 0.0)];
        let csr = CsrMatrix::from_dense(&m);
        assert_eq!(csr.nnz(), 6);
        let mut y = vec![C64::default(); 4];
        csr.matvec_into(&x, &mut y);
        let expected = m.matvec(&x);
        for (a, b) in y.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
