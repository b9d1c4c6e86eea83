//! Dense complex linear algebra and the standard qubit/oscillator operators.
//!
//! Composite states are ordered qubit-major: `|q, n> ↦ q·fock_dim + n`
//! with `q = 0` for the excited state `|e>` and `q = 1` for `|g>`.

mod eig;
mod expm;
mod lu;
mod matrix;

pub use eig::{herm_eig_matrix, HermEigen, HERMITIAN_TOL};
pub use expm::{expm, expm_apply};
pub use lu::Lu;
#[cfg(test)]
pub(crate) use matrix::ONE;
pub use matrix::{CMatrix, C64};
pub(crate) use matrix::{I, ZERO};

use crate::error::{Error, Result};

/// Qubit index of the excited state.
pub const EXCITED: usize = 0;
/// Qubit index of the ground state.
pub const GROUND: usize = 1;

/// Qubit ⊗ truncated oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertDims {
    fock_dim: usize,
}

impl HilbertDims {
    pub const QUBIT_DIM: usize = 2;

    pub fn new(fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::Dimension(format!("fock_dim must be at least 2, got {fock_dim}")));
        }
        Ok(Self { fock_dim })
    }

    pub fn qubit_dim(&self) -> usize {
        Self::QUBIT_DIM
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn total(&self) -> usize {
        Self::QUBIT_DIM * self.fock_dim
    }

    /// Composite index of |q, n>.
    pub fn index(&self, qubit: usize, photons: usize) -> usize {
        debug_assert!(qubit < 2 && photons < self.fock_dim);
        qubit * self.fock_dim + photons
    }
}

/// Subsystem tag carried by an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dims {
    /// Qubit ⊗ oscillator.
    Composite(HilbertDims),
    /// A single subsystem of the given dimension.
    Single(usize),
}

impl Dims {
    pub fn total(&self) -> usize {
        match self {
            Dims::Composite(h) => h.total(),
            Dims::Single(n) => *n,
        }
    }
}

/// Square matrix tagged with its Hilbert-space structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    dims: Dims,
}

impl Operator {
    pub fn new(matrix: CMatrix, dims: Dims) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dims.total() {
            return Err(Error::Dimension(format!(
                "operator of shape {}x{} does not match dimension {}",
                matrix.rows(),
                matrix.cols(),
                dims.total()
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn single(matrix: CMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, Dims::Single(n))
    }

    pub fn identity(dims: Dims) -> Self {
        Self { matrix: CMatrix::identity(dims.total()), dims }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { matrix: self.matrix.scale(s), dims: self.dims }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, dims: self.dims })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, dims: self.dims })
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { matrix: self.matrix.matmul(&other.matrix), dims: self.dims })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { matrix: self.matrix.commutator(&other.matrix), dims: self.dims })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.hermiticity_error() <= tol
    }

    /// |e><e| on the qubit factor, identity on the rest.
    pub fn excited_projector(dims: Dims) -> Result<Operator> {
        match dims {
            Dims::Composite(h) => {
                let pe = CMatrix::from_real_diag(&[1.0, 0.0]);
                Ok(Operator { matrix: pe.kron(&CMatrix::identity(h.fock_dim())), dims })
            }
            Dims::Single(2) => Ok(Operator { matrix: CMatrix::from_real_diag(&[1.0, 0.0]), dims }),
            Dims::Single(n) => Err(Error::Dimension(format!("no qubit factor in a {n}-dimensional space"))),
        }
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.side() != other.side() {
            return Err(Error::Dimension(format!("operator sizes differ: {} vs {}", self.side(), other.side())));
        }
        Ok(())
    }
}

/// Tensor product. A 2-level operator times a single oscillator operator is
/// tagged as a composite qubit ⊗ oscillator operator.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let matrix = a.matrix.kron(&b.matrix);
    let dims = match (a.dims, b.dims) {
        (Dims::Single(2), Dims::Single(n)) if n >= 2 => Dims::Composite(HilbertDims { fock_dim: n }),
        _ => Dims::Single(matrix.rows()),
    };
    Operator { matrix, dims }
}

/// Truncated annihilation operator: a[m−1, m] = √m.
pub fn annihilation(n: usize) -> Result<Operator> {
    if n < 2 {
        return Err(Error::Dimension(format!("annihilation operator needs n >= 2, got {n}")));
    }
    let mut m = CMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(Operator { matrix: m, dims: Dims::Single(n) })
}

pub fn dagger(a: &Operator) -> Operator {
    Operator { matrix: a.matrix.adjoint(), dims: a.dims }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    Z,
    X,
    Plus,
    Minus,
}

/// Qubit operators in the (|e>, |g>) basis.
pub fn pauli(which: Pauli) -> Operator {
    let (a, b, c, d) = match which {
        Pauli::Z => (1.0, 0.0, 0.0, -1.0),
        Pauli::X => (0.0, 1.0, 1.0, 0.0),
        Pauli::Plus => (0.0, 1.0, 0.0, 0.0),
        Pauli::Minus => (0.0, 0.0, 1.0, 0.0),
    };
    let m = CMatrix::from_fn(2, 2, |i, j| C64::new([[a, b], [c, d]][i][j], 0.0));
    Operator { matrix: m, dims: Dims::Single(2) }
}

/// Hermitian eigendecomposition of an operator.
pub fn herm_eig(h: &Operator) -> Result<HermEigen> {
    herm_eig_matrix(&h.matrix)
}

/// Tr(op·ρ).
pub fn expect(op: &Operator, rho: impl AsRef<CMatrix>) -> Result<C64> {
    let rho = rho.as_ref();
    let n = op.side();
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::Dimension(format!(
            "operator side {n} does not match state of shape {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let m = &op.matrix;
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += m[(i, k)] * rho[(k, i)];
        }
    }
    Ok(acc)
}

impl AsRef<CMatrix> for CMatrix {
    fn as_ref(&self) -> &CMatrix {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: usize) -> Operator {
        Operator::identity(Dims::Single(n))
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&id(2), &id(3)).matrix(), &CMatrix::identity(6));
        let z = kron(&pauli(Pauli::Z), &id(2));
        assert_eq!(z.matrix(), &CMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(z.dims(), Dims::Composite(HilbertDims::new(2).unwrap()));
    }

    #[test]
    fn kron_sigma_plus_annihilation_single_entry() {
        // σ+ = |e><g| is (0,1); a(2) = |0><1| is (0,1): single entry at (0·2+0, 1·2+1).
        let k = kron(&pauli(Pauli::Plus), &annihilation(2).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (0, 3) { ONE } else { ZERO };
                assert_eq!(k.matrix()[(i, j)], expected);
            }
        }
    }

    #[test]
    fn annihilation_entries() {
        assert!(annihilation(1).is_err());
        let a2 = annihilation(2).unwrap();
        assert_eq!(a2.matrix()[(0, 1)], ONE);
        let a3 = annihilation(3).unwrap();
        assert!((a3.matrix()[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let num = dagger(&a3).mul(&a3).unwrap();
        assert!(num.matrix().max_abs_diff(&CMatrix::from_real_diag(&[0.0, 1.0, 2.0])) < 1e-14);
    }

    #[test]
    fn dagger_cases() {
        let a = annihilation(4).unwrap();
        assert_eq!(dagger(&dagger(&a)), a);
        assert_eq!(dagger(&pauli(Pauli::Minus)), pauli(Pauli::Plus));
        let ii = id(3).scale(I);
        assert_eq!(dagger(&ii), id(3).scale(-I));
    }

    #[test]
    fn pauli_algebra() {
        let (p, m, z) = (pauli(Pauli::Plus), pauli(Pauli::Minus), pauli(Pauli::Z));
        assert_eq!(p.commutator(&m).unwrap(), z);
        assert_eq!(z.mul(&z).unwrap().matrix(), &CMatrix::identity(2));
        assert_eq!(p.mul(&p).unwrap().matrix(), &CMatrix::zeros(2, 2));
    }

    #[test]
    fn herm_eig_sigma_z() {
        let e = herm_eig(&pauli(Pauli::Z)).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn expect_cases() {
        let half = CMatrix::identity(2).scale_real(0.5);
        assert!((expect(&id(2), &half).unwrap() - ONE).norm() < 1e-15);
        assert!(expect(&pauli(Pauli::Z), &half).unwrap().norm() < 1e-15);
        let pe = CMatrix::from_real_diag(&[1.0, 0.0]);
        let op = Operator::single(pe.clone()).unwrap();
        assert_eq!(expect(&op, &pe).unwrap(), ONE);
        assert!(expect(&id(3), &half).is_err());
    }

    #[test]
    fn excited_projector_layout() {
        let dims = Dims::Composite(HilbertDims::new(3).unwrap());
        let p = Operator::excited_projector(dims).unwrap();
        assert_eq!(p.matrix(), &CMatrix::from_real_diag(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]));
        assert!(Operator::excited_projector(Dims::Single(3)).is_err());
    }
}
