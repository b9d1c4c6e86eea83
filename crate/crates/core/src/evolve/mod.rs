//! Lindblad dynamics on the full space: superoperator assembly, adaptive
//! Runge-Kutta evolution, exact propagation and steady states.
//!
//! Density matrices are vectorized column by column, `v[i + d·j] = ρ[i, j]`.

mod dopri;
mod sparse;
mod steady;

pub use dopri::{integrate, DopriOptions, DopriOutput};
pub use sparse::CsrMatrix;
pub use steady::{steady_state, steady_state_report, SteadyState};

use crate::error::{Error, Result};
use crate::model::CollapseSet;
use crate::qop::{expect, expm_apply, herm_eig_matrix, CMatrix, Dims, Operator, C64, I, ZERO};

pub const TRACE_TOL: f64 = 1e-8;
pub const HERM_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Trace-one, Hermitian, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let rho = Self { matrix };
        let herm = rho.hermiticity_error();
        if herm > HERM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian: ||rho - rho^dag||_F = {herm:.3e}")));
        }
        let tr = rho.trace_error();
        if tr > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace deviates from 1 by {tr:.3e}")));
        }
        let min = rho.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    /// Wraps a matrix without checking the state invariants. Used for
    /// integrator samples, whose deviations are reported rather than rejected.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// |ψ><ψ| for a normalized ψ.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Self::new(CMatrix::outer(psi, psi))
    }

    /// |k><k| in dimension d.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::Dimension(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: CMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace_error(&self) -> f64 {
        (self.matrix.trace() - C64::new(1.0, 0.0)).norm()
    }

    /// ‖ρ − ρ†‖_F
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let n = m.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let e = herm_eig_matrix(&self.matrix.hermitian_part())?;
        Ok(e.values.first().copied().unwrap_or(0.0))
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

pub fn vectorize(rho: &CMatrix) -> Result<Vec<C64>> {
    if !rho.is_square() {
        return Err(Error::Dimension(format!("cannot vectorize a {}x{} matrix", rho.rows(), rho.cols())));
    }
    let d = rho.rows();
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        for i in 0..d {
            v[i + d * j] = rho[(i, j)];
        }
    }
    Ok(v)
}

pub fn unvectorize(v: &[C64]) -> Result<CMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(Error::Dimension(format!("vector length {} is not a perfect square", v.len())));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| v[i + d * j]))
}

/// Superoperator acting on column-stacked density matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    matrix: CMatrix,
    d: usize,
}

impl Liouvillian {
    /// Wraps a d²×d² generator; the caller vouches for trace preservation.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.rows();
        let d = (n as f64).sqrt().round() as usize;
        if !matrix.is_square() || d * d != n {
            return Err(Error::Dimension(format!("Liouvillian must be d^2 x d^2, got {}x{}", n, matrix.cols())));
        }
        Ok(Self { matrix, d })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hilbert_dim(&self) -> usize {
        self.d
    }

    /// max over columns of |Σ_i L[(i,i), col]|, zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.d;
        (0..d * d).map(|col| (0..d).map(|i| self.matrix[(i + d * i, col)]).sum::<C64>().norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.d {
            return Err(Error::Dimension(format!("state dimension {} does not match {}", rho.rows(), self.d)));
        }
        unvectorize(&self.matrix.matvec(&vectorize(rho)?))
    }
}

/// L = −i(I⊗H − Hᵀ⊗I) + Σ r [C̄⊗C − ½ I⊗C†C − ½ (C†C)ᵀ⊗I].
pub fn build_liouvillian(h: &Operator, c: &CollapseSet) -> Result<Liouvillian> {
    let d = h.side();
    let hm = h.matrix();
    let asym = hm.hermiticity_error();
    if asym > HERM_TOL {
        return Err(Error::NotHermitian(asym));
    }
    for (op, _) in c.entries() {
        if op.side() != d {
            return Err(Error::Dimension(format!(
                "collapse operator side {} does not match Hamiltonian side {d}",
                op.side()
            )));
        }
    }

    let n = d * d;
    let mut l = CMatrix::zeros(n, n);
    let idx = |i: usize, j: usize| i + d * j;

    // dρ_ij gets −i Σ_k H_ik ρ_kj + i Σ_l ρ_il H_lj
    for j in 0..d {
        for i in 0..d {
            for k in 0..d {
                let hik = hm[(i, k)];
                if hik != ZERO {
                    l[(idx(i, j), idx(k, j))] += -I * hik;
                }
                let hkj = hm[(k, j)];
                if hkj != ZERO {
                    l[(idx(i, j), idx(i, k))] += I * hkj;
                }
            }
        }
    }

    for (op, rate) in c.entries() {
        if *rate == 0.0 {
            continue;
        }
        let cm = op.matrix();
        let cdc = cm.adjoint().matmul(cm);
        let nz: Vec<(usize, usize, C64)> = (0..d)
            .flat_map(|i| (0..d).map(move |k| (i, k)))
            .filter(|&(i, k)| cm[(i, k)] != ZERO)
            .map(|(i, k)| (i, k, cm[(i, k)]))
            .collect();
        // r C ρ C†: ρ_kl → ρ_ij with weight C_ik conj(C_jl)
        for &(i, k, cik) in &nz {
            for &(j, ll, cjl) in &nz {
                l[(idx(i, j), idx(k, ll))] += cik * cjl.conj() * *rate;
            }
        }
        let half = -0.5 * rate;
        for j in 0..d {
            for i in 0..d {
                for k in 0..d {
                    let a = cdc[(i, k)];
                    if a != ZERO {
                        l[(idx(i, j), idx(k, j))] += a * half;
                    }
                    let b = cdc[(k, j)];
                    if b != ZERO {
                        l[(idx(i, j), idx(i, k))] += b * half;
                    }
                }
            }
        }
    }
    Ok(Liouvillian { matrix: l, d })
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub trace_err_max: f64,
    pub herm_err_max: f64,
    pub min_eig_min: f64,
    pub steps_taken: usize,
    pub final_state: DensityMatrix,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Domain(format!("tolerance must lie in [1e-12, 1e-4], got {tol}")));
    }
    Ok(())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("time grid must be finite, ascending and start at t >= 0".into()));
    }
    Ok(())
}

/// States at each grid time under ρ̇ = L ρ, integrated from t = 0, plus the
/// number of accepted steps.
pub fn evolve_states(l: &Liouvillian, rho0: &DensityMatrix, t_grid: &[f64], tol: f64) -> Result<(Vec<CMatrix>, usize)> {
    check_tol(tol)?;
    check_grid(t_grid)?;
    if rho0.dim() != l.hilbert_dim() {
        return Err(Error::Dimension(format!("state dimension {} does not match {}", rho0.dim(), l.hilbert_dim())));
    }
    let csr =
        CsrMatrix::from_superoperator(l.matrix(), l.hilbert_dim()).unwrap_or_else(|| CsrMatrix::from_dense(l.matrix()));
    let y0 = vectorize(rho0.matrix())?;
    let out = integrate(|_, y, dy| csr.matvec_into(y, dy), 0.0, &y0, t_grid, DopriOptions::with_tol(tol))?;
    let states = out.samples.iter().map(|v| unvectorize(v)).collect::<Result<Vec<_>>>()?;
    Ok((states, out.steps_taken))
}

/// Adaptive Dormand-Prince evolution of ρ under H and the collapse set,
/// sampled on `t_grid`, with P_e = Tr[(|e><e|⊗I) ρ].
pub fn evolve_adaptive(
    h: &Operator,
    c: &CollapseSet,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    tol: f64,
) -> Result<EvolutionResult> {
    let l = build_liouvillian(h, c)?;
    let (states, steps) = evolve_states(&l, rho0, t_grid, tol)?;
    summarize(h.dims(), t_grid, states, steps)
}

/// Adaptive evolution under a time-dependent Hamiltonian H(t). Slow (the
/// generator is rebuilt at every stage); meant for short validation windows.
pub fn evolve_time_dependent<F>(
    h: F,
    dims: Dims,
    c: &CollapseSet,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    tol: f64,
) -> Result<EvolutionResult>
where
    F: Fn(f64) -> Result<Operator>,
{
    check_tol(tol)?;
    check_grid(t_grid)?;
    let d = dims.total();
    if rho0.dim() != d {
        return Err(Error::Dimension(format!("state dimension {} does not match {d}", rho0.dim())));
    }
    let dissipators = build_liouvillian(&Operator::identity(dims).scale_real(0.0), c)?;
    let dissipators = CsrMatrix::from_dense(dissipators.matrix());
    let mut failure = None;
    let mut tmp = vec![ZERO; d * d];
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        dissipators.matvec_into(y, dy);
        let hm = match h(t) {
            Ok(op) => op.into_matrix(),
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        // −i(Hρ − ρH) on the column-stacked vector
        for j in 0..d {
            for i in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += hm[(i, k)] * y[k + d * j] - y[i + d * k] * hm[(k, j)];
                }
                tmp[i + d * j] = acc;
            }
        }
        for (a, b) in dy.iter_mut().zip(&tmp) {
            *a += -I * b;
        }
    };
    let y0 = vectorize(rho0.matrix())?;
    let out = integrate(rhs, 0.0, &y0, t_grid, DopriOptions::with_tol(tol))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let states = out.samples.iter().map(|v| unvectorize(v)).collect::<Result<Vec<_>>>()?;
    summarize(dims, t_grid, states, out.steps_taken)
}

fn summarize(dims: Dims, t_grid: &[f64], states: Vec<CMatrix>, steps: usize) -> Result<EvolutionResult> {
    let pe_op = Operator::excited_projector(dims)?;
    let mut p_e = Vec::with_capacity(states.len());
    let mut trace_err_max: f64 = 0.0;
    let mut herm_err_max: f64 = 0.0;
    let mut min_eig_min = f64::INFINITY;
    for s in &states {
        let rho = DensityMatrix::from_matrix_unchecked(s.clone());
        p_e.push(expect(&pe_op, s)?.re);
        trace_err_max = trace_err_max.max(rho.trace_error());
        herm_err_max = herm_err_max.max(rho.hermiticity_error());
        min_eig_min = min_eig_min.min(rho.min_eigenvalue()?);
    }
    let final_state = DensityMatrix::from_matrix_unchecked(states.into_iter().last().expect("grid is non-empty"));
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        p_e,
        trace_err_max,
        herm_err_max,
        min_eig_min,
        steps_taken: steps,
        final_state,
    })
}

/// ρ(t) = unvec(exp(L t)·vec(ρ0)).
pub fn propagate_expm(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("propagation time must be finite and non-negative, got {t}")));
    }
    if rho0.dim() != l.hilbert_dim() {
        return Err(Error::Dimension(format!("state dimension {} does not match {}", rho0.dim(), l.hilbert_dim())));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let v = expm_apply(l.matrix(), t, &vectorize(rho0.matrix())?)?;
    Ok(DensityMatrix::from_matrix_unchecked(unvectorize(&v)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h_bare_qubit, build_h_rotating, collapse_set_bare, collapse_set_full, SystemParams};
    use crate::qop::{pauli, HilbertDims, Pauli, EXCITED};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(d: usize, seed: u64) -> DensityMatrix {
        // Small LCG; a Gram matrix A·A† normalized to trace one.
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(d, d, |_, _| c(next(), next()));
        let g = a.matmul(&a.adjoint());
        let tr = g.trace().re;
        DensityMatrix::new(g.scale_real(1.0 / tr)).unwrap()
    }

    fn single(op: Operator, rate: f64) -> CollapseSet {
        let mut set = CollapseSet::new();
        set.push(op, rate).unwrap();
        set
    }

    #[test]
    fn vectorize_round_trip() {
        let half = DensityMatrix::maximally_mixed(2);
        assert_eq!(vectorize(half.matrix()).unwrap(), vec![c(0.5, 0.0), ZERO, ZERO, c(0.5, 0.0)]);
        let rho = random_state(3, 7);
        let back = unvectorize(&vectorize(rho.matrix()).unwrap()).unwrap();
        assert_eq!(&back, rho.matrix());
        let m = CMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64));
        assert_eq!(vectorize(&m).unwrap()[1], m[(1, 0)]);
        assert!(unvectorize(&[ZERO; 5]).is_err());
        assert!(vectorize(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        let nonherm = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                c(0.1, 0.0)
            } else if i == j {
                c(0.5, 0.0)
            } else {
                ZERO
            }
        });
        assert!(DensityMatrix::new(nonherm).is_err());
        assert!(DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).is_ok());
    }

    /// Same superoperator assembled from explicit Kronecker products.
    fn liouvillian_by_kron(h: &CMatrix, c: &[(CMatrix, f64)]) -> CMatrix {
        let d = h.rows();
        let id = CMatrix::identity(d);
        let mut l = (&id.kron(h) - &h.transpose().kron(&id)).scale(-I);
        for (cm, r) in c {
            let cdc = cm.adjoint().matmul(cm);
            let term =
                &(&cm.conj().kron(cm) - &id.kron(&cdc).scale_real(0.5)) - &cdc.transpose().kron(&id).scale_real(0.5);
            l = &l + &term.scale_real(*r);
        }
        l
    }

    #[test]
    fn assembly_matches_kron_formula() {
        let p = SystemParams {
            fock_dim: 3,
            t_bath: 0.2,
            qubit_thermal: true,
            dephasing: 0.3,
            ..SystemParams::thermalization_defaults()
        };
        let h = build_h_rotating(&p).unwrap();
        let set = collapse_set_full(&p).unwrap();
        let l = build_liouvillian(&h, &set).unwrap();
        let pairs: Vec<(CMatrix, f64)> = set.entries().iter().map(|(o, r)| (o.matrix().clone(), *r)).collect();
        let reference = liouvillian_by_kron(h.matrix(), &pairs);
        assert!(l.matrix().max_abs_diff(&reference) < 1e-12);
        assert!(l.trace_defect() < 1e-12);
    }

    #[test]
    fn closed_qubit_spectrum() {
        let h = pauli(Pauli::Z).scale_real(0.5);
        let l = build_liouvillian(&h, &CollapseSet::new()).unwrap();
        let diag: Vec<C64> = l.matrix().diagonal();
        // σz/2 generator is diagonal with entries 0, i, −i, 0.
        let mut im: Vec<f64> = diag.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert_eq!(im, vec![-1.0, 0.0, 0.0, 1.0]);
        assert!(diag.iter().all(|z| z.re == 0.0));
        assert!(l.matrix().max_abs_diff(&CMatrix::from_fn(4, 4, |i, j| if i == j { diag[i] } else { ZERO })) == 0.0);
    }

    #[test]
    fn trace_preserved_on_random_states() {
        let p = SystemParams { fock_dim: 3, ..SystemParams::thermalization_defaults() };
        let l = build_liouvillian(&build_h_rotating(&p).unwrap(), &collapse_set_full(&p).unwrap()).unwrap();
        for seed in 0..5 {
            let rho = random_state(6, seed);
            let drho = l.apply(rho.matrix()).unwrap();
            assert!(drho.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let h = pauli(Pauli::Z);
        let set = single(Operator::identity(Dims::Single(3)), 1.0);
        assert!(build_liouvillian(&h, &set).is_err());
    }

    #[test]
    fn amplitude_damping_decay() {
        let gamma = 1.0 / 5.2;
        let h = Operator::single(CMatrix::zeros(2, 2)).unwrap();
        let set = single(pauli(Pauli::Minus), gamma);
        let rho0 = DensityMatrix::basis(2, EXCITED).unwrap();
        let grid = [0.0, 1.0, 2.6, 5.2];
        let r = evolve_adaptive(&h, &set, &rho0, &grid, 1e-10).unwrap();
        for (t, pe) in grid.iter().zip(&r.p_e) {
            assert!((pe - (-gamma * t).exp()).abs() < 1e-8);
        }
        assert!((r.p_e[3] - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn bare_qubit_decay_with_rabi_params() {
        let p = SystemParams { drive: 0.0, ..SystemParams::rabi_defaults() };
        let h = build_h_bare_qubit(&p).unwrap();
        let set = collapse_set_bare(&p).unwrap();
        let r = evolve_adaptive(&h, &set, &DensityMatrix::basis(2, EXCITED).unwrap(), &[0.0, 5.2], 1e-10).unwrap();
        assert!((r.p_e[1] - 0.36788).abs() < 1e-5);
    }

    #[test]
    fn closed_evolution_matches_expm() {
        let p = SystemParams { fock_dim: 3, ..SystemParams::thermalization_defaults() };
        let h = build_h_rotating(&p).unwrap();
        let l = build_liouvillian(&h, &CollapseSet::new()).unwrap();
        let rho0 = random_state(6, 3);
        let grid: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();
        let r = evolve_adaptive(&h, &CollapseSet::new(), &rho0, &grid, 1e-10).unwrap();
        let pe = Operator::excited_projector(h.dims()).unwrap();
        for (t, p_rk) in grid.iter().zip(&r.p_e) {
            let exact = expect(&pe, propagate_expm(&l, &rho0, *t).unwrap()).unwrap().re;
            assert!((p_rk - exact).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn expm_periodicity_and_identity() {
        let h = pauli(Pauli::Z).scale_real(0.5);
        let l = build_liouvillian(&h, &CollapseSet::new()).unwrap();
        let rho0 = DensityMatrix::pure(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        assert_eq!(propagate_expm(&l, &rho0, 0.0).unwrap(), rho0);
        let back = propagate_expm(&l, &rho0, 2.0 * std::f64::consts::PI).unwrap();
        assert!(back.matrix().max_abs_diff(rho0.matrix()) < 1e-12);
        assert!(propagate_expm(&l, &rho0, -1.0).is_err());
    }

    #[test]
    fn open_evolution_matches_expm() {
        let p = SystemParams { fock_dim: 3, t_bath: 0.1, ..SystemParams::thermalization_defaults() };
        let h = build_h_rotating(&p).unwrap();
        let set = collapse_set_full(&p).unwrap();
        let l = build_liouvillian(&h, &set).unwrap();
        let rho0 = random_state(6, 11);
        let grid: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
        let r = evolve_adaptive(&h, &set, &rho0, &grid, 1e-10).unwrap();
        for (t, s) in grid.iter().zip(0..) {
            let exact = propagate_expm(&l, &rho0, *t).unwrap();
            let pe = Operator::excited_projector(h.dims()).unwrap();
            assert!((r.p_e[s] - expect(&pe, &exact).unwrap().re).abs() < 1e-8);
        }
        assert!(r.trace_err_max < 1e-8);
        assert!(r.herm_err_max < 1e-8);
        assert!(r.min_eig_min > -1e-8);
    }

    #[test]
    fn tolerance_and_grid_checked() {
        let h = pauli(Pauli::Z);
        let rho0 = DensityMatrix::maximally_mixed(2);
        let set = CollapseSet::new();
        assert!(evolve_adaptive(&h, &set, &rho0, &[0.0, 1.0], 1e-3).is_err());
        assert!(evolve_adaptive(&h, &set, &rho0, &[0.0, 1.0], 1e-13).is_err());
        assert!(evolve_adaptive(&h, &set, &rho0, &[1.0, 0.5], 1e-8).is_err());
        assert!(evolve_adaptive(&h, &set, &rho0, &[], 1e-8).is_err());
    }

    #[test]
    fn lab_and_rotating_frames_agree() {
        // A carrier low enough to integrate in the lab frame quickly; the
        // excited population is frame independent.
        let p = SystemParams {
            omega_q: 2.0 * std::f64::consts::PI * 60.0,
            omega_r: 2.0 * std::f64::consts::PI * 57.0,
            omega_d: 2.0 * std::f64::consts::PI * 59.0,
            eta: 2.0 * std::f64::consts::PI * 2.0,
            drive: 2.0 * std::f64::consts::PI * 2.0,
            fock_dim: 4,
            ..SystemParams::thermalization_defaults()
        };
        let dims = Dims::Composite(HilbertDims::new(4).unwrap());
        let set = collapse_set_full(&p).unwrap();
        let rho0 = DensityMatrix::basis(8, HilbertDims::new(4).unwrap().index(EXCITED, 0)).unwrap();
        let grid: Vec<f64> = (0..=6).map(|k| 0.05 * k as f64).collect();
        let rot = evolve_adaptive(&build_h_rotating(&p).unwrap(), &set, &rho0, &grid, 1e-10).unwrap();
        let lab = evolve_time_dependent(|t| crate::model::build_h_lab(&p, t), dims, &set, &rho0, &grid, 1e-10).unwrap();
        for (a, b) in rot.p_e.iter().zip(&lab.p_e) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}
