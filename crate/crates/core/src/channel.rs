//! Three-channel-state thermalization model.
//!
//! The rotating-frame Hamiltonian is restricted to {|g,0>, |e,0>, |g,1>},
//! diagonalized, and shifted so the bare |g,0> energy sits at zero. Channel
//! populations then follow a classical rate equation with rates Γ_kn, while
//! coherences dephase at half the summed outflow.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::evolve::{build_liouvillian, DensityMatrix, Liouvillian};
use crate::model::{build_h_rotating, rate_thermal, rate_vacuum, BathSpectrum, CollapseSet, SystemParams};
use crate::qop::{expm, herm_eig_matrix, CMatrix, HilbertDims, Lu, Operator, C64, EXCITED, GROUND, ZERO};

/// Magnitude floor for ε_k and Δ_k (rad/µs).
pub const EPS_FLOOR: f64 = 2.0 * PI * 1e-3;

/// Subspace components, in order.
pub const G0: usize = 0;
pub const E0: usize = 1;
pub const G1: usize = 2;

const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelBasis {
    /// ε_k after the reference shift, ascending.
    pub energies: [f64; 3],
    /// Δ_k = ε_k − δ_q.
    pub detunings: [f64; 3],
    /// states[k][c] = <c|μ_k> for c in (g0, e0, g1).
    pub states: [[C64; 3]; 3],
    /// Added to every eigenvalue of the truncated block.
    pub reference_shift: f64,
    /// Set when some |ε_k| or |Δ_k| fell below the floor.
    pub near_singular: bool,
}

impl ChannelBasis {
    /// ε_k with its magnitude floored at `EPS_FLOOR`, sign kept.
    pub fn floored_energy(&self, k: usize) -> f64 {
        floor_signed(self.energies[k])
    }

    pub fn floored_detuning(&self, k: usize) -> f64 {
        floor_signed(self.detunings[k])
    }

    /// |<c|μ_k>|²
    pub fn weight(&self, k: usize, c: usize) -> f64 {
        self.states[k][c].norm_sqr()
    }
}

fn floor_signed(x: f64) -> f64 {
    if x.abs() >= EPS_FLOOR {
        x
    } else if x < 0.0 {
        -EPS_FLOOR
    } else {
        EPS_FLOOR
    }
}

/// Truncated rotating-frame block over (g0, e0, g1).
pub fn truncated_hamiltonian(p: &SystemParams) -> Result<CMatrix> {
    let h = build_h_rotating(p)?;
    let dims = HilbertDims::new(p.fock_dim)?;
    let idx = [dims.index(GROUND, 0), dims.index(EXCITED, 0), dims.index(GROUND, 1)];
    Ok(h.matrix().submatrix(&idx))
}

pub fn channel_states(p: &SystemParams) -> Result<ChannelBasis> {
    let block = truncated_hamiltonian(p)?;
    let shift = -block[(G0, G0)].re;
    let eig = herm_eig_matrix(&block)?;

    let mut order: Vec<usize> = (0..3).collect();
    let scale = eig.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    order.sort_by(|&a, &b| {
        let (ea, eb) = (eig.values[a], eig.values[b]);
        if (ea - eb).abs() <= TIE_TOL * scale {
            eig.vectors[(G0, b)].norm_sqr().total_cmp(&eig.vectors[(G0, a)].norm_sqr())
        } else {
            ea.total_cmp(&eb)
        }
    });

    let mut energies = [0.0; 3];
    let mut detunings = [0.0; 3];
    let mut states = [[ZERO; 3]; 3];
    let mut near_singular = false;
    for (k, &src) in order.iter().enumerate() {
        energies[k] = eig.values[src] + shift;
        detunings[k] = energies[k] - p.delta_q();
        near_singular |= energies[k].abs() < EPS_FLOOR || detunings[k].abs() < EPS_FLOOR;
        for c in 0..3 {
            states[k][c] = eig.vectors[(c, src)];
        }
    }
    Ok(ChannelBasis { energies, detunings, states, reference_shift: shift, near_singular })
}

/// Γ_kn, zero on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRates {
    pub gamma: [[f64; 3]; 3],
}

impl ChannelRates {
    pub fn new(gamma: [[f64; 3]; 3]) -> Result<Self> {
        for (k, row) in gamma.iter().enumerate() {
            for (n, &g) in row.iter().enumerate() {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::Domain(format!(
                        "channel rate [{k}][{n}] must be finite and non-negative, got {g}"
                    )));
                }
                if k == n && g != 0.0 {
                    return Err(Error::Domain(format!("channel rate diagonal [{k}][{k}] must vanish")));
                }
            }
        }
        Ok(Self { gamma })
    }

    /// Σ_n Γ_kn
    pub fn outflow(&self, k: usize) -> f64 {
        self.gamma[k].iter().sum()
    }

    /// Population generator: M_nk = Γ_kn, M_kk = −Σ_n Γ_kn.
    pub fn generator(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for k in 0..3 {
            for n in 0..3 {
                if n != k {
                    m[n][k] = self.gamma[k][n];
                }
            }
            m[k][k] = -self.outflow(k);
        }
        m
    }
}

pub fn channel_rates(b: &ChannelBasis, s: &BathSpectrum, p: &SystemParams) -> ChannelRates {
    let (eta, om) = (p.eta, p.drive);
    let mut gamma = [[0.0; 3]; 3];
    let norm = |k: usize| {
        let (e, d) = (b.floored_energy(k), b.floored_detuning(k));
        1.0 + eta * eta / (d * d) + om * om / (e * e)
    };
    for k in 0..3 {
        for n in 0..3 {
            if k == n {
                continue;
            }
            let (ek, en) = (b.floored_energy(k), b.floored_energy(n));
            let (dk, dn) = (b.floored_detuning(k), b.floored_detuning(n));
            let spectral = rate_thermal(s, en - ek) + rate_thermal(s, ek - en) + rate_vacuum(s, ek - en);
            let amp = eta * (1.0 / dk + 1.0 / dn) + om * (1.0 / ek + 1.0 / en);
            gamma[k][n] = spectral * amp * amp / (norm(k) * norm(n));
        }
    }
    ChannelRates { gamma }
}

/// Density matrix in the |μ_k> basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelState {
    pub rho: DensityMatrix,
}

impl ChannelState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        if rho.dim() != 3 {
            return Err(Error::Dimension(format!("channel state must be 3x3, got dimension {}", rho.dim())));
        }
        Ok(Self { rho })
    }

    /// |g,0><g,0| written in the channel basis.
    pub fn ground(b: &ChannelBasis) -> Self {
        let m = CMatrix::from_fn(3, 3, |j, k| b.states[j][G0].conj() * b.states[k][G0]);
        Self { rho: DensityMatrix::from_matrix_unchecked(m) }
    }

    pub fn populations(&self) -> [f64; 3] {
        let m = self.rho.matrix();
        [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re]
    }
}

#[derive(Clone, Debug)]
pub struct ChannelEvolution {
    pub states: Vec<ChannelState>,
    /// The population generator was defective and exp(Mt) was evaluated directly.
    pub used_expm_fallback: bool,
}

/// Closed-form solution of the channel master equation on `t_grid`.
pub fn evolve_channel(
    b: &ChannelBasis,
    g: &ChannelRates,
    rho0: &ChannelState,
    t_grid: &[f64],
) -> Result<ChannelEvolution> {
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("channel sample times must be finite and non-negative".into()));
    }
    let m0 = rho0.rho.matrix();
    let p0 = rho0.populations();
    let propagator = PopulationPropagator::new(&g.generator())?;
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let p = propagator.apply(t, &p0)?;
        let m = CMatrix::from_fn(3, 3, |j, k| {
            if j == k {
                C64::new(p[j], 0.0)
            } else {
                let rate = 0.5 * (g.outflow(j) + g.outflow(k));
                let phase = C64::new(-rate * t, -(b.energies[j] - b.energies[k]) * t).exp();
                m0[(j, k)] * phase
            }
        });
        states.push(ChannelState { rho: DensityMatrix::from_matrix_unchecked(m) });
    }
    Ok(ChannelEvolution { states, used_expm_fallback: propagator.fallback.is_some() })
}

/// exp(M t) on populations, by eigendecomposition when M is diagonalizable.
struct PopulationPropagator {
    values: [C64; 3],
    vectors: CMatrix,
    inverse: CMatrix,
    fallback: Option<CMatrix>,
}

impl PopulationPropagator {
    fn new(m: &[[f64; 3]; 3]) -> Result<Self> {
        let mc = CMatrix::from_fn(3, 3, |i, j| C64::new(m[i][j], 0.0));
        let scale = mc.max_abs();
        if scale == 0.0 {
            let id = CMatrix::identity(3);
            return Ok(Self { values: [ZERO; 3], vectors: id.clone(), inverse: id, fallback: None });
        }
        // Columns sum to zero, so 0 is an eigenvalue and the characteristic
        // polynomial is λ(λ² − Tλ + S).
        let tr = m[0][0] + m[1][1] + m[2][2];
        let s = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
            - m[1][2] * m[2][1];
        let disc = C64::new(tr * tr - 4.0 * s, 0.0).sqrt();
        let values = [ZERO, (C64::new(tr, 0.0) + disc) * 0.5, (C64::new(tr, 0.0) - disc) * 0.5];

        let mut vectors = CMatrix::zeros(3, 3);
        for (col, &lam) in values.iter().enumerate() {
            let shifted = CMatrix::from_fn(3, 3, |i, j| mc[(i, j)] - if i == j { lam } else { ZERO });
            let v = null_vector(&shifted);
            for i in 0..3 {
                vectors[(i, col)] = v[i];
            }
        }
        let gap = (0..3)
            .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
            .map(|(a, b)| (values[a] - values[b]).norm())
            .fold(f64::INFINITY, f64::min);
        let lu = Lu::factor(&vectors).ok().filter(|lu| lu.pivot_ratio() > 1e-8);
        match lu {
            Some(lu) if gap > 1e-9 * scale => {
                let inverse = lu.solve_matrix(&CMatrix::identity(3));
                Ok(Self { values, vectors, inverse, fallback: None })
            }
            _ => Ok(Self { values, vectors: CMatrix::identity(3), inverse: CMatrix::identity(3), fallback: Some(mc) }),
        }
    }

    fn apply(&self, t: f64, p0: &[f64; 3]) -> Result<[f64; 3]> {
        let p0c: Vec<C64> = p0.iter().map(|&x| C64::new(x, 0.0)).collect();
        let pt = match &self.fallback {
            Some(m) => expm(&m.scale_real(t))?.matvec(&p0c),
            None => {
                let c = self.inverse.matvec(&p0c);
                let evolved: Vec<C64> = c.iter().zip(&self.values).map(|(ci, l)| ci * (l * t).exp()).collect();
                self.vectors.matvec(&evolved)
            }
        };
        Ok([pt[0].re, pt[1].re, pt[2].re])
    }
}

/// Normalized null vector of a rank-2 3×3 matrix: the largest cross product
/// of two rows.
fn null_vector(a: &CMatrix) -> [C64; 3] {
    let row = |i: usize| [a[(i, 0)], a[(i, 1)], a[(i, 2)]];
    let cross =
        |u: [C64; 3], w: [C64; 3]| [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
    let candidates = [cross(row(0), row(1)), cross(row(0), row(2)), cross(row(1), row(2))];
    let best = candidates.into_iter().max_by(|x, y| vec_norm(x).total_cmp(&vec_norm(y))).expect("three candidates");
    let n = vec_norm(&best);
    if n == 0.0 {
        return [C64::new(1.0, 0.0), ZERO, ZERO];
    }
    [best[0] / n, best[1] / n, best[2] / n]
}

fn vec_norm(v: &[C64; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Σ_jk ρ_jk <μ_k|e,0><e,0|μ_j>
pub fn qubit_population_channel(rho: &ChannelState, b: &ChannelBasis) -> f64 {
    let m = rho.rho.matrix();
    let mut acc = ZERO;
    for j in 0..3 {
        for k in 0..3 {
            acc += m[(j, k)] * b.states[k][E0].conj() * b.states[j][E0];
        }
    }
    acc.re
}

/// (1/3) Σ_k Ω² / (Ω² + ε_k²(1 + η²/Δ_k²))
pub fn inversion_formula(drive: f64, eta: f64, energies: &[f64; 3], detunings: &[f64; 3]) -> f64 {
    let om2 = drive * drive;
    (0..3)
        .map(|k| {
            let (e, d) = (floor_signed(energies[k]), floor_signed(detunings[k]));
            om2 / (om2 + e * e * (1.0 + eta * eta / (d * d)))
        })
        .sum::<f64>()
        / 3.0
}

pub fn steady_state_channel(p: &SystemParams) -> Result<f64> {
    let b = channel_states(p)?;
    Ok(inversion_formula(p.drive, p.eta, &b.energies, &b.detunings))
}

#[derive(Clone, Debug)]
pub struct ChannelSteadyReport {
    /// Closed-form inversion.
    pub p_e_formula: f64,
    /// Inversion from the null vector of the population generator.
    pub p_e_rates: f64,
    pub populations: [f64; 3],
    pub near_singular: bool,
}

/// Both steady-state estimates of the channel model.
pub fn channel_steady_report(p: &SystemParams) -> Result<ChannelSteadyReport> {
    let b = channel_states(p)?;
    let g = channel_rates(&b, &p.bath(), p);
    let populations = rate_steady_state(&g)?;
    let p_e_rates = (0..3).map(|k| populations[k] * b.weight(k, E0)).sum();
    Ok(ChannelSteadyReport {
        p_e_formula: inversion_formula(p.drive, p.eta, &b.energies, &b.detunings),
        p_e_rates,
        populations,
        near_singular: b.near_singular,
    })
}

/// Normalized null vector of the population generator.
pub fn rate_steady_state(g: &ChannelRates) -> Result<[f64; 3]> {
    let m = g.generator();
    let mc = CMatrix::from_fn(3, 3, |i, j| C64::new(m[i][j], 0.0));
    let v = null_vector(&mc);
    let total: C64 = v.iter().sum();
    if total.norm() < 1e-300 || mc.max_abs() == 0.0 {
        return Err(Error::DegenerateKernel { smallest: 0.0, second: 0.0 });
    }
    let p = [(v[0] / total).re, (v[1] / total).re, (v[2] / total).re];
    if p.iter().any(|x| *x < -1e-12) {
        return Err(Error::DegenerateKernel { smallest: 0.0, second: 0.0 });
    }
    Ok(p)
}

/// The channel master equation as a Lindblad generator on the 3-dim space:
/// H = diag(ε), jumps |μ_n><μ_k| at rate Γ_kn.
pub fn channel_liouvillian(b: &ChannelBasis, g: &ChannelRates) -> Result<Liouvillian> {
    let h = Operator::single(CMatrix::from_real_diag(&b.energies))?;
    let mut set = CollapseSet::new();
    for k in 0..3 {
        for n in 0..3 {
            if k != n && g.gamma[k][n] > 0.0 {
                let mut jump = CMatrix::zeros(3, 3);
                jump[(n, k)] = C64::new(1.0, 0.0);
                set.push(Operator::single(jump)?, g.gamma[k][n])?;
            }
        }
    }
    build_liouvillian(&h, &set)
}
