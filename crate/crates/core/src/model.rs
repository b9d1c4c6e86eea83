//! Physical model: driven Jaynes-Cummings Hamiltonians, bath spectral rates
//! and the Lindblad collapse set of the qubit-resonator-bath system.
//!
//! Units: angular frequencies in rad/µs, times in µs, temperatures in K.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qop::{annihilation, dagger, kron, pauli, CMatrix, Dims, HilbertDims, Operator, Pauli, C64};

/// ħ/k_B in K·µs.
pub const HBAR_OVER_KB: f64 = 7.6382e-6;

/// Lower bound on |ω| when evaluating thermal occupations (rad/µs).
pub const OMEGA_FLOOR: f64 = 2.0 * PI * 1e-4;

/// f [GHz] → ω [rad/µs]
pub fn ghz(f: f64) -> f64 {
    2.0 * PI * 1e3 * f
}

/// f [MHz] → ω [rad/µs]
pub fn mhz(f: f64) -> f64 {
    2.0 * PI * f
}

/// ω [rad/µs] → f [GHz]
pub fn to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e3)
}

/// ω [rad/µs] → f [MHz]
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub omega_q: f64,
    pub omega_r: f64,
    pub omega_d: f64,
    /// Qubit-resonator coupling.
    pub eta: f64,
    /// Drive strength Ω.
    pub drive: f64,
    /// Resonator FWHM linewidth (1/µs).
    pub gamma_r: f64,
    pub t1: f64,
    pub t_bath: f64,
    pub fock_dim: usize,
    /// Adds σ+ at rate n̄_q/T1.
    pub qubit_thermal: bool,
    /// Pure dephasing rate γ_φ (1/µs); zero disables it.
    pub dephasing: f64,
    pub hbar_over_kb: f64,
}

impl SystemParams {
    /// Near-resonant thermalization operating point, η/2π = 2 MHz.
    pub fn thermalization_defaults() -> Self {
        Self {
            omega_q: ghz(5.448),
            omega_r: ghz(5.445),
            omega_d: ghz(5.45),
            eta: mhz(2.0),
            drive: mhz(2.0),
            gamma_r: mhz(1.2),
            t1: 5.2,
            t_bath: 0.020,
            fock_dim: 15,
            qubit_thermal: false,
            dephasing: 0.0,
            hbar_over_kb: HBAR_OVER_KB,
        }
    }

    /// Qubit-resonant drive far from the resonator (bare Rabi case).
    pub fn rabi_defaults() -> Self {
        Self { omega_q: ghz(5.46), omega_d: ghz(5.46), drive: mhz(5.2), ..Self::thermalization_defaults() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_q", self.omega_q),
            ("omega_r", self.omega_r),
            ("omega_d", self.omega_d),
            ("gamma_r", self.gamma_r),
            ("t1", self.t1),
            ("hbar_over_kb", self.hbar_over_kb),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        // Zero coupling or drive are the decoupled/undriven limits.
        for (name, v) in [("eta", self.eta), ("drive", self.drive)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !(self.t_bath.is_finite() && self.t_bath >= 0.0) {
            return Err(Error::Domain(format!("t_bath must be non-negative, got {}", self.t_bath)));
        }
        if !(self.dephasing.is_finite() && self.dephasing >= 0.0) {
            return Err(Error::Domain(format!("dephasing must be non-negative, got {}", self.dephasing)));
        }
        if self.fock_dim < 3 {
            return Err(Error::Domain(format!("fock_dim must be at least 3, got {}", self.fock_dim)));
        }
        Ok(())
    }

    /// δ_q = ω_q − ω_d
    pub fn delta_q(&self) -> f64 {
        self.omega_q - self.omega_d
    }

    /// δ_r = ω_r − ω_d
    pub fn delta_r(&self) -> f64 {
        self.omega_r - self.omega_d
    }

    pub fn dims(&self) -> Result<HilbertDims> {
        HilbertDims::new(self.fock_dim)
    }

    pub fn bath(&self) -> BathSpectrum {
        BathSpectrum { kappa: self.gamma_r, t_bath: self.t_bath, hbar_over_kb: self.hbar_over_kb }
    }
}

/// Flat bath spectral density κ at temperature t_bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpectrum {
    pub kappa: f64,
    pub t_bath: f64,
    pub hbar_over_kb: f64,
}

impl BathSpectrum {
    pub fn new(kappa: f64, t_bath: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) || !(t_bath >= 0.0 && t_bath.is_finite()) {
            return Err(Error::Domain(format!("bath needs kappa > 0 and t_bath >= 0, got {kappa}, {t_bath}")));
        }
        Ok(Self { kappa, t_bath, hbar_over_kb: HBAR_OVER_KB })
    }
}

/// Ordered (operator, rate) pairs of the Lindblad dissipator.
#[derive(Clone, Debug, Default)]
pub struct CollapseSet {
    entries: Vec<(Operator, f64)>,
}

impl CollapseSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, op: Operator, rate: f64) -> Result<()> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("collapse rate must be non-negative, got {rate}")));
        }
        self.entries.push((op, rate));
        Ok(())
    }

    pub fn entries(&self) -> &[(Operator, f64)] {
        &self.entries
    }

    pub fn rates(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, r)| *r).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Ladder {
    a: Operator,
    a_dag: Operator,
    sz: Operator,
    sp: Operator,
    sm: Operator,
}

fn composite_ladder(fock_dim: usize) -> Result<Ladder> {
    let a1 = annihilation(fock_dim)?;
    let id_q = Operator::identity(Dims::Single(2));
    let id_f = Operator::identity(Dims::Single(fock_dim));
    let a = kron(&id_q, &a1);
    Ok(Ladder {
        a_dag: dagger(&a),
        a,
        sz: kron(&pauli(Pauli::Z), &id_f),
        sp: kron(&pauli(Pauli::Plus), &id_f),
        sm: kron(&pauli(Pauli::Minus), &id_f),
    })
}

fn sum(terms: &[Operator]) -> Result<Operator> {
    let mut it = terms.iter();
    let first = it.next().expect("at least one term").clone();
    it.try_fold(first, |acc, t| acc.add(t))
}

/// Lab-frame driven JC Hamiltonian at time t:
/// (ω_q/2)σ_z + ω_r a†a + η(a†σ− + aσ+) + Ω(a† e^{−iω_d t} + a e^{iω_d t}).
pub fn build_h_lab(p: &SystemParams, t: f64) -> Result<Operator> {
    p.validate()?;
    let l = composite_ladder(p.fock_dim)?;
    let phase = C64::from_polar(1.0, -p.omega_d * t);
    sum(&[
        l.sz.scale_real(p.omega_q / 2.0),
        l.a_dag.mul(&l.a)?.scale_real(p.omega_r),
        l.a_dag.mul(&l.sm)?.add(&l.a.mul(&l.sp)?)?.scale_real(p.eta),
        l.a_dag.scale(phase * p.drive),
        l.a.scale(phase.conj() * p.drive),
    ])
}

/// Time-independent Hamiltonian in the frame rotating at ω_d:
/// (δ_q/2)σ_z + δ_r a†a + η(a†σ− + aσ+) + Ω(a† + a).
pub fn build_h_rotating(p: &SystemParams) -> Result<Operator> {
    p.validate()?;
    let l = composite_ladder(p.fock_dim)?;
    sum(&[
        l.sz.scale_real(p.delta_q() / 2.0),
        l.a_dag.mul(&l.a)?.scale_real(p.delta_r()),
        l.a_dag.mul(&l.sm)?.add(&l.a.mul(&l.sp)?)?.scale_real(p.eta),
        l.a_dag.add(&l.a)?.scale_real(p.drive),
    ])
}

/// Directly driven bare qubit in the rotating frame: (δ_q/2)σ_z + Ω(σ+ + σ−).
/// At resonance P_e(t) = sin²(Ωt), period π/Ω.
pub fn build_h_bare_qubit(p: &SystemParams) -> Result<Operator> {
    let z = pauli(Pauli::Z).scale_real(p.delta_q() / 2.0);
    let x = pauli(Pauli::X).scale_real(p.drive);
    z.add(&x)
}

/// Bose-Einstein occupation 1/(e^{ħω/k_BT} − 1).
pub fn bose_occupation(omega: f64, t: f64) -> Result<f64> {
    bose_occupation_with(omega, t, HBAR_OVER_KB)
}

pub fn bose_occupation_with(omega: f64, t: f64, hbar_over_kb: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("Bose occupation needs omega > 0, got {omega}")));
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (hbar_over_kb * omega / t).exp_m1())
}

/// Finite-temperature rate γ̄(ω) = κ·n̄(|ω|), two-sided.
pub fn rate_thermal(s: &BathSpectrum, omega: f64) -> f64 {
    let w = omega.abs().max(OMEGA_FLOOR);
    s.kappa * bose_occupation_with(w, s.t_bath, s.hbar_over_kb).expect("floored frequency is positive")
}

/// Vacuum rate γ(ω) = κ for ω > 0, else 0.
pub fn rate_vacuum(s: &BathSpectrum, omega: f64) -> f64 {
    if omega > 0.0 {
        s.kappa
    } else {
        0.0
    }
}

/// Damped driven JC dissipators: resonator loss and thermal refill at the
/// resonator occupation, qubit T1 decay, plus the optional qubit thermal
/// excitation and pure dephasing switches.
pub fn collapse_set_full(p: &SystemParams) -> Result<CollapseSet> {
    p.validate()?;
    let l = composite_ladder(p.fock_dim)?;
    let n_r = bose_occupation_with(p.omega_r, p.t_bath, p.hbar_over_kb)?;
    let mut set = CollapseSet::new();
    set.push(l.a.clone(), p.gamma_r * (n_r + 1.0))?;
    set.push(l.a_dag.clone(), p.gamma_r * n_r)?;
    set.push(l.sm.clone(), 1.0 / p.t1)?;
    if p.qubit_thermal {
        let n_q = bose_occupation_with(p.omega_q, p.t_bath, p.hbar_over_kb)?;
        set.push(l.sp.clone(), n_q / p.t1)?;
    }
    if p.dephasing > 0.0 {
        set.push(l.sz.clone(), p.dephasing / 2.0)?;
    }
    Ok(set)
}

/// Dissipators of the bare qubit (2-level) model.
pub fn collapse_set_bare(p: &SystemParams) -> Result<CollapseSet> {
    let mut set = CollapseSet::new();
    set.push(pauli(Pauli::Minus), 1.0 / p.t1)?;
    if p.qubit_thermal {
        let n_q = bose_occupation_with(p.omega_q, p.t_bath, p.hbar_over_kb)?;
        set.push(pauli(Pauli::Plus), n_q / p.t1)?;
    }
    if p.dephasing > 0.0 {
        set.push(pauli(Pauli::Z), p.dephasing / 2.0)?;
    }
    Ok(set)
}

/// σ_z/2 + a†a on the composite space.
pub fn excitation_number(fock_dim: usize) -> Result<Operator> {
    let l = composite_ladder(fock_dim)?;
    l.sz.scale_real(0.5).add(&l.a_dag.mul(&l.a)?)
}

/// |q,n><q,n| for the composite space; handy for initial states.
pub fn basis_projector(dims: HilbertDims, qubit: usize, photons: usize) -> CMatrix {
    let k = dims.index(qubit, photons);
    let mut m = CMatrix::zeros(dims.total(), dims.total());
    m[(k, k)] = C64::new(1.0, 0.0);
    m
}
