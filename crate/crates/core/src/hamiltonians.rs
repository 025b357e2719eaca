//! Hamiltonian builders, in angular-frequency units.
//!
//! Effective (rotating-wave) Hamiltonians are built directly in the frame
//! rotating with the free motion, `H0 = ω_z a_z†a_z + ω_c a_c†a_c + (ω_s/2)σ_z`.
//! Moving the lab-frame standing-wave Hamiltonian into that frame and keeping
//! only its static terms gives each effective model:
//!
//! | drive                     | Ω           | φ     | static part                    |
//! |---------------------------|-------------|-------|--------------------------------|
//! | red sideband              | ω_s − ω_z   | 0     | [`sideband_minus`]             |
//! | blue sideband             | ω_s + ω_z   | 0     | [`sideband_plus`]              |
//! | carrier at antinode       | ω_s         | −π/2  | [`carrier_antinode`]           |
//! | axial → cyclotron swap    | ω_c − ω_z   | −π/2  | [`transfer`] (ϕ̄ = −π/2)        |
//!
//! The rotating spin field is circularly polarized, so [`spin_drive`] is
//! exact in this frame.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    embed, hermitian_function, ladder, number, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, Block, HilbertSpec,
    Mode, Operator, StateVector, C64,
};
use crate::trap::{derive_couplings, derive_frequencies, DriveConfig, ModeFrequencies, SpinDriveConfig, TrapConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    FreeMotion,
    SpinDrive,
    SidebandMinus,
    SidebandPlus,
    CarrierAntinode,
    EffectiveCn,
    Transfer,
    FullLabFrame,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Product of single-mode blocks, each embedded on its own mode.
fn product(spec: HilbertSpec, factors: &[(Mode, Block)]) -> Result<Block> {
    let d = spec.total_dim();
    let mut acc = Block::identity(d, d);
    for (mode, block) in factors {
        acc *= embed(block, *mode, spec)?.into_matrix();
    }
    Ok(acc)
}

fn hermitian(spec: HilbertSpec, m: Block) -> Result<Operator> {
    Operator::new(spec, m, true)
}

fn require_axial(spec: HilbertSpec) -> Result<(Block, Block)> {
    ladder(spec.axial_dim())
}

/// Diagonal of the free-motion Hamiltonian.
pub fn free_motion_diagonal(spec: HilbertSpec, freqs: &ModeFrequencies, include_magnetron: bool) -> Result<Vec<f64>> {
    if include_magnetron && spec.magnetron_dim() < 2 {
        return Err(Error::InvalidDimension("magnetron requested but magnetron_dim = 1".into()));
    }
    Ok((0..spec.total_dim())
        .map(|i| {
            let l = spec.label(i);
            let mut e = freqs.omega_z * l.n_z as f64
                + freqs.omega_c * l.n_c as f64
                + 0.5 * freqs.omega_s * f64::from(l.spin.sign());
            if include_magnetron {
                e -= freqs.omega_m * l.n_m as f64;
            }
            e
        })
        .collect())
}

/// ω_z n_z + ω_c n_c − ω_m n_m + (ω_s/2)σ_z. The magnetron term carries a
/// negative sign.
pub fn free_motion(spec: HilbertSpec, freqs: &ModeFrequencies, include_magnetron: bool) -> Result<Operator> {
    let diag = free_motion_diagonal(spec, freqs, include_magnetron)?;
    let m = Block::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&e| c(e, 0.0))));
    hermitian(spec, m)
}

/// (ϖ_s/2)(σ_x cosθ + σ_y sinθ) on the spin.
pub fn spin_drive(spec: HilbertSpec, rabi_s: f64, theta: f64) -> Result<Operator> {
    if !(rabi_s >= 0.0) {
        return Err(Error::InvalidInput(format!("rabi_s must be >= 0, got {rabi_s}")));
    }
    let block = (sigma_x() * c(theta.cos(), 0.0) + sigma_y() * c(theta.sin(), 0.0)) * c(rabi_s / 2.0, 0.0);
    embed(&block, Mode::Spin, spec)
}

/// Red sideband: η[σ₊a_z e^{−iϕ̄} + σ₋a_z† e^{iϕ̄}].
pub fn sideband_minus(spec: HilbertSpec, eta: f64, varphi: f64) -> Result<Operator> {
    let (a, ad) = require_axial(spec)?;
    let m = product(spec, &[(Mode::Spin, sigma_plus()), (Mode::Axial, a)])? * C64::from_polar(eta, -varphi)
        + product(spec, &[(Mode::Spin, sigma_minus()), (Mode::Axial, ad)])? * C64::from_polar(eta, varphi);
    hermitian(spec, m)
}

/// Blue sideband: η[σ₊a_z† e^{−iϕ̄} + σ₋a_z e^{iϕ̄}].
pub fn sideband_plus(spec: HilbertSpec, eta: f64, varphi: f64) -> Result<Operator> {
    let (a, ad) = require_axial(spec)?;
    let m = product(spec, &[(Mode::Spin, sigma_plus()), (Mode::Axial, ad)])? * C64::from_polar(eta, -varphi)
        + product(spec, &[(Mode::Spin, sigma_minus()), (Mode::Axial, a)])? * C64::from_polar(eta, varphi);
    hermitian(spec, m)
}

fn carrier_with_profile(spec: HilbertSpec, zeta: f64, varphi: f64, profile: Vec<f64>) -> Result<Operator> {
    let spin = sigma_plus() * C64::from_polar(1.0, -varphi) + sigma_minus() * C64::from_polar(1.0, varphi);
    let diag = Block::from_diagonal(&DVector::from_iterator(profile.len(), profile.into_iter().map(|v| c(v, 0.0))));
    let m = product(spec, &[(Mode::Spin, spin), (Mode::Axial, diag)])? * c(-zeta, 0.0);
    hermitian(spec, m)
}

/// Carrier at an antinode:
/// −ζ[σ₊e^{−iϕ̄} + σ₋e^{iϕ̄}]·[1 − η_LD²/2 − η_LD² a_z†a_z].
///
/// The bracket is the n_z-diagonal part of cos(kẑ) to second order in the
/// Lamb-Dicke parameter. At ϕ̄ = 0 the n_z-dependent piece is
/// `ζ·η_LD²·a_z†a_z·σ_x`, i.e. [`effective_cn`] with coupling κ/2.
pub fn carrier_antinode(spec: HilbertSpec, zeta: f64, lamb_dicke: f64, varphi: f64) -> Result<Operator> {
    require_axial(spec)?;
    let ld2 = lamb_dicke * lamb_dicke;
    let profile = (0..spec.axial_dim()).map(|n| 1.0 - ld2 / 2.0 - ld2 * n as f64).collect();
    carrier_with_profile(spec, zeta, varphi, profile)
}

/// Carrier at an antinode with the exact n_z-diagonal of cos(kẑ),
/// ⟨n|cos(η_LD(a + a†))|n⟩, in place of its second-order expansion.
pub fn carrier_antinode_secular(spec: HilbertSpec, zeta: f64, lamb_dicke: f64, varphi: f64) -> Result<Operator> {
    let profile = cos_position_diagonal(spec.axial_dim(), lamb_dicke)?;
    carrier_with_profile(spec, zeta, varphi, profile)
}

/// ⟨n|cos(η_LD(a + a†))|n⟩ for n below `axial_dim`, evaluated in a larger
/// truncation so the top levels are not distorted.
pub fn cos_position_diagonal(axial_dim: usize, lamb_dicke: f64) -> Result<Vec<f64>> {
    let big = (axial_dim + 30).max(40);
    let (a, ad) = ladder(big)?;
    let cs = hermitian_function(&((a + ad) * c(lamb_dicke, 0.0)), f64::cos)?;
    Ok((0..axial_dim).map(|n| cs[(n, n)].re).collect())
}

/// κ·a_z†a_z·σ_x.
pub fn effective_cn(spec: HilbertSpec, kappa: f64) -> Result<Operator> {
    require_axial(spec)?;
    let m = product(spec, &[(Mode::Spin, sigma_x()), (Mode::Axial, number(spec.axial_dim()))])? * c(kappa, 0.0);
    hermitian(spec, m)
}

/// Beam-splitter transfer generator i·g·(a_c†a_z − a_c a_z†).
pub fn transfer(spec: HilbertSpec, g_strength: f64) -> Result<Operator> {
    transfer_with_phase(spec, g_strength, -std::f64::consts::FRAC_PI_2)
}

/// g·[a_c a_z† e^{iϕ̄} + a_c† a_z e^{−iϕ̄}]; ϕ̄ = −π/2 gives [`transfer`].
pub fn transfer_with_phase(spec: HilbertSpec, g_strength: f64, varphi: f64) -> Result<Operator> {
    if spec.cyclotron_dim() < 2 {
        return Err(Error::InvalidDimension("transfer needs cyclotron_dim >= 2".into()));
    }
    let (a, ad) = require_axial(spec)?;
    let (ac, acd) = ladder(spec.cyclotron_dim())?;
    let m = product(spec, &[(Mode::Cyclotron, ac), (Mode::Axial, ad)])? * C64::from_polar(g_strength, varphi)
        + product(spec, &[(Mode::Cyclotron, acd), (Mode::Axial, a)])? * C64::from_polar(g_strength, -varphi);
    hermitian(spec, m)
}

/// Lab-frame Hamiltonian `H0 + e^{iΩt}A + e^{−iΩt}A†` with diagonal `H0`.
///
/// Both the standing wave and the rotating spin field have this form, which
/// lets the drive be moved into the free-motion frame entry by entry.
#[derive(Clone, Debug)]
pub struct LabHamiltonian {
    spec: HilbertSpec,
    free: Vec<f64>,
    coupling: Block,
    omega: f64,
}

impl LabHamiltonian {
    /// Standing-wave drive: `A = e^{iϕ̄}(ε a_c cos(kẑ+φ) + ζ σ₋ sin(kẑ+φ))`.
    ///
    /// A cyclotron mode of dimension 1 is frozen and contributes no drive term.
    pub fn standing_wave(spec: HilbertSpec, cfg: &TrapConfig, drv: &DriveConfig) -> Result<Self> {
        let freqs = derive_frequencies(cfg)?;
        let couplings = derive_couplings(cfg, drv, &SpinDriveConfig::default())?;
        let (a, ad) = require_axial(spec)?;
        let kz = (a + ad) * c(couplings.lamb_dicke, 0.0);
        let phi = drv.phi;
        let cos_kz = hermitian_function(&kz, |x| (x + phi).cos())?;
        let sin_kz = hermitian_function(&kz, |x| (x + phi).sin())?;

        let mut coupling =
            product(spec, &[(Mode::Spin, sigma_minus()), (Mode::Axial, sin_kz)])? * c(couplings.zeta, 0.0);
        if spec.cyclotron_dim() >= 2 {
            let (ac, _) = ladder(spec.cyclotron_dim())?;
            coupling += product(spec, &[(Mode::Cyclotron, ac), (Mode::Axial, cos_kz)])? * c(couplings.epsilon, 0.0);
        }
        coupling *= C64::from_polar(1.0, drv.varphi);
        Ok(LabHamiltonian { spec, free: free_motion_diagonal(spec, &freqs, false)?, coupling, omega: drv.omega })
    }

    /// Rotating transverse field at ω_s: `(ϖ_s/2)[σ₊e^{−i(ω_s t+θ)} + h.c.]`.
    pub fn spin_field(spec: HilbertSpec, cfg: &TrapConfig, spin: &SpinDriveConfig) -> Result<Self> {
        let freqs = derive_frequencies(cfg)?;
        let drv = DriveConfig { alpha: 0.0, k: 1.0, omega: 0.0, phi: 0.0, varphi: 0.0 };
        let rabi = derive_couplings(cfg, &drv, spin)?.rabi_s;
        let coupling =
            embed(&(sigma_minus() * C64::from_polar(rabi / 2.0, spin.theta)), Mode::Spin, spec)?.into_matrix();
        Ok(LabHamiltonian { spec, free: free_motion_diagonal(spec, &freqs, false)?, coupling, omega: freqs.omega_s })
    }

    /// Replaces the drive frequency Ω.
    pub fn with_drive_frequency(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Fastest rotation present in the interaction-picture drive,
    /// max |Ω + E_j − E_k| over nonzero couplings.
    pub fn max_frequency(&self) -> f64 {
        let d = self.free.len();
        let mut w = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                if self.coupling[(j, k)].norm() > 0.0 {
                    w = w.max((self.omega + self.free[j] - self.free[k]).abs());
                }
            }
        }
        w
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    fn drive_entry(&self, j: usize, k: usize, rot: C64) -> C64 {
        rot * self.coupling[(j, k)] + rot.conj() * self.coupling[(k, j)].conj()
    }

    /// Full lab-frame matrix at time `t`.
    pub fn lab(&self, t: f64) -> Block {
        let d = self.free.len();
        let rot = C64::from_polar(1.0, self.omega * t);
        let mut h = Block::zeros(d, d);
        for j in 0..d {
            h[(j, j)] = c(self.free[j], 0.0) + self.drive_entry(j, j, rot);
            for k in (j + 1)..d {
                let v = self.drive_entry(j, k, rot);
                h[(j, k)] = v;
                h[(k, j)] = v.conj();
            }
        }
        h
    }

    /// Drive part in the free-motion frame: `e^{iH0t}·V(t)·e^{−iH0t}`.
    pub fn interaction(&self, t: f64) -> Block {
        let d = self.free.len();
        let rot = C64::from_polar(1.0, self.omega * t);
        let phases: Vec<C64> = self.free.iter().map(|&e| C64::from_polar(1.0, e * t)).collect();
        let mut h = Block::zeros(d, d);
        for j in 0..d {
            h[(j, j)] = c(self.drive_entry(j, j, rot).re, 0.0);
            for k in (j + 1)..d {
                let v = phases[j] * phases[k].conj() * self.drive_entry(j, k, rot);
                h[(j, k)] = v;
                h[(k, j)] = v.conj();
            }
        }
        h
    }
}

/// Lab-frame standing-wave Hamiltonian at time `t` (free motion without magnetron
/// plus the standing-wave drive, counter-rotating terms included).
pub fn full_lab_frame(spec: HilbertSpec, cfg: &TrapConfig, drv: &DriveConfig, t: f64) -> Result<Operator> {
    let lab = LabHamiltonian::standing_wave(spec, cfg, drv)?;
    hermitian(spec, lab.lab(t))
}

/// The frame rotating with the free motion, `R(t) = exp(−iH0t)`.
#[derive(Clone, Debug)]
pub struct RotatingFrame {
    spec: HilbertSpec,
    free: Vec<f64>,
}

impl RotatingFrame {
    pub fn new(spec: HilbertSpec, freqs: &ModeFrequencies) -> Result<Self> {
        Ok(RotatingFrame { spec, free: free_motion_diagonal(spec, freqs, false)? })
    }

    /// Lab-frame state at time `t` → rotating-frame state, `e^{iH0t}ψ`.
    pub fn to_rotating(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        self.apply_phases(state, t)
    }

    /// Rotating-frame state at time `t` → lab frame, `e^{−iH0t}ψ`.
    pub fn to_lab(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        self.apply_phases(state, -t)
    }

    fn apply_phases(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.spec() != self.spec {
            return Err(Error::InvalidDimension("frame and state specs differ".into()));
        }
        let amps = DVector::from_iterator(
            self.free.len(),
            state.amplitudes().iter().zip(&self.free).map(|(a, &e)| a * C64::from_polar(1.0, e * t)),
        );
        StateVector::from_amplitudes(self.spec, amps)
    }
}

/// Operators used by the conservation-law checks.
pub fn excitation_number(spec: HilbertSpec, spin_sign: f64) -> Result<Operator> {
    let n = embed(&number(spec.axial_dim()), Mode::Axial, spec)?;
    let up = embed(&(sigma_plus() * sigma_minus()), Mode::Spin, spec)?;
    Ok(&n + &up.scale(spin_sign))
}

pub fn motional_quanta(spec: HilbertSpec) -> Result<Operator> {
    Ok(&embed(&number(spec.axial_dim()), Mode::Axial, spec)?
        + &embed(&number(spec.cyclotron_dim()), Mode::Cyclotron, spec)?)
}

pub fn spin_z(spec: HilbertSpec) -> Result<Operator> {
    embed(&sigma_z(), Mode::Spin, spec)
}
