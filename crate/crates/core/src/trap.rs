//! Trap and drive parameters, derived mode frequencies and couplings.
//!
//! All frequencies and couplings are angular (rad/s, or the inverse time unit
//! of whatever unit system the constants define).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};

/// Electron g factor used when none is supplied.
pub const G_FACTOR: f64 = 2.0023193;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    /// |e|
    pub charge: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

impl PhysicalConstants {
    pub fn codata() -> Self {
        PhysicalConstants { hbar: 1.054571817e-34, charge: 1.602176634e-19, mass: 9.1093837015e-31 }
    }

    /// ħ = |e| = m = 1.
    pub fn natural() -> Self {
        PhysicalConstants { hbar: 1.0, charge: 1.0, mass: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Magnetic field B (T).
    pub b_field: f64,
    /// Electrode voltage V₀ (V).
    pub v0: f64,
    /// Characteristic trap dimension d (m).
    pub d: f64,
    pub g_factor: f64,
    pub constants: PhysicalConstants,
}

impl TrapConfig {
    pub fn new(b_field: f64, v0: f64, d: f64) -> Result<Self> {
        let cfg = TrapConfig { b_field, v0, d, g_factor: G_FACTOR, constants: PhysicalConstants::codata() };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Natural-unit trap with prescribed ω_z and ω_c (B = ω_c, V₀ = ω_z², d = 1).
    pub fn scaled(omega_z: f64, omega_c: f64) -> Self {
        TrapConfig {
            b_field: omega_c,
            v0: omega_z * omega_z,
            d: 1.0,
            g_factor: G_FACTOR,
            constants: PhysicalConstants::natural(),
        }
    }

    /// Natural-unit trap with prescribed ω_z and ω_s.
    pub fn scaled_spin(omega_z: f64, omega_s: f64) -> Self {
        Self::scaled(omega_z, omega_s / (G_FACTOR / 2.0))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("B", self.b_field)?;
        positive("V0", self.v0)?;
        positive("d", self.d)?;
        positive("g_factor", self.g_factor)?;
        positive("hbar", self.constants.hbar)?;
        positive("e", self.constants.charge)?;
        positive("m", self.constants.mass)
    }

    /// Axial zero-point length ℓ = √(ħ/2mω_z).
    pub fn axial_length(&self) -> Result<f64> {
        let f = derive_frequencies(self)?;
        Ok((self.constants.hbar / (2.0 * self.constants.mass * f.omega_z)).sqrt())
    }

    /// Lamb-Dicke parameter kℓ for wavevector `k`.
    pub fn lamb_dicke(&self, k: f64) -> Result<f64> {
        Ok(k * self.axial_length()?)
    }

    /// Wavevector giving Lamb-Dicke parameter `ld`.
    pub fn wavevector_for(&self, ld: f64) -> Result<f64> {
        Ok(ld / self.axial_length()?)
    }

    /// |α| producing spin coupling ζ at wavevector k.
    pub fn alpha_for_zeta(&self, k: f64, zeta: f64) -> f64 {
        let c = &self.constants;
        2.0 * c.mass * zeta / (self.g_factor * c.charge * k)
    }

    /// |α| producing cyclotron coupling ε.
    pub fn alpha_for_epsilon(&self, epsilon: f64) -> f64 {
        epsilon / self.epsilon_per_alpha()
    }

    /// Rotating-field amplitude b producing Rabi frequency ϖ_s.
    pub fn b_for_rabi(&self, rabi: f64) -> f64 {
        2.0 * self.constants.mass * rabi / (self.g_factor * self.constants.charge)
    }

    fn epsilon_per_alpha(&self) -> f64 {
        let c = &self.constants;
        (2.0 * c.charge.powi(3) * self.b_field / (c.hbar * c.mass * c.mass)).sqrt()
    }
}

/// Standing-wave drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Vector-potential amplitude |α| (V·s/m).
    pub alpha: f64,
    /// Wavevector k (1/m).
    pub k: f64,
    /// Drive angular frequency Ω.
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Position of the axial centre relative to the wave.
    pub phi: f64,
    /// Field phase ϕ̄.
    pub varphi: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidConfig(format!("k must be > 0, got {}", self.k)));
        }
        Ok(())
    }
}

/// Rotating transverse magnetic field used for spin rotations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpinDriveConfig {
    pub b: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeFrequencies {
    pub omega_z: f64,
    pub omega_c: f64,
    pub omega_m: f64,
    pub omega_s: f64,
}

impl ModeFrequencies {
    /// `Some` when ω_m < ω_z < ω_c fails.
    pub fn hierarchy_warning(&self) -> Option<Warning> {
        if self.omega_m < self.omega_z && self.omega_z < self.omega_c {
            None
        } else {
            Some(Warning::Hierarchy {
                detail: format!(
                    "expected omega_m < omega_z < omega_c, got omega_z/omega_m = {:.3e}, omega_c/omega_z = {:.3e}",
                    self.omega_z / self.omega_m,
                    self.omega_c / self.omega_z
                ),
            })
        }
    }

    /// (ω_z/ω_m, ω_c/ω_z)
    pub fn ratios(&self) -> (f64, f64) {
        (self.omega_z / self.omega_m, self.omega_c / self.omega_z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Couplings {
    pub epsilon: f64,
    pub zeta: f64,
    pub eta: f64,
    pub kappa: f64,
    pub lamb_dicke: f64,
    pub rabi_s: f64,
}

pub fn derive_frequencies(cfg: &TrapConfig) -> Result<ModeFrequencies> {
    cfg.validate()?;
    let c = &cfg.constants;
    let omega_z = (c.charge * cfg.v0 / (c.mass * cfg.d * cfg.d)).sqrt();
    let omega_c = c.charge * cfg.b_field / c.mass;
    Ok(ModeFrequencies {
        omega_z,
        omega_c,
        omega_m: omega_z * omega_z / (2.0 * omega_c),
        omega_s: cfg.g_factor * c.charge * cfg.b_field / (2.0 * c.mass),
    })
}

pub fn derive_couplings(cfg: &TrapConfig, drv: &DriveConfig, spin: &SpinDriveConfig) -> Result<Couplings> {
    drv.validate()?;
    if !(spin.b >= 0.0) {
        return Err(Error::InvalidConfig(format!("spin drive b must be >= 0, got {}", spin.b)));
    }
    let f = derive_frequencies(cfg)?;
    if !(f.omega_z > 0.0) {
        return Err(Error::InvalidConfig("omega_z = 0".into()));
    }
    let c = &cfg.constants;
    let epsilon = cfg.epsilon_per_alpha() * drv.alpha;
    let zeta = cfg.g_factor * c.charge / (2.0 * c.mass) * drv.alpha * drv.k;
    let ell = (c.hbar / (2.0 * c.mass * f.omega_z)).sqrt();
    Ok(Couplings {
        epsilon,
        zeta,
        eta: drv.k * zeta * ell,
        kappa: c.hbar * zeta * drv.k * drv.k / (c.mass * f.omega_z),
        lamb_dicke: drv.k * ell,
        rabi_s: cfg.g_factor * c.charge * spin.b / (2.0 * c.mass),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn reference() -> TrapConfig {
        TrapConfig::new(1.0, 10.0, 3.3e-3).unwrap()
    }

    #[test]
    fn cyclotron_at_one_tesla() {
        let f = derive_frequencies(&reference()).unwrap();
        let c = PhysicalConstants::codata();
        assert_relative_eq!(f.omega_c, c.charge / c.mass, max_relative = 1e-15);
        assert_relative_eq!(f.omega_c, 1.75882e11, max_relative = 1e-5);
        assert_relative_eq!(f.omega_c / (2.0 * PI), 2.79925e10, max_relative = 1e-5);
    }

    #[test]
    fn reference_ranges() {
        let f = derive_frequencies(&reference()).unwrap();
        let fz = f.omega_z / (2.0 * PI);
        let fm = f.omega_m / (2.0 * PI);
        assert!((1e6..1e9).contains(&fz), "{fz}");
        assert!((1e3..1e6).contains(&fm), "{fm}");
        assert_relative_eq!(f.omega_m, f.omega_z.powi(2) / (2.0 * f.omega_c), max_relative = 1e-15);
        assert!(f.hierarchy_warning().is_none());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(TrapConfig::new(0.0, 1.0, 1.0).is_err());
        assert!(TrapConfig::new(1.0, -1.0, 1.0).is_err());
        assert!(TrapConfig::new(1.0, 1.0, 0.0).is_err());
        let drv = DriveConfig { alpha: 1.0, k: 0.0, omega: 0.0, phi: 0.0, varphi: 0.0 };
        assert!(derive_couplings(&reference(), &drv, &SpinDriveConfig::default()).is_err());
    }

    #[test]
    fn zero_spin_field_gives_zero_rabi() {
        let drv = DriveConfig { alpha: 1e-9, k: 1e3, omega: 0.0, phi: 0.0, varphi: 0.0 };
        let c = derive_couplings(&reference(), &drv, &SpinDriveConfig { b: 0.0, theta: 0.0 }).unwrap();
        assert_eq!(c.rabi_s, 0.0);
    }

    #[test]
    fn couplings_linear_in_alpha() {
        let cfg = reference();
        let spin = SpinDriveConfig { b: 1e-6, theta: 0.0 };
        let d1 = DriveConfig { alpha: 2e-9, k: 3e3, omega: 0.0, phi: 0.0, varphi: 0.0 };
        let d2 = DriveConfig { alpha: 4e-9, ..d1 };
        let c1 = derive_couplings(&cfg, &d1, &spin).unwrap();
        let c2 = derive_couplings(&cfg, &d2, &spin).unwrap();
        for (a, b) in [(c1.epsilon, c2.epsilon), (c1.zeta, c2.zeta), (c1.eta, c2.eta), (c1.kappa, c2.kappa)] {
            assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
        }
        assert_eq!(c1.lamb_dicke, c2.lamb_dicke);
    }

    #[test]
    fn inverse_helpers_round_trip() {
        let cfg = reference();
        let k = 2.5e3;
        let drv = DriveConfig { alpha: cfg.alpha_for_zeta(k, 1e5), k, omega: 0.0, phi: 0.0, varphi: 0.0 };
        let spin = SpinDriveConfig { b: cfg.b_for_rabi(3e4), theta: 0.0 };
        let c = derive_couplings(&cfg, &drv, &spin).unwrap();
        assert_relative_eq!(c.zeta, 1e5, max_relative = 1e-12);
        assert_relative_eq!(c.rabi_s, 3e4, max_relative = 1e-12);
        let drv = DriveConfig { alpha: cfg.alpha_for_epsilon(7e5), ..drv };
        let c = derive_couplings(&cfg, &drv, &spin).unwrap();
        assert_relative_eq!(c.epsilon, 7e5, max_relative = 1e-12);
        assert_relative_eq!(cfg.lamb_dicke(cfg.wavevector_for(0.1).unwrap()).unwrap(), 0.1, max_relative = 1e-14);
    }

    #[test]
    fn scaled_trap_hits_requested_frequencies() {
        let cfg = TrapConfig::scaled_spin(1.0, 5.0);
        let f = derive_frequencies(&cfg).unwrap();
        assert_relative_eq!(f.omega_z, 1.0, max_relative = 1e-15);
        assert_relative_eq!(f.omega_s, 5.0, max_relative = 1e-15);
        assert_relative_eq!(cfg.axial_length().unwrap(), (0.5f64).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn absurd_voltage_breaks_hierarchy() {
        let cfg = TrapConfig::new(1.0, 1e9, 1e-4).unwrap();
        let f = derive_frequencies(&cfg).unwrap();
        assert!(f.omega_z > f.omega_c);
        assert!(f.hierarchy_warning().is_some());
    }
}
