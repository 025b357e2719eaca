//! TOML scenario configuration.
//!
//! ```toml
//! [trap]
//! B = 1.0          # T
//! V0 = 10.0        # V
//! d = 3.3e-3       # m
//! g_factor = 2.0023193   # optional
//!
//! [drive]          # standing wave; optional for `freqs`
//! alpha = 8.7e-11  # V·s/m
//! k = 2.6e5        # 1/m
//! Omega = 3.5e11   # rad/s
//! phi = 0.0
//! varphi = 0.0
//!
//! [spin_drive]     # optional
//! b = 1e-5         # T
//! theta = 0.0
//!
//! [sim]            # optional, defaults shown
//! axial_dim = 6
//! cyclotron_dim = 3
//! samples_per_period = 20.0
//! compensation_n = 0
//! # step = 1e-3   # cap on the full-lab integration step
//!
//! [constants]      # optional, CODATA by default
//! hbar = 1.0
//! e = 1.0
//! m = 1.0
//!
//! [bottle]         # optional
//! omega_tilde = 1.0
//!
//! [thresholds]     # optional, defaults shown
//! fidelity = 0.99
//! leakage = 1e-4
//! phase_tol = 0.1
//! ```

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::HilbertSpec;
use crate::measurement::BottleConfig;
use crate::trap::{DriveConfig, PhysicalConstants, SpinDriveConfig, TrapConfig, G_FACTOR};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrap {
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "V0")]
    v0: f64,
    d: f64,
    g_factor: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstants {
    hbar: f64,
    e: f64,
    m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub axial_dim: usize,
    pub cyclotron_dim: usize,
    pub samples_per_period: f64,
    pub compensation_n: u64,
    pub step: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { axial_dim: 6, cyclotron_dim: 3, samples_per_period: 20.0, compensation_n: 0, step: None }
    }
}

/// Pass/fail limits applied by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Minimum gate fidelity.
    pub fidelity: f64,
    /// Maximum population leaving the register.
    pub leakage: f64,
    /// Entry-wise tolerance of the phase-equivalence check.
    pub phase_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { fidelity: 0.99, leakage: 1e-4, phase_tol: 0.1 }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBottle {
    omega_tilde: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    trap: RawTrap,
    drive: Option<DriveConfig>,
    spin_drive: Option<SpinDriveConfig>,
    #[serde(default)]
    sim: SimConfig,
    constants: Option<RawConstants>,
    bottle: Option<RawBottle>,
    #[serde(default)]
    thresholds: Thresholds,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub trap: TrapConfig,
    pub drive: Option<DriveConfig>,
    pub spin_drive: Option<SpinDriveConfig>,
    pub sim: SimConfig,
    pub bottle: BottleConfig,
    pub thresholds: Thresholds,
    /// Hex SHA-256 of the configuration text.
    pub sha256: String,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| line_of(text, s.start));
            Error::InvalidConfig(format!("line {line}: {}", e.message()))
        })?;
        let constants = raw.constants.map_or_else(PhysicalConstants::codata, |c| PhysicalConstants {
            hbar: c.hbar,
            charge: c.e,
            mass: c.m,
        });
        let g_factor = raw.trap.g_factor.unwrap_or(G_FACTOR);
        let trap = TrapConfig { b_field: raw.trap.b, v0: raw.trap.v0, d: raw.trap.d, g_factor, constants };
        trap.validate()?;
        if let Some(drv) = &raw.drive {
            drv.validate()?;
        }
        let bottle = BottleConfig::new(raw.bottle.map_or(1.0, |b| b.omega_tilde), g_factor)?;
        let sim = raw.sim;
        HilbertSpec::new(sim.axial_dim, sim.cyclotron_dim, 1)?;
        if !(sim.samples_per_period >= 4.0) {
            return Err(Error::InvalidConfig("sim.samples_per_period must be >= 4".into()));
        }
        Ok(Config {
            trap,
            drive: raw.drive,
            spin_drive: raw.spin_drive,
            sim,
            bottle,
            thresholds: raw.thresholds,
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn drive(&self) -> Result<&DriveConfig> {
        self.drive.as_ref().ok_or_else(|| Error::InvalidConfig("missing [drive] section".into()))
    }

    pub fn spin_drive(&self) -> Result<&SpinDriveConfig> {
        self.spin_drive.as_ref().ok_or_else(|| Error::InvalidConfig("missing [spin_drive] section".into()))
    }

    /// Register space with the configured truncations (magnetron frozen).
    pub fn spec(&self) -> Result<HilbertSpec> {
        HilbertSpec::new(self.sim.axial_dim, self.sim.cyclotron_dim, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[trap]\nB = 1.0\nV0 = 10.0\nd = 3.3e-3\n";

    #[test]
    fn minimal_config_defaults() {
        let c = Config::parse(MINIMAL).unwrap();
        assert_eq!(c.trap.g_factor, G_FACTOR);
        assert_eq!(c.sim, SimConfig::default());
        assert_eq!(c.thresholds, Thresholds::default());
        assert!(c.drive().is_err());
        assert_eq!(c.sha256.len(), 64);
    }

    #[test]
    fn missing_trap_is_reported() {
        let e = Config::parse("[sim]\naxial_dim = 4\n").unwrap_err().to_string();
        assert!(e.contains("trap"), "{e}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Config::parse("[trap]\nB = 1.0\nV0 = \"ten\"\nd = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = Config::parse(&format!("{MINIMAL}[sim]\naxial_dims = 4\n")).unwrap_err().to_string();
        assert!(e.contains("line 6"), "{e}");
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(Config::parse("[trap]\nB = -1.0\nV0 = 10.0\nd = 3.3e-3\n").is_err());
        assert!(Config::parse(&format!("{MINIMAL}[sim]\naxial_dim = 1\n")).is_err());
        assert!(Config::parse(&format!("{MINIMAL}[bottle]\nomega_tilde = 0.0\n")).is_err());
    }
}
