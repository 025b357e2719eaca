//! Closed-form state preparation on the two-qubit register.
//!
//! Targets are written α|0↓⟩ + β|0↑⟩ + γ|1↓⟩ + δ|1↑⟩ and every plan starts
//! from |0↓⟩ with all other modes in their ground state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BasisLabel, HilbertSpec, Spin, StateVector, C64};
use crate::pulses::{Pulse, PulseSequence};

const NORM_TOL: f64 = 1e-6;
/// Amplitudes below this are treated as absent when choosing phases.
const ZERO_TOL: f64 = 1e-14;

/// Pulse strengths available to the planner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub rabi_s: f64,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// SpinDrive → SidebandMinus → SpinDrive; reaches every target.
    #[default]
    Universal,
    /// SpinDrive, SidebandMinus, SidebandPlus. Targets with both γ and δ
    /// nonzero leak into |2↑⟩ and are reported unreachable.
    SidebandPair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub sequence: PulseSequence,
    pub reachable: bool,
    /// Population predicted outside the register after the sequence.
    pub leakage: f64,
}

/// |0_z ↓⟩ with the cyclotron and magnetron in their ground states.
pub fn initial_state(spec: HilbertSpec) -> StateVector {
    StateVector::basis(spec, BasisLabel::new(0, Spin::Down)).expect("every spec holds |0 down>")
}

/// The register state α|0↓⟩ + β|0↑⟩ + γ|1↓⟩ + δ|1↑⟩ embedded in `spec`.
pub fn register_state(spec: HilbertSpec, amps: [C64; 4]) -> Result<StateVector> {
    let labels = register_labels();
    let comps: Vec<_> = labels.into_iter().zip(amps).collect();
    StateVector::from_components(spec, &comps)
}

/// |0↓⟩, |0↑⟩, |1↓⟩, |1↑⟩ in register order.
pub fn register_labels() -> [BasisLabel; 4] {
    [
        BasisLabel::new(0, Spin::Down),
        BasisLabel::new(0, Spin::Up),
        BasisLabel::new(1, Spin::Down),
        BasisLabel::new(1, Spin::Up),
    ]
}

fn unit(z: C64) -> C64 {
    if z.norm() > ZERO_TOL {
        z / z.norm()
    } else {
        C64::new(1.0, 0.0)
    }
}

/// Spin rotation exp(−i x (e^{−iθ}σ₊ + e^{iθ}σ₋)) on (↓, ↑) amplitudes.
fn rotate(x: f64, theta: f64, down: C64, up: C64) -> (C64, C64) {
    let (s, c) = x.sin_cos();
    let mi = C64::new(0.0, -1.0);
    (down * c + mi * C64::from_polar(s, theta) * up, up * c + mi * C64::from_polar(s, -theta) * down)
}

/// Phase θ of a spin drive that sends |↓⟩ to a positive multiple of −i e^{−iθ}, i.e. onto `target`.
fn drive_phase(target: C64) -> f64 {
    -(C64::new(0.0, 1.0) * unit(target)).arg()
}

fn push(seq: &mut PulseSequence, pulse: Pulse) {
    if pulse.duration_s > 0.0 {
        seq.push(pulse);
    }
}

pub fn prepare_state(target: [C64; 4], rates: Rates, template: Template) -> Result<Plan> {
    let norm2: f64 = target.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidInput(format!("target norm^2 {norm2} is not 1")));
    }
    if !(rates.rabi_s > 0.0) || !(rates.eta > 0.0) {
        return Err(Error::InvalidInput("planner needs rabi_s > 0 and eta > 0".into()));
    }
    let [alpha, beta, gamma, delta] = target;
    match template {
        Template::Universal => Ok(universal(alpha, beta, gamma, delta, rates)),
        Template::SidebandPair => Ok(sideband_pair(alpha, beta, gamma, delta, rates)),
    }
}

fn universal(alpha: C64, beta: C64, gamma: C64, delta: C64, rates: Rates) -> Plan {
    // Final rotation R maps the |1↓⟩ amplitude c onto (γ, δ).
    let h = delta.norm().atan2(gamma.norm());
    let theta2 = drive_phase(delta * unit(gamma).conj());
    // Pre-image of (α, β) under R, then drop a global phase so the |0↓⟩ amplitude is real.
    let (a, b) = rotate(-h, theta2, alpha, beta);
    let phase = unit(a).conj();
    let (a, b) = (a * phase, b * phase);
    let c = unit(gamma) * phase * (gamma.norm_sqr() + delta.norm_sqr()).sqrt();

    let x = a.re.clamp(0.0, 1.0).acos();
    let y = c.norm().atan2(b.norm());
    let b_hat = if b.norm() > ZERO_TOL { unit(b) } else { C64::new(0.0, -1.0) };
    let theta1 = drive_phase(b_hat);
    let varphi2 = (C64::new(0.0, 1.0) * unit(c) * b_hat.conj()).arg();

    let mut seq = PulseSequence::default();
    push(&mut seq, Pulse::spin_drive(rates.rabi_s, theta1, 2.0 * x / rates.rabi_s));
    push(&mut seq, Pulse::sideband_minus(rates.eta, varphi2, y / rates.eta));
    push(&mut seq, Pulse::spin_drive(rates.rabi_s, theta2, 2.0 * h / rates.rabi_s));
    Plan { sequence: seq, reachable: true, leakage: 0.0 }
}

fn sideband_pair(alpha: C64, beta: C64, gamma: C64, delta: C64, rates: Rates) -> Plan {
    let phase = if alpha.norm() > ZERO_TOL { unit(alpha).conj() } else { unit(delta).conj() };
    let (beta, gamma, delta) = (beta * phase, gamma * phase, delta * phase);

    let x = (beta.norm_sqr() + gamma.norm_sqr()).sqrt().clamp(0.0, 1.0).asin();
    let y = gamma.norm().atan2(beta.norm());
    let z = delta.norm().atan2(alpha.norm());
    let b_hat = if beta.norm() > ZERO_TOL { unit(beta) } else { C64::new(0.0, -1.0) };
    let theta1 = drive_phase(b_hat);
    let varphi2 = (C64::new(0.0, 1.0) * unit(gamma) * b_hat.conj()).arg();
    let varphi3 = -(C64::new(0.0, 1.0) * unit(delta)).arg();

    let mut seq = PulseSequence::default();
    push(&mut seq, Pulse::spin_drive(rates.rabi_s, theta1, 2.0 * x / rates.rabi_s));
    push(&mut seq, Pulse::sideband_minus(rates.eta, varphi2, y / rates.eta));
    push(&mut seq, Pulse::sideband_plus(rates.eta, varphi3, z / rates.eta));

    // The blue pulse also rotates |1↓⟩ into |2↑⟩ at rate √2η.
    let leakage = gamma.norm_sqr() * (2f64.sqrt() * z).sin().powi(2);
    let reachable = gamma.norm() <= ZERO_TOL || delta.norm() <= ZERO_TOL;
    Plan { sequence: seq, reachable, leakage: if reachable { 0.0 } else { leakage } }
}
