//! Timed pulses, sequence execution and the controlled-NOT protocol.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::hamiltonians::{
    carrier_antinode, effective_cn, sideband_minus, sideband_plus, spin_drive, transfer_with_phase, HamiltonianKind,
    LabHamiltonian,
};
use crate::linalg::{evolve_columns, propagator, Block, HilbertSpec, Operator, StateVector};
use crate::trap::{derive_frequencies, Couplings, DriveConfig, SpinDriveConfig, TrapConfig};

/// Tolerance on the input norm accepted by [`run`].
pub const NORM_TOL: f64 = 1e-6;

/// One application of a named Hamiltonian.
///
/// `strength` is the coupling of the effective Hamiltonian for `kind`:
/// ϖ_s (spin drive), η (sidebands), ζ (carrier), κ (effective CN) or
/// g (transfer). `phi` and `Omega` only matter in full-lab mode and default
/// to the resonance and standing-wave position of each kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub kind: HamiltonianKind,
    pub duration_s: f64,
    pub strength: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub varphi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, rename = "Omega", skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lamb_dicke: Option<f64>,
}

impl Pulse {
    fn base(kind: HamiltonianKind, strength: f64, duration_s: f64) -> Self {
        Pulse { kind, duration_s, strength, theta: 0.0, varphi: 0.0, phi: None, omega: None, lamb_dicke: None }
    }

    pub fn spin_drive(rabi_s: f64, theta: f64, duration_s: f64) -> Self {
        Pulse { theta, ..Self::base(HamiltonianKind::SpinDrive, rabi_s, duration_s) }
    }

    pub fn sideband_minus(eta: f64, varphi: f64, duration_s: f64) -> Self {
        Pulse { varphi, ..Self::base(HamiltonianKind::SidebandMinus, eta, duration_s) }
    }

    pub fn sideband_plus(eta: f64, varphi: f64, duration_s: f64) -> Self {
        Pulse { varphi, ..Self::base(HamiltonianKind::SidebandPlus, eta, duration_s) }
    }

    pub fn carrier(zeta: f64, lamb_dicke: f64, varphi: f64, duration_s: f64) -> Self {
        Pulse { varphi, lamb_dicke: Some(lamb_dicke), ..Self::base(HamiltonianKind::CarrierAntinode, zeta, duration_s) }
    }

    pub fn effective_cn(kappa: f64, duration_s: f64) -> Self {
        Self::base(HamiltonianKind::EffectiveCn, kappa, duration_s)
    }

    /// Axial → cyclotron swap generator at ϕ̄ = −π/2.
    pub fn transfer(g_strength: f64, duration_s: f64) -> Self {
        Pulse { varphi: -FRAC_PI_2, ..Self::base(HamiltonianKind::Transfer, g_strength, duration_s) }
    }

    /// Free evolution; the identity in the rotating frame.
    pub fn idle(duration_s: f64) -> Self {
        Self::base(HamiltonianKind::FreeMotion, 0.0, duration_s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration_s >= 0.0) || !self.duration_s.is_finite() {
            return Err(Error::InvalidInput(format!("pulse duration must be >= 0, got {}", self.duration_s)));
        }
        if !self.strength.is_finite() {
            return Err(Error::InvalidInput("pulse strength must be finite".into()));
        }
        Ok(())
    }

    /// Effective Hamiltonian of this pulse in the rotating frame.
    pub fn effective_hamiltonian(&self, spec: HilbertSpec) -> Result<Operator> {
        self.validate()?;
        match self.kind {
            HamiltonianKind::FreeMotion => Ok(Operator::zero(spec)),
            HamiltonianKind::SpinDrive => spin_drive(spec, self.strength, self.theta),
            HamiltonianKind::SidebandMinus => sideband_minus(spec, self.strength, self.varphi),
            HamiltonianKind::SidebandPlus => sideband_plus(spec, self.strength, self.varphi),
            HamiltonianKind::CarrierAntinode => {
                let ld = self.lamb_dicke.ok_or_else(|| Error::InvalidInput("carrier pulse needs lamb_dicke".into()))?;
                carrier_antinode(spec, self.strength, ld, self.varphi)
            }
            HamiltonianKind::EffectiveCn => effective_cn(spec, self.strength),
            HamiltonianKind::Transfer => transfer_with_phase(spec, self.strength, self.varphi),
            HamiltonianKind::FullLabFrame => {
                Err(Error::InvalidInput("full_lab_frame is not a pulse kind; use RunMode::FullLab".into()))
            }
        }
    }

    /// Lab-frame drive realizing this pulse, or `None` for free evolution.
    fn lab_hamiltonian(&self, spec: HilbertSpec, ctx: &LabContext) -> Result<Option<LabHamiltonian>> {
        self.validate()?;
        let trap = &ctx.trap;
        let f = derive_frequencies(trap)?;
        let ld = trap.lamb_dicke(ctx.k)?;
        let wave = |zeta_or_eps: f64, cyclotron: bool, omega: f64, phi: f64| -> Result<Option<LabHamiltonian>> {
            let alpha =
                if cyclotron { trap.alpha_for_epsilon(zeta_or_eps) } else { trap.alpha_for_zeta(ctx.k, zeta_or_eps) };
            let drv = DriveConfig {
                alpha,
                k: ctx.k,
                omega: self.omega.unwrap_or(omega),
                phi: self.phi.unwrap_or(phi),
                varphi: self.varphi,
            };
            Ok(Some(LabHamiltonian::standing_wave(spec, trap, &drv)?))
        };
        match self.kind {
            HamiltonianKind::FreeMotion => Ok(None),
            HamiltonianKind::SpinDrive => {
                let spin = SpinDriveConfig { b: trap.b_for_rabi(self.strength), theta: self.theta };
                let lab = LabHamiltonian::spin_field(spec, trap, &spin)?;
                Ok(Some(match self.omega {
                    Some(w) => lab.with_drive_frequency(w),
                    None => lab,
                }))
            }
            HamiltonianKind::SidebandMinus => wave(self.strength / ld, false, f.omega_s - f.omega_z, 0.0),
            HamiltonianKind::SidebandPlus => wave(self.strength / ld, false, f.omega_s + f.omega_z, 0.0),
            HamiltonianKind::CarrierAntinode => {
                if let Some(pulse_ld) = self.lamb_dicke {
                    if (pulse_ld - ld).abs() > 1e-6 * ld {
                        return Err(Error::InvalidInput(format!(
                            "carrier pulse lamb_dicke {pulse_ld} differs from the trap's {ld}"
                        )));
                    }
                }
                wave(self.strength, false, f.omega_s, -FRAC_PI_2)
            }
            HamiltonianKind::Transfer => wave(self.strength / ld, true, f.omega_c - f.omega_z, -FRAC_PI_2),
            HamiltonianKind::EffectiveCn | HamiltonianKind::FullLabFrame => {
                Err(Error::InvalidInput(format!("{:?} has no lab-frame drive", self.kind)))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    #[serde(rename = "pulse", default)]
    pub pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Self {
        PulseSequence { pulses }
    }

    pub fn push(&mut self, pulse: Pulse) {
        self.pulses.push(pulse);
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration_s).sum()
    }

    /// Sequence followed by `other`.
    pub fn then(&self, other: &PulseSequence) -> PulseSequence {
        PulseSequence { pulses: self.pulses.iter().chain(&other.pulses).cloned().collect() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("pulse sequences always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("pulse sequence: {e}")))
    }
}

/// Physical setting for full-lab execution.
#[derive(Clone, Debug, PartialEq)]
pub struct LabContext {
    pub trap: TrapConfig,
    /// Standing-wave wavevector.
    pub k: f64,
    /// Maximum integration step; `None` picks one from the fastest drive frequency.
    pub step: Option<f64>,
    /// Samples per period of the fastest rotating term when `step` is `None`.
    pub samples_per_period: f64,
}

impl LabContext {
    pub fn new(trap: TrapConfig, k: f64) -> Self {
        LabContext { trap, k, step: None, samples_per_period: 40.0 }
    }

    pub fn with_lamb_dicke(trap: TrapConfig, lamb_dicke: f64) -> Result<Self> {
        let k = trap.wavevector_for(lamb_dicke)?;
        Ok(Self::new(trap, k))
    }

    fn step_for(&self, lab: &LabHamiltonian) -> f64 {
        let w = lab.max_frequency();
        let auto = if w > 0.0 { TAU / (self.samples_per_period * w) } else { f64::MAX };
        match self.step {
            Some(s) => s.min(auto),
            None => auto,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum RunMode<'a> {
    /// Concatenate propagators of the rotating-frame Hamiltonians.
    Effective,
    /// Integrate the standing-wave/spin-field drives in the frame rotating
    /// with the free motion; results share the effective mode's frame.
    FullLab(&'a LabContext),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: StateVector,
    pub warnings: Vec<Warning>,
}

/// Propagates column states through every pulse, left to right.
pub(crate) fn propagate_columns(
    seq: &PulseSequence,
    spec: HilbertSpec,
    mut cols: Block,
    mode: RunMode<'_>,
) -> Result<Block> {
    let mut clock = 0.0;
    for pulse in &seq.pulses {
        pulse.validate()?;
        match mode {
            RunMode::Effective => {
                if pulse.duration_s > 0.0 {
                    let u = propagator(&pulse.effective_hamiltonian(spec)?, pulse.duration_s)?;
                    cols = u.matrix() * cols;
                }
            }
            RunMode::FullLab(ctx) => {
                if let Some(lab) = pulse.lab_hamiltonian(spec, ctx)? {
                    let step = ctx.step_for(&lab);
                    cols = evolve_columns(|t| lab.interaction(t), cols, clock, clock + pulse.duration_s, step)?;
                }
            }
        }
        clock += pulse.duration_s;
    }
    Ok(cols)
}

/// Net propagator of a sequence on `spec`.
pub fn sequence_propagator(seq: &PulseSequence, spec: HilbertSpec, mode: RunMode<'_>) -> Result<Operator> {
    let d = spec.total_dim();
    let cols = propagate_columns(seq, spec, Block::identity(d, d), mode)?;
    Operator::new(spec, cols, false)
}

fn check_normalized(state: &StateVector) -> Result<()> {
    let n = state.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidInput(format!("input state norm {n} is not 1")));
    }
    Ok(())
}

/// Runs several inputs through the same sequence.
pub fn run_many(seq: &PulseSequence, inputs: &[StateVector], mode: RunMode<'_>) -> Result<Vec<RunOutcome>> {
    let Some(first) = inputs.first() else {
        return Ok(Vec::new());
    };
    let spec = first.spec();
    let d = spec.total_dim();
    let mut cols = Block::zeros(d, inputs.len());
    for (j, s) in inputs.iter().enumerate() {
        if s.spec() != spec {
            return Err(Error::InvalidDimension("inputs have different specs".into()));
        }
        check_normalized(s)?;
        cols.set_column(j, s.amplitudes());
    }
    let out = propagate_columns(seq, spec, cols, mode)?;
    out.column_iter()
        .map(|col| {
            let state = StateVector::from_raw(spec, col.into_owned());
            let warnings = state.truncation_warnings();
            Ok(RunOutcome { state, warnings })
        })
        .collect()
}

pub fn run(seq: &PulseSequence, input: &StateVector, mode: RunMode<'_>) -> Result<RunOutcome> {
    Ok(run_many(seq, std::slice::from_ref(input), mode)?.remove(0))
}

/// The two-pulse controlled-NOT protocol and its timing bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct CnPlan {
    pub sequence: PulseSequence,
    /// Carrier duration t*.
    pub gate_time: f64,
    /// Compensation spin-drive duration τ.
    pub compensation_time: f64,
    /// Integer n in τϖ_s = θ₀ ± 2πn.
    pub n: u64,
    /// +1 or −1, the sign in front of 2πn.
    pub sign: i8,
    /// Global sign (−1)^n of the net unitary on the register.
    pub global_sign: f64,
}

/// Carrier at ϕ̄ = 0 for t* followed by a θ = 0 spin drive that undoes the
/// carrier's n_z-independent rotation.
///
/// The carrier's n_z-dependent term is (κ/2)·n_z·σ_x, so the conditional flip
/// needs t* = π/κ. Its n_z = 0 block rotates the spin by
/// θ₀ = 2ζ(1 − η_LD²/2)t*; the compensation pulse satisfies
/// τϖ_s = θ₀ ± 2πn with the shortest non-negative τ among n ≥ `compensation_n`.
pub fn cn_plan(couplings: &Couplings, compensation_n: u64) -> Result<CnPlan> {
    let Couplings { zeta, lamb_dicke, rabi_s, kappa, .. } = *couplings;
    if !(kappa > 0.0) || !(zeta > 0.0) || !(rabi_s > 0.0) {
        return Err(Error::InfeasibleCompensation(format!(
            "need kappa, zeta and rabi_s > 0 (kappa = {kappa:e}, zeta = {zeta:e}, rabi_s = {rabi_s:e})"
        )));
    }
    let gate_time = PI / kappa;
    let theta0 = 2.0 * zeta * (1.0 - lamb_dicke * lamb_dicke / 2.0) * gate_time;
    let turns = (theta0 / TAU).floor();
    let (n, sign) = if turns >= compensation_n as f64 { (turns as u64, -1i8) } else { (compensation_n, 1i8) };
    let angle = theta0 + f64::from(sign) * TAU * n as f64;
    if angle < 0.0 {
        return Err(Error::InfeasibleCompensation(format!("negative compensation angle {angle}")));
    }
    let compensation_time = angle / rabi_s;
    let sequence = PulseSequence::new(vec![
        Pulse::carrier(zeta, lamb_dicke, 0.0, gate_time),
        Pulse::spin_drive(rabi_s, 0.0, compensation_time),
    ]);
    Ok(CnPlan { sequence, gate_time, compensation_time, n, sign, global_sign: if n % 2 == 0 { 1.0 } else { -1.0 } })
}

pub fn cn_sequence(couplings: &Couplings, compensation_n: u64) -> Result<PulseSequence> {
    Ok(cn_plan(couplings, compensation_n)?.sequence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{BasisLabel, Spin, C64};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spec() -> HilbertSpec {
        HilbertSpec::spin_axial(6).unwrap()
    }

    fn l(n: usize, s: Spin) -> BasisLabel {
        BasisLabel::new(n, s)
    }

    fn couplings(zeta: f64, ld: f64, rabi: f64) -> Couplings {
        Couplings { epsilon: 0.0, zeta, eta: zeta * ld, kappa: 2.0 * zeta * ld * ld, lamb_dicke: ld, rabi_s: rabi }
    }

    #[test]
    fn empty_sequence_is_identity() {
        let psi = StateVector::basis(spec(), l(1, Spin::Up)).unwrap();
        let out = run(&PulseSequence::default(), &psi, RunMode::Effective).unwrap();
        assert_eq!(out.state, psi);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn half_spin_flip() {
        let rabi = 1.3;
        let seq = PulseSequence::new(vec![Pulse::spin_drive(rabi, 0.0, FRAC_PI_2 / rabi)]);
        let out = run(&seq, &StateVector::basis(spec(), l(0, Spin::Down)).unwrap(), RunMode::Effective).unwrap().state;
        assert!((out.amp(l(0, Spin::Down)) - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((out.amp(l(0, Spin::Up)) - C64::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-12);
    }

    #[test]
    fn red_sideband_full_flop() {
        let eta = 0.4;
        let vp = 1.1;
        let seq = PulseSequence::new(vec![Pulse::sideband_minus(eta, vp, FRAC_PI_2 / eta)]);
        let out = run(&seq, &StateVector::basis(spec(), l(0, Spin::Up)).unwrap(), RunMode::Effective).unwrap().state;
        let expect = C64::new(0.0, -1.0) * C64::from_polar(1.0, vp);
        assert!((out.amp(l(1, Spin::Down)) - expect).norm() < 1e-12);
    }

    #[test]
    fn run_rejects_unnormalized_and_mismatched() {
        let psi = StateVector::basis(spec(), l(0, Spin::Up)).unwrap();
        let doubled = StateVector::from_amplitudes(spec(), psi.amplitudes() * C64::new(2.0, 0.0)).unwrap();
        assert!(run(&PulseSequence::default(), &doubled, RunMode::Effective).is_err());
        let bad = PulseSequence::new(vec![Pulse::spin_drive(1.0, 0.0, -1.0)]);
        assert!(run(&bad, &psi, RunMode::Effective).is_err());
    }

    #[test]
    fn sequence_toml_round_trip() {
        let seq = PulseSequence::new(vec![
            Pulse::spin_drive(1.0, 0.3, 2.0),
            Pulse::carrier(0.5, 0.1, 0.0, 3.0),
            Pulse { omega: Some(4.0), phi: Some(0.1), ..Pulse::sideband_plus(0.2, -0.4, 1.5) },
            Pulse::transfer(0.7, 1.0),
        ]);
        let text = seq.to_toml();
        assert!(text.contains("[[pulse]]"));
        assert!(text.contains("kind = \"carrier_antinode\""));
        assert!(text.contains("Omega = 4.0"));
        assert_eq!(PulseSequence::from_toml(&text).unwrap(), seq);
        assert_abs_diff_eq!(seq.total_duration(), 7.5);
    }

    #[test]
    fn cn_plan_timing() {
        let c = couplings(0.01, 0.1, 0.02);
        let plan = cn_plan(&c, 0).unwrap();
        assert_abs_diff_eq!(plan.gate_time, PI / c.kappa, epsilon = 1e-9);
        let theta0 = 2.0 * c.zeta * (1.0 - 0.005) * plan.gate_time;
        // Same angle as 4ζ(1 − η_LD²/2) evaluated at π/(2κ).
        assert_abs_diff_eq!(theta0, 4.0 * c.zeta * (1.0 - 0.005) * PI / (2.0 * c.kappa), epsilon = 1e-9);
        let angle = plan.compensation_time * c.rabi_s;
        assert!((0.0..TAU).contains(&angle));
        assert_abs_diff_eq!(angle, theta0 - TAU * plan.n as f64, epsilon = 1e-9);
        assert_eq!(plan.sign, -1);

        let forced = cn_plan(&c, plan.n + 3).unwrap();
        assert_eq!(forced.sign, 1);
        assert_abs_diff_eq!(forced.compensation_time * c.rabi_s, theta0 + TAU * (plan.n + 3) as f64, epsilon = 1e-9);
    }

    #[test]
    fn cn_plan_rejects_zero_couplings() {
        assert!(matches!(cn_plan(&couplings(0.0, 0.1, 1.0), 0), Err(Error::InfeasibleCompensation(_))));
        assert!(matches!(cn_plan(&couplings(1.0, 0.1, 0.0), 0), Err(Error::InfeasibleCompensation(_))));
    }

    #[test]
    fn cn_flips_target_when_control_set() {
        let plan = cn_plan(&couplings(0.3, 0.2, 0.5), 0).unwrap();
        let out = run(&plan.sequence, &StateVector::basis(spec(), l(1, Spin::Down)).unwrap(), RunMode::Effective)
            .unwrap()
            .state;
        let expect = C64::new(0.0, -1.0) * plan.global_sign;
        assert!((out.amp(l(1, Spin::Up)) - expect).norm() < 1e-9);

        // n_z = 0 is inert up to the reported sign.
        let out = run(&plan.sequence, &StateVector::basis(spec(), l(0, Spin::Up)).unwrap(), RunMode::Effective)
            .unwrap()
            .state;
        assert!((out.amp(l(0, Spin::Up)) - C64::new(plan.global_sign, 0.0)).norm() < 1e-9);
    }
}
