//! Readout: axial → cyclotron transfer and magnetic-bottle measurement.

use std::f64::consts::FRAC_PI_2;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::hamiltonians::transfer;
use crate::linalg::{propagator, HilbertSpec, Mode, Spin, StateVector, C64};

/// Amplitude picked up by |1_z 0_c⟩ → |0_z 1_c⟩ at the first full swap of
/// the transfer generator i·g·(a_c†a_z − a_c a_z†).
pub const SWAP_PHASE: f64 = 1.0;

/// Probability mass below which a measurement is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-15;

const PRECONDITION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottleConfig {
    /// Bottle shift constant ω̃_z.
    pub omega_tilde: f64,
    pub g_factor: f64,
}

impl BottleConfig {
    pub fn new(omega_tilde: f64, g_factor: f64) -> Result<Self> {
        let b = BottleConfig { omega_tilde, g_factor };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_tilde > 0.0) || !self.omega_tilde.is_finite() {
            return Err(Error::InvalidConfig(format!("omega_tilde must be > 0, got {}", self.omega_tilde)));
        }
        if !self.g_factor.is_finite() {
            return Err(Error::InvalidConfig("g_factor must be finite".into()));
        }
        Ok(())
    }
}

/// First full-swap time π/(2g) of the transfer generator.
pub fn transfer_time(g_strength: f64) -> Result<f64> {
    if !(g_strength > 0.0) || !g_strength.is_finite() {
        return Err(Error::InvalidInput(format!("transfer strength must be > 0, got {g_strength}")));
    }
    Ok(FRAC_PI_2 / g_strength)
}

/// Population outside axial ∈ {0, 1} with the cyclotron in its ground state.
pub fn transfer_residual(state: &StateVector) -> f64 {
    let spec = state.spec();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| spec.occupation(i, Mode::Axial) > 1 || spec.occupation(i, Mode::Cyclotron) > 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

#[derive(Clone, Debug)]
pub struct TransferOutcome {
    pub state: StateVector,
    pub warnings: Vec<Warning>,
}

/// Swaps the axial qubit into the cyclotron mode.
///
/// Inputs outside the swap's premise are still evolved; the offending
/// population is reported as a precondition warning.
pub fn readout_transfer(state: &StateVector, g_strength: f64) -> Result<TransferOutcome> {
    let t = transfer_time(g_strength)?;
    let spec = state.spec();
    let u = propagator(&transfer(spec, g_strength)?, t)?;
    let out = state.apply(&u)?;
    let mut warnings = Vec::new();
    let residual = transfer_residual(state);
    if residual > PRECONDITION_TOL {
        warnings.push(Warning::Precondition {
            residual,
            detail: "readout transfer expects n_z in {0,1} and an empty cyclotron mode".into(),
        });
    }
    warnings.extend(out.truncation_warnings());
    Ok(TransferOutcome { state: out, warnings })
}

/// Axial frequency shift ω̃_z(g·s/4 + n_c + 1/2).
pub fn axial_shift(n_c: usize, s: i8, bottle: &BottleConfig) -> f64 {
    bottle.omega_tilde * (bottle.g_factor * f64::from(s) / 4.0 + n_c as f64 + 0.5)
}

/// One joint (n_c, s) outcome and its Born probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub n_c: usize,
    pub s: i8,
    pub probability: f64,
}

/// Born distribution over (n_c, s), ordered by n_c then s = −1, +1.
pub fn outcome_distribution(state: &StateVector) -> Result<Vec<Outcome>> {
    let norm = state.norm();
    if (norm - 1.0).abs() > PRECONDITION_TOL {
        return Err(Error::InvalidInput(format!("measured state has norm {norm}")));
    }
    let spec = state.spec();
    let mut probs = vec![[0.0f64; 2]; spec.cyclotron_dim()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let slot = if spec.occupation(i, Mode::Spin) == Spin::Down.index() { 0 } else { 1 };
        probs[spec.occupation(i, Mode::Cyclotron)][slot] += a.norm_sqr();
    }
    let total: f64 = probs.iter().flatten().sum();
    if total < DEGENERATE_TOL {
        return Err(Error::MeasurementDegenerate(total));
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .flat_map(|(n_c, [down, up])| {
            [Outcome { n_c, s: -1, probability: down / total }, Outcome { n_c, s: 1, probability: up / total }]
        })
        .collect())
}

/// Draws one outcome from `dist` with a ChaCha8 stream seeded by `seed`.
pub fn sample(dist: &[Outcome], seed: u64) -> Outcome {
    let u: f64 = ChaCha8Rng::seed_from_u64(seed).random();
    let mut acc = 0.0;
    let mut last = dist[0];
    for o in dist {
        if o.probability <= 0.0 {
            continue;
        }
        acc += o.probability;
        last = *o;
        if u < acc {
            return *o;
        }
    }
    last
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub seed: u64,
    pub n_c: usize,
    /// σ_z eigenvalue.
    pub s: i8,
    pub probability: f64,
    pub shift: f64,
    pub post_state: StateVector,
}

impl MeasurementRecord {
    /// `seed n_c s probability shift/ω̃_z`
    pub fn row(&self, bottle: &BottleConfig) -> String {
        format!(
            "{} {} {:+} {:.12e} {:.12e}",
            self.seed,
            self.n_c,
            self.s,
            self.probability,
            self.shift / bottle.omega_tilde
        )
    }
}

/// Projects `state` onto the outcome (n_c, s) and renormalizes.
pub fn collapse(state: &StateVector, n_c: usize, s: i8) -> Result<StateVector> {
    let spec = state.spec();
    let spin = if s > 0 { Spin::Up } else { Spin::Down };
    let kept = state.amplitudes().map_with_location(|i, _, a| {
        if spec.occupation(i, Mode::Cyclotron) == n_c && spec.occupation(i, Mode::Spin) == spin.index() {
            a
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let p: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if p < DEGENERATE_TOL {
        return Err(Error::MeasurementDegenerate(p));
    }
    StateVector::from_amplitudes(spec, kept)?.normalize()
}

/// Born-rule measurement of (a_c†a_c, σ_z), deterministic in `seed`.
pub fn projective_measure(state: &StateVector, seed: u64, bottle: &BottleConfig) -> Result<MeasurementRecord> {
    bottle.validate()?;
    let dist = outcome_distribution(state)?;
    let o = sample(&dist, seed);
    Ok(MeasurementRecord {
        seed,
        n_c: o.n_c,
        s: o.s,
        probability: o.probability,
        shift: axial_shift(o.n_c, o.s, bottle),
        post_state: collapse(state, o.n_c, o.s)?,
    })
}

/// Outcomes of `shots` fresh measurements with seeds `seed`, `seed + 1`, ...
///
/// Each shot equals `projective_measure(state, seed + i, _)` without
/// building the post-measurement state.
pub fn sample_shots(state: &StateVector, seed: u64, shots: usize) -> Result<Vec<Outcome>> {
    let dist = outcome_distribution(state)?;
    Ok((0..shots as u64).map(|i| sample(&dist, seed.wrapping_add(i))).collect())
}

/// Axial thermalization after readout: projection onto n_z = 0 followed by
/// renormalization. Returns the reset state and the discarded population.
pub fn axial_reset(state: &StateVector) -> Result<(StateVector, f64)> {
    let spec: HilbertSpec = state.spec();
    let kept =
        state.amplitudes().map_with_location(
            |i, _, a| {
                if spec.occupation(i, Mode::Axial) == 0 {
                    a
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        );
    let p: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if p < DEGENERATE_TOL {
        return Err(Error::MeasurementDegenerate(p));
    }
    let total = state.norm().powi(2);
    Ok((StateVector::from_amplitudes(spec, kept)?.normalize()?, total - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::BasisLabel;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spec() -> HilbertSpec {
        HilbertSpec::new(4, 3, 1).unwrap()
    }

    fn bottle() -> BottleConfig {
        BottleConfig::new(1.0, 2.0023).unwrap()
    }

    fn l(n_z: usize, s: Spin, n_c: usize) -> BasisLabel {
        BasisLabel::new(n_z, s).with_cyclotron(n_c)
    }

    #[test]
    fn transfer_time_arithmetic() {
        assert!((transfer_time(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((transfer_time(2e3).unwrap() * 2.0 - transfer_time(1e3).unwrap()).abs() < 1e-18);
        assert!(transfer_time(0.0).is_err());
    }

    #[test]
    fn shift_values() {
        let b = bottle();
        assert!((axial_shift(0, 1, &b) - 1.000575).abs() < 1e-12);
        assert!((axial_shift(0, -1, &b) + 0.000575).abs() < 1e-12);
        assert!((axial_shift(1, 1, &b) - axial_shift(0, 1, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_moves_axial_qubit() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let psi = StateVector::from_components(spec(), &[(l(0, Spin::Down, 0), h), (l(1, Spin::Up, 0), h)]).unwrap();
        let out = readout_transfer(&psi, 0.7).unwrap();
        assert!(out.warnings.is_empty());
        assert!((out.state.amp(l(0, Spin::Down, 0)) - h).norm() < 1e-12);
        assert!((out.state.amp(l(0, Spin::Up, 1)) - h * SWAP_PHASE).norm() < 1e-12);
    }

    #[test]
    fn two_quantum_input_warns() {
        let psi = StateVector::basis(spec(), l(1, Spin::Up, 1)).unwrap();
        let out = readout_transfer(&psi, 1.0).unwrap();
        assert!(matches!(out.warnings[0], Warning::Precondition { residual, .. } if (residual - 1.0).abs() < 1e-12));
        // The two-quantum sector has eigenvalues 0, ±2g, so at gt = π/2 the
        // state returns as −|1,1⟩ rather than SWAP_PHASE² |1,1⟩.
        assert!((out.state.amp(l(1, Spin::Up, 1)) + C64::new(SWAP_PHASE * SWAP_PHASE, 0.0)).norm() < 1e-9);
        let half = propagator(&transfer(spec(), 1.0).unwrap(), FRAC_PI_2 / 2.0).unwrap();
        let mid = psi.apply(&half).unwrap();
        assert!(mid.amp(l(2, Spin::Up, 0)).norm() > 0.5);
    }

    #[test]
    fn eigenstate_measures_with_certainty() {
        let psi = StateVector::basis(spec(), l(2, Spin::Up, 1)).unwrap();
        let r = projective_measure(&psi, 9, &bottle()).unwrap();
        assert_eq!((r.n_c, r.s), (1, 1));
        assert!((r.probability - 1.0).abs() < 1e-15);
        assert_eq!(r.post_state, psi);
    }

    #[test]
    fn shots_match_single_measurements() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let psi = StateVector::from_components(spec(), &[(l(0, Spin::Down, 0), h), (l(0, Spin::Up, 1), h)]).unwrap();
        let shots = sample_shots(&psi, 40, 25).unwrap();
        for (i, o) in shots.iter().enumerate() {
            let r = projective_measure(&psi, 40 + i as u64, &bottle()).unwrap();
            assert_eq!((o.n_c, o.s), (r.n_c, r.s));
            let expect = StateVector::basis(spec(), l(0, if r.s > 0 { Spin::Up } else { Spin::Down }, r.n_c)).unwrap();
            assert!((crate::linalg::fidelity(&r.post_state, &expect).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reset_projects_axial_ground() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let psi = StateVector::from_components(spec(), &[(l(0, Spin::Down, 1), h), (l(2, Spin::Up, 1), h)]).unwrap();
        let (out, lost) = axial_reset(&psi).unwrap();
        assert!((lost - 0.5).abs() < 1e-12);
        assert!((out.amp(l(0, Spin::Down, 1)).norm() - 1.0).abs() < 1e-12);
        let excited = StateVector::basis(spec(), l(1, Spin::Down, 0)).unwrap();
        assert!(matches!(axial_reset(&excited), Err(Error::MeasurementDegenerate(_))));
    }

    #[test]
    fn unnormalized_state_rejected() {
        let psi = StateVector::from_components(spec(), &[(l(0, Spin::Down, 0), C64::new(2.0, 0.0))]).unwrap();
        assert!(projective_measure(&psi, 0, &bottle()).is_err());
        assert!(BottleConfig::new(0.0, 2.0).is_err());
    }
}
