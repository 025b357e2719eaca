//! Register-level gate extraction, phase equivalence and RWA benchmarks.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::hamiltonians::{carrier_antinode, carrier_antinode_secular};
use crate::linalg::{fidelity, propagator, BasisLabel, HilbertSpec, Spin, StateVector, C64};
use crate::planner::register_labels;
use crate::pulses::{cn_plan, run, run_many, CnPlan, LabContext, Pulse, PulseSequence, RunMode};
use crate::trap::{Couplings, TrapConfig};

pub type Gate4 = Matrix4<C64>;

/// Tolerance used by [`phase_equivalent`].
pub const PHASE_TOL: f64 = 1e-6;

/// Indices of |0↓⟩, |0↑⟩, |1↓⟩, |1↑⟩ (cyclotron and magnetron in |0⟩).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitRegisterBasis {
    pub indices: [usize; 4],
}

impl QubitRegisterBasis {
    pub fn new(spec: HilbertSpec) -> Result<Self> {
        let labels = register_labels();
        let mut indices = [0; 4];
        for (slot, label) in indices.iter_mut().zip(labels) {
            *slot = spec.index(label)?;
        }
        Ok(QubitRegisterBasis { indices })
    }

    pub fn labels(&self) -> [BasisLabel; 4] {
        register_labels()
    }

    pub fn states(&self, spec: HilbertSpec) -> Result<Vec<StateVector>> {
        register_labels().into_iter().map(|l| StateVector::basis(spec, l)).collect()
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Reduced CN realized by the carrier protocol: identity on n_z = 0 and
/// −iσ_x on n_z = 1.
pub fn cn_reduced() -> Gate4 {
    let (o, z, mi) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
    Matrix4::new(o, z, z, z, z, o, z, z, z, z, z, mi, z, z, mi, z)
}

/// Textbook controlled-NOT, control = axial qubit, target = spin.
pub fn cn_textbook() -> Gate4 {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    Matrix4::new(o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z)
}

pub fn unitarity_defect(m: &Gate4) -> f64 {
    (m.adjoint() * m - Gate4::identity()).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_deviation(a: &Gate4, b: &Gate4) -> f64 {
    (a - b).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// |tr(M†U)|²/16.
pub fn gate_fidelity(m: &Gate4, ideal: &Gate4) -> f64 {
    ((m.adjoint() * ideal).trace().norm_sqr() / 16.0).clamp(0.0, 1.0)
}

/// Unit phase e^{iφ} minimizing ‖M − e^{iφ}U‖.
pub fn global_phase(m: &Gate4, ideal: &Gate4) -> C64 {
    let t = (ideal.adjoint() * m).trace();
    if t.norm() > 0.0 {
        t / t.norm()
    } else {
        c(1.0, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    pub truth_table: Gate4,
    pub subspace_unitarity_defect: f64,
    pub leakage: f64,
    pub fidelity_vs_ideal: f64,
    pub global_phase: C64,
    pub warnings: Vec<Warning>,
}

#[derive(Serialize, Deserialize)]
struct ReportText {
    fidelity_vs_ideal: f64,
    leakage: f64,
    subspace_unitarity_defect: f64,
    global_phase: [f64; 2],
    truth_table_re: Vec<Vec<f64>>,
    truth_table_im: Vec<Vec<f64>>,
}

impl GateReport {
    pub fn to_toml(&self) -> String {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..4).map(|i| (0..4).map(|j| f(&self.truth_table[(i, j)])).collect()).collect()
        };
        let text = ReportText {
            fidelity_vs_ideal: self.fidelity_vs_ideal,
            leakage: self.leakage,
            subspace_unitarity_defect: self.subspace_unitarity_defect,
            global_phase: [self.global_phase.re, self.global_phase.im],
            truth_table_re: rows(|z| z.re),
            truth_table_im: rows(|z| z.im),
        };
        toml::to_string(&text).expect("reports always serialize")
    }

    /// Parses the text written by [`GateReport::to_toml`]; warnings are not stored.
    pub fn from_toml(text: &str) -> Result<Self> {
        let r: ReportText = toml::from_str(text).map_err(|e| Error::InvalidInput(format!("gate report: {e}")))?;
        let bad = || Error::InvalidInput("gate report truth table must be 4x4".into());
        if r.truth_table_re.len() != 4 || r.truth_table_im.len() != 4 {
            return Err(bad());
        }
        let mut m = Gate4::zeros();
        for i in 0..4 {
            if r.truth_table_re[i].len() != 4 || r.truth_table_im[i].len() != 4 {
                return Err(bad());
            }
            for j in 0..4 {
                m[(i, j)] = c(r.truth_table_re[i][j], r.truth_table_im[i][j]);
            }
        }
        Ok(GateReport {
            truth_table: m,
            subspace_unitarity_defect: r.subspace_unitarity_defect,
            leakage: r.leakage,
            fidelity_vs_ideal: r.fidelity_vs_ideal,
            global_phase: c(r.global_phase[0], r.global_phase[1]),
            warnings: Vec::new(),
        })
    }
}

/// Runs the four register states through `seq` and compares the 4×4
/// restriction with `ideal`.
pub fn extract_gate(seq: &PulseSequence, spec: HilbertSpec, mode: RunMode<'_>, ideal: &Gate4) -> Result<GateReport> {
    let basis = QubitRegisterBasis::new(spec)?;
    let outs = run_many(seq, &basis.states(spec)?, mode)?;
    let mut m = Gate4::zeros();
    let mut leakage = 0.0f64;
    let mut warnings = Vec::new();
    for (j, out) in outs.into_iter().enumerate() {
        let amps = out.state.amplitudes();
        let mut inside = 0.0;
        for (i, &idx) in basis.indices.iter().enumerate() {
            m[(i, j)] = amps[idx];
            inside += amps[idx].norm_sqr();
        }
        leakage = leakage.max((out.state.norm().powi(2) - inside).max(0.0));
        for w in out.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    Ok(GateReport {
        subspace_unitarity_defect: unitarity_defect(&m),
        leakage,
        fidelity_vs_ideal: gate_fidelity(&m, ideal),
        global_phase: global_phase(&m, ideal),
        truth_table: m,
        warnings,
    })
}

/// Diagonal phase settings with `diag(left)·m·diag(right) ≈ ideal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseWitness {
    pub left: [C64; 4],
    pub right: [C64; 4],
    pub deviation: f64,
}

impl PhaseWitness {
    pub fn apply(&self, m: &Gate4) -> Gate4 {
        Gate4::from_fn(|i, j| self.left[i] * m[(i, j)] * self.right[j])
    }
}

/// Whether `m` equals `ideal` up to diagonal phase gates on both sides.
///
/// Phases follow in closed form from the nonzero pattern of `ideal`: each
/// nonzero entry fixes a_i + b_j, and a spanning forest of the row/column
/// graph assigns them. Returns `None` when the pattern or moduli differ, or
/// when the residual after the assignment exceeds [`PHASE_TOL`].
pub fn phase_equivalent(m: &Gate4, ideal: &Gate4) -> Result<Option<PhaseWitness>> {
    phase_equivalent_within(m, ideal, PHASE_TOL)
}

/// [`phase_equivalent`] with a caller-chosen tolerance, for gates that are
/// only approximately realized (the unitarity precondition is relaxed to the
/// same tolerance when it exceeds [`PHASE_TOL`]).
pub fn phase_equivalent_within(m: &Gate4, ideal: &Gate4, tol: f64) -> Result<Option<PhaseWitness>> {
    for (name, g) in [("m", m), ("ideal", ideal)] {
        let d = unitarity_defect(g);
        if d > tol.max(PHASE_TOL) {
            return Err(Error::ContractViolation(format!("{name} is not unitary (defect {d:e})")));
        }
    }
    let support = |z: C64| z.norm() > 0.5;
    for i in 0..4 {
        for j in 0..4 {
            if (m[(i, j)].norm() - ideal[(i, j)].norm()).abs() > tol {
                return Ok(None);
            }
        }
    }
    // Nodes 0..4 are rows (a_i), 4..8 columns (b_j).
    let mut angle: [Option<f64>; 8] = [None; 8];
    for root in 0..8 {
        if angle[root].is_some() {
            continue;
        }
        angle[root] = Some(0.0);
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            let here = angle[node].unwrap();
            for other in 0..4 {
                let (i, j) = if node < 4 { (node, other) } else { (other, node - 4) };
                if !support(ideal[(i, j)]) {
                    continue;
                }
                let next = if node < 4 { 4 + j } else { i };
                if angle[next].is_none() {
                    let sum = ideal[(i, j)].arg() - m[(i, j)].arg();
                    angle[next] = Some(sum - here);
                    stack.push(next);
                }
            }
        }
    }
    let phase = |k: usize| C64::from_polar(1.0, angle[k].unwrap_or(0.0));
    let mut witness = PhaseWitness {
        left: [phase(0), phase(1), phase(2), phase(3)],
        right: [phase(4), phase(5), phase(6), phase(7)],
        deviation: 0.0,
    };
    witness.deviation = max_deviation(&witness.apply(m), ideal);
    Ok((witness.deviation < tol).then_some(witness))
}

/// The three resonances benchmarked against their effective models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resonance {
    SidebandMinus,
    SidebandPlus,
    Carrier,
}

impl Resonance {
    pub const ALL: [Resonance; 3] = [Resonance::SidebandMinus, Resonance::SidebandPlus, Resonance::Carrier];

    pub fn name(self) -> &'static str {
        match self {
            Resonance::SidebandMinus => "sideband-minus",
            Resonance::SidebandPlus => "sideband-plus",
            Resonance::Carrier => "carrier",
        }
    }
}

impl std::str::FromStr for Resonance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Resonance::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown resonance case {s:?}")))
    }
}

/// Natural-unit trap used by the RWA benchmark.
///
/// With ω_z = 1 and ω_s an integer, every rotating term of the frame
/// Hamiltonian is periodic in 2π/ω_z, so stroboscopic end times remove the
/// first-order micromotion from the comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RwaSetup {
    pub omega_z: f64,
    pub omega_s: f64,
    pub axial_dim: usize,
    pub lamb_dicke: f64,
    pub samples_per_period: f64,
    /// strength × duration of the benchmarked pulse.
    pub flop_angle: f64,
    /// End time offset past a whole axial period, as a fraction of the period.
    pub end_phase: f64,
}

impl RwaSetup {
    pub fn for_case(case: Resonance) -> Self {
        RwaSetup {
            omega_z: 1.0,
            omega_s: 5.0,
            axial_dim: 6,
            lamb_dicke: if case == Resonance::Carrier { 0.05 } else { 0.01 },
            samples_per_period: 40.0,
            flop_angle: FRAC_PI_2,
            end_phase: if case == Resonance::Carrier { 0.25 } else { 0.0 },
        }
    }

    fn spec(&self) -> Result<HilbertSpec> {
        HilbertSpec::new(self.axial_dim, 1, 1)
    }

    fn context(&self) -> Result<LabContext> {
        let trap = TrapConfig::scaled_spin(self.omega_z, self.omega_s);
        let mut ctx = LabContext::with_lamb_dicke(trap, self.lamb_dicke)?;
        ctx.samples_per_period = self.samples_per_period;
        Ok(ctx)
    }

    /// Rounds `t` to a positive whole number of axial periods, plus `end_phase`.
    fn stroboscopic(&self, t: f64) -> f64 {
        let period = TAU / self.omega_z;
        ((t / period).round().max(1.0) + self.end_phase) * period
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RwaRow {
    pub scale: f64,
    pub duration: f64,
    pub infidelity: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RwaTable {
    pub case: Resonance,
    pub rows: Vec<RwaRow>,
    /// Least-squares slope of ln(infidelity) against ln(scale).
    pub slope: f64,
    /// Matching intercept, ln(infidelity) at scale 1.
    pub intercept: f64,
}

fn probe(case: Resonance, spec: HilbertSpec) -> Result<StateVector> {
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let comps = match case {
        Resonance::SidebandMinus | Resonance::SidebandPlus => {
            [(BasisLabel::new(0, Spin::Up), h), (BasisLabel::new(0, Spin::Down), h)]
        }
        Resonance::Carrier => [(BasisLabel::new(0, Spin::Down), h), (BasisLabel::new(1, Spin::Down), h)],
    };
    StateVector::from_components(spec, &comps)
}

/// Infidelity between full-lab and effective evolution of a fixed probe
/// over one pulse of strength `scale·ω_z`.
pub fn rwa_point(case: Resonance, scale: f64, setup: &RwaSetup) -> Result<RwaRow> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidInput(format!("coupling scale must be > 0, got {scale}")));
    }
    let spec = setup.spec()?;
    let ctx = setup.context()?;
    let strength = scale * setup.omega_z;
    let duration = setup.stroboscopic(setup.flop_angle / strength);
    let pulse = match case {
        Resonance::SidebandMinus => Pulse::sideband_minus(strength, 0.0, duration),
        Resonance::SidebandPlus => Pulse::sideband_plus(strength, 0.0, duration),
        Resonance::Carrier => Pulse::carrier(strength, setup.lamb_dicke, 0.0, duration),
    };
    let seq = PulseSequence::new(vec![pulse]);
    let psi = probe(case, spec)?;
    let full = run(&seq, &psi, RunMode::FullLab(&ctx))?;
    let eff = run(&seq, &psi, RunMode::Effective)?;
    let mut warnings = full.warnings;
    warnings.extend(eff.warnings.into_iter().filter(|w| !warnings.contains(w)).collect::<Vec<_>>());
    Ok(RwaRow { scale, duration, infidelity: 1.0 - fidelity(&full.state, &eff.state)?, warnings })
}

/// Least-squares line through (ln x, ln y); returns (slope, intercept).
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 || pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidInput("log-log fit needs at least two positive points".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("log-log fit needs distinct scales".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn rwa_benchmark(case: Resonance, scales: &[f64]) -> Result<RwaTable> {
    rwa_benchmark_with(case, scales, &RwaSetup::for_case(case))
}

/// Evaluates every scale (in parallel) and fits the log-log slope.
pub fn rwa_benchmark_with(case: Resonance, scales: &[f64], setup: &RwaSetup) -> Result<RwaTable> {
    if scales.is_empty() {
        return Err(Error::InvalidInput("empty scale list".into()));
    }
    let rows = scales.par_iter().map(|&s| rwa_point(case, s, setup)).collect::<Result<Vec<_>>>()?;
    // Rows at or below the rounding floor carry no slope information.
    let pts: Vec<_> = rows.iter().filter(|r| r.infidelity > 0.0).map(|r| (r.scale, r.infidelity)).collect();
    let (slope, intercept) = loglog_fit(&pts).unwrap_or((f64::NAN, f64::NAN));
    Ok(RwaTable { case, rows, slope, intercept })
}

/// Settings for running the carrier CN protocol by full-lab integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabCnSetup {
    pub omega_z: f64,
    pub omega_s: f64,
    pub axial_dim: usize,
    pub lamb_dicke: f64,
    /// ζ/ω_z.
    pub zeta_scale: f64,
    /// ϖ_s/ω_z of the compensation pulse.
    pub rabi_scale: f64,
    pub samples_per_period: f64,
    pub compensation_n: u64,
}

impl Default for LabCnSetup {
    fn default() -> Self {
        LabCnSetup {
            omega_z: 1.0,
            omega_s: 5.0,
            axial_dim: 5,
            lamb_dicke: 0.1,
            zeta_scale: 1e-2,
            rabi_scale: 1e-2,
            samples_per_period: 20.0,
            compensation_n: 0,
        }
    }
}

impl LabCnSetup {
    pub fn couplings(&self) -> Couplings {
        let zeta = self.zeta_scale * self.omega_z;
        let ld = self.lamb_dicke;
        Couplings {
            epsilon: 0.0,
            zeta,
            eta: zeta * ld,
            kappa: 2.0 * zeta * ld * ld,
            lamb_dicke: ld,
            rabi_s: self.rabi_scale * self.omega_z,
        }
    }

    pub fn plan(&self) -> Result<CnPlan> {
        cn_plan(&self.couplings(), self.compensation_n)
    }

    /// Runs the plan through the full-lab integrator and compares with [`cn_reduced`].
    pub fn run(&self) -> Result<(CnPlan, GateReport)> {
        let plan = self.plan()?;
        let spec = HilbertSpec::new(self.axial_dim, 1, 1)?;
        let trap = TrapConfig::scaled_spin(self.omega_z, self.omega_s);
        let mut ctx = LabContext::with_lamb_dicke(trap, self.lamb_dicke)?;
        ctx.samples_per_period = self.samples_per_period;
        let report = extract_gate(&plan.sequence, spec, RunMode::FullLab(&ctx), &cn_reduced())?;
        Ok((plan, report))
    }
}

/// Gate infidelity on the register between the second-order carrier profile
/// and the exact n_z-diagonal of cos(kẑ), over one conditional-flip time.
pub fn carrier_profile_infidelity(lamb_dicke: f64, axial_dim: usize) -> Result<f64> {
    let spec = HilbertSpec::spin_axial(axial_dim)?;
    let zeta = 1.0;
    let t_star = PI / (2.0 * zeta * lamb_dicke * lamb_dicke);
    let basis = QubitRegisterBasis::new(spec)?;
    let restrict =
        |u: &crate::linalg::Operator| Gate4::from_fn(|i, j| u.matrix()[(basis.indices[i], basis.indices[j])]);
    let a = restrict(&propagator(&carrier_antinode(spec, zeta, lamb_dicke, 0.0)?, t_star)?);
    let b = restrict(&propagator(&carrier_antinode_secular(spec, zeta, lamb_dicke, 0.0)?, t_star)?);
    Ok(1.0 - gate_fidelity(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::cn_sequence;

    fn couplings() -> Couplings {
        Couplings { epsilon: 0.0, zeta: 0.2, eta: 0.02, kappa: 2.0 * 0.2 * 0.01, lamb_dicke: 0.1, rabi_s: 0.3 }
    }

    #[test]
    fn effective_cn_matches_ideal() {
        let spec = HilbertSpec::spin_axial(6).unwrap();
        let seq = cn_sequence(&couplings(), 0).unwrap();
        let r = extract_gate(&seq, spec, RunMode::Effective, &cn_reduced()).unwrap();
        assert!((r.fidelity_vs_ideal - 1.0).abs() < 1e-10);
        assert!(r.leakage < 1e-10 && r.subspace_unitarity_defect < 1e-10);
        let aligned = r.truth_table * r.global_phase.conj();
        assert!(max_deviation(&aligned, &cn_reduced()) < 1e-8);
        assert!(phase_equivalent(&r.truth_table, &cn_textbook()).unwrap().is_some());
    }

    #[test]
    fn identity_against_reduced_cn() {
        let spec = HilbertSpec::spin_axial(4).unwrap();
        let r = extract_gate(&PulseSequence::default(), spec, RunMode::Effective, &cn_reduced()).unwrap();
        assert!((r.fidelity_vs_ideal - 0.25).abs() < 1e-12);
    }

    #[test]
    fn phase_equivalence_examples() {
        let cn = cn_textbook();
        assert!(phase_equivalent(&cn_reduced(), &cn).unwrap().is_some());
        assert!(phase_equivalent(&Gate4::identity(), &cn).unwrap().is_none());
        let d = Gate4::from_diagonal(&nalgebra::Vector4::new(
            c(1.0, 0.0),
            C64::from_polar(1.0, PI / 3.0),
            c(1.0, 0.0),
            C64::from_polar(1.0, -PI / 5.0),
        ));
        let w = phase_equivalent(&(d * cn), &cn).unwrap().unwrap();
        assert!(w.deviation < 1e-12);
        let bad = cn * c(2.0, 0.0);
        assert!(matches!(phase_equivalent(&bad, &cn), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn report_toml_round_trip() {
        let spec = HilbertSpec::spin_axial(4).unwrap();
        let r = extract_gate(&cn_sequence(&couplings(), 1).unwrap(), spec, RunMode::Effective, &cn_reduced()).unwrap();
        let back = GateReport::from_toml(&r.to_toml()).unwrap();
        assert_eq!(back.truth_table, r.truth_table);
        assert_eq!(back.fidelity_vs_ideal, r.fidelity_vs_ideal);
    }

    #[test]
    fn loglog_fit_recovers_power_law() {
        let pts: Vec<_> = [0.01, 0.02, 0.05, 0.1].iter().map(|&x: &f64| (x, 3.0 * x * x)).collect();
        let (s, i) = loglog_fit(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (i - 3f64.ln()).abs() < 1e-12);
        assert!(loglog_fit(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn profile_gap_small_at_ld_tenth() {
        let gap = carrier_profile_infidelity(0.1, 8).unwrap();
        assert!(gap < 1e-3 && gap > 0.0, "{gap}");
    }

    #[test]
    fn rwa_point_small_at_weak_drive() {
        let setup = RwaSetup::for_case(Resonance::SidebandMinus);
        let row = rwa_point(Resonance::SidebandMinus, 0.05, &setup).unwrap();
        assert!(row.infidelity < 1e-2 && row.infidelity >= 0.0, "{}", row.infidelity);
        assert!(rwa_point(Resonance::Carrier, -1.0, &setup).is_err());
    }
}
