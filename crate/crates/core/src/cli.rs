//! Command-line scenarios.
//!
//! Exit codes: 0 all checks passed, 1 bad input/config or I/O failure,
//! 2 hierarchy warning or a configured threshold not met, 3 infeasible
//! compensation, 4 target unreachable by the planner template.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::error::{Error, Result, Warning};
use crate::gates::{cn_reduced, cn_textbook, extract_gate, phase_equivalent_within, rwa_benchmark, Resonance};
use crate::linalg::{fidelity, HilbertSpec, StateVector, C64};
use crate::measurement::{outcome_distribution, projective_measure, readout_transfer, sample_shots};
use crate::planner::{initial_state, prepare_state, register_labels, register_state, Plan, Rates, Template};
use crate::pulses::{cn_plan, run, LabContext, RunMode};
use crate::trap::{derive_couplings, derive_frequencies, Couplings, SpinDriveConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_UNREACHABLE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "geonium", version, about = "Single-electron Penning-trap quantum logic scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Amplitudes {
    /// Amplitude of |0↓⟩, e.g. `0.7071` or `0.5+0.5i`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub alpha: C64,
    /// Amplitude of |0↑⟩.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: C64,
    /// Amplitude of |1↓⟩.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub gamma: C64,
    /// Amplitude of |1↑⟩.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub delta: C64,
}

impl Amplitudes {
    fn array(&self) -> [C64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateArg {
    Universal,
    SidebandPair,
}

impl From<TemplateArg> for Template {
    fn from(t: TemplateArg) -> Self {
        match t {
            TemplateArg::Universal => Template::Universal,
            TemplateArg::SidebandPair => Template::SidebandPair,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Effective,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseArg {
    SidebandMinus,
    SidebandPlus,
    Carrier,
}

impl From<CaseArg> for Resonance {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::SidebandMinus => Resonance::SidebandMinus,
            CaseArg::SidebandPlus => Resonance::SidebandPlus,
            CaseArg::Carrier => Resonance::Carrier,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mode frequencies, couplings and hierarchy diagnostics.
    Freqs {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan and simulate preparation of a register state.
    Prepare {
        config: PathBuf,
        #[command(flatten)]
        amps: Amplitudes,
        #[arg(long, value_enum, default_value = "universal")]
        template: TemplateArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the controlled-NOT protocol and report its register truth table.
    Cnot {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "effective")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full-lab vs effective infidelity over coupling scales.
    RwaSweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Comma-separated coupling scales (coupling / ω_z).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        scales: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer a register state to the cyclotron mode and measure it shot by shot.
    Readout {
        config: PathBuf,
        #[command(flatten)]
        amps: Amplitudes,
        #[arg(long, default_value_t = 10)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prepare, transfer and measure; compare outcome frequencies with |amplitude|².
    Roundtrip {
        config: PathBuf,
        #[command(flatten)]
        amps: Amplitudes,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "universal")]
        template: TemplateArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Text produced by a scenario and the exit code it earned.
struct Report {
    body: String,
    code: i32,
    warnings: Vec<Warning>,
}

fn header(cfg: &Config, scenario: &str) -> String {
    format!("# geonium {}\n# config_sha256 {}\n# scenario {scenario}\n", env!("CARGO_PKG_VERSION"), cfg.sha256)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleCompensation(_) => EXIT_INFEASIBLE,
        _ => EXIT_ERROR,
    }
}

fn couplings(cfg: &Config) -> Result<Couplings> {
    let spin = cfg.spin_drive.unwrap_or(SpinDriveConfig { b: 0.0, theta: 0.0 });
    derive_couplings(&cfg.trap, cfg.drive()?, &spin)
}

fn transfer_strength(cfg: &Config) -> Result<f64> {
    let c = couplings(cfg)?;
    let g = c.epsilon * c.lamb_dicke;
    if !(g > 0.0) {
        return Err(Error::InvalidConfig("readout transfer needs [drive] alpha > 0".into()));
    }
    Ok(g)
}

fn register_spec(cfg: &Config) -> Result<HilbertSpec> {
    let spec = cfg.spec()?;
    if spec.cyclotron_dim() < 2 {
        return Err(Error::InvalidConfig("readout needs sim.cyclotron_dim >= 2".into()));
    }
    Ok(spec)
}

fn target_state(spec: HilbertSpec, amps: &Amplitudes) -> Result<StateVector> {
    let norm2: f64 = amps.array().iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("amplitudes have norm^2 {norm2}, expected 1")));
    }
    register_state(spec, amps.array())
}

fn kv(out: &mut String, key: &str, value: f64) {
    let _ = writeln!(out, "{key} = {value:.9e}");
}

fn cmd_freqs(cfg: &Config) -> Result<Report> {
    let f = derive_frequencies(&cfg.trap)?;
    let mut out = header(cfg, "freqs");
    let tau = std::f64::consts::TAU;
    out.push_str("[frequencies]\n");
    kv(&mut out, "omega_z", f.omega_z);
    kv(&mut out, "omega_c", f.omega_c);
    kv(&mut out, "omega_m", f.omega_m);
    kv(&mut out, "omega_s", f.omega_s);
    kv(&mut out, "f_z_hz", f.omega_z / tau);
    kv(&mut out, "f_c_hz", f.omega_c / tau);
    kv(&mut out, "f_m_hz", f.omega_m / tau);
    kv(&mut out, "f_s_hz", f.omega_s / tau);
    let (zm, cz) = f.ratios();
    kv(&mut out, "omega_z_over_omega_m", zm);
    kv(&mut out, "omega_c_over_omega_z", cz);
    let warning = f.hierarchy_warning();
    let _ = writeln!(out, "hierarchy_ok = {}", warning.is_none());
    if cfg.drive.is_some() {
        let c = couplings(cfg)?;
        out.push_str("\n[couplings]\n");
        kv(&mut out, "epsilon", c.epsilon);
        kv(&mut out, "zeta", c.zeta);
        kv(&mut out, "eta", c.eta);
        kv(&mut out, "kappa", c.kappa);
        kv(&mut out, "lamb_dicke", c.lamb_dicke);
        kv(&mut out, "rabi_s", c.rabi_s);
        kv(&mut out, "transfer_g", c.epsilon * c.lamb_dicke);
    }
    let code = if warning.is_some() { EXIT_THRESHOLD } else { EXIT_OK };
    Ok(Report { body: out, code, warnings: warning.into_iter().collect() })
}

fn plan_for(cfg: &Config, amps: &Amplitudes, template: TemplateArg) -> Result<Plan> {
    let c = couplings(cfg)?;
    prepare_state(amps.array(), Rates { rabi_s: c.rabi_s, eta: c.eta }, template.into())
}

fn plan_lines(out: &mut String, plan: &Plan) {
    let _ = writeln!(out, "reachable = {}", plan.reachable);
    kv(out, "predicted_leakage", plan.leakage);
}

fn cmd_prepare(cfg: &Config, amps: &Amplitudes, template: TemplateArg) -> Result<Report> {
    let spec = cfg.spec()?;
    let target = target_state(spec, amps)?;
    let plan = plan_for(cfg, amps, template)?;
    let outcome = run(&plan.sequence, &initial_state(spec), RunMode::Effective)?;
    let mut out = header(cfg, "prepare");
    plan_lines(&mut out, &plan);
    kv(&mut out, "fidelity", fidelity(&outcome.state, &target)?);
    let inside: f64 = register_labels().iter().map(|&l| outcome.state.amp(l).norm_sqr()).sum();
    kv(&mut out, "simulated_leakage", (1.0 - inside).max(0.0));
    kv(&mut out, "total_duration", plan.sequence.total_duration());
    out.push('\n');
    out.push_str(&plan.sequence.to_toml());
    let code = if plan.reachable { EXIT_OK } else { EXIT_UNREACHABLE };
    Ok(Report { body: out, code, warnings: outcome.warnings })
}

fn cmd_cnot(cfg: &Config, mode: ModeArg) -> Result<Report> {
    let c = couplings(cfg)?;
    let plan = cn_plan(&c, cfg.sim.compensation_n)?;
    let (report, label) = match mode {
        ModeArg::Effective => {
            (extract_gate(&plan.sequence, cfg.spec()?, RunMode::Effective, &cn_reduced())?, "effective")
        }
        ModeArg::Full => {
            // The cyclotron stays frozen: the spin pulses do not address it.
            let spec = HilbertSpec::new(cfg.sim.axial_dim, 1, 1)?;
            let mut ctx = LabContext::new(cfg.trap, cfg.drive()?.k);
            ctx.step = cfg.sim.step;
            ctx.samples_per_period = cfg.sim.samples_per_period;
            (extract_gate(&plan.sequence, spec, RunMode::FullLab(&ctx), &cn_reduced())?, "full")
        }
    };
    let t = &cfg.thresholds;
    let equivalent = matches!(phase_equivalent_within(&report.truth_table, &cn_textbook(), t.phase_tol), Ok(Some(_)));
    let pass = equivalent && report.leakage <= t.leakage && report.fidelity_vs_ideal >= t.fidelity;

    let mut out = header(cfg, "cnot");
    let _ = writeln!(out, "mode = \"{label}\"");
    kv(&mut out, "gate_time", plan.gate_time);
    kv(&mut out, "compensation_time", plan.compensation_time);
    let _ = writeln!(out, "compensation_n = {}", plan.n);
    let _ = writeln!(out, "compensation_sign = {}", plan.sign);
    let _ = writeln!(out, "phase_equivalent = {equivalent}");
    let _ = writeln!(out, "pass = {pass}");
    out.push_str(&report.to_toml());
    Ok(Report { body: out, code: if pass { EXIT_OK } else { EXIT_THRESHOLD }, warnings: report.warnings })
}

fn cmd_rwa_sweep(cfg: &Config, case: CaseArg, scales: &[f64]) -> Result<Report> {
    let case: Resonance = case.into();
    let table = rwa_benchmark(case, scales)?;
    let mut out = header(cfg, "rwa-sweep");
    let _ = writeln!(out, "# case {}", case.name());
    out.push_str("scale,infidelity\n");
    let mut warnings = Vec::new();
    for r in &table.rows {
        let _ = writeln!(out, "{:.9e},{:.9e}", r.scale, r.infidelity);
        warnings.extend(r.warnings.iter().cloned());
    }
    let _ = writeln!(out, "slope,{:.6}", table.slope);
    Ok(Report { body: out, code: EXIT_OK, warnings })
}

fn cmd_readout(cfg: &Config, amps: &Amplitudes, shots: usize, seed: u64) -> Result<Report> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be >= 1".into()));
    }
    let spec = register_spec(cfg)?;
    let psi = target_state(spec, amps)?;
    let moved = readout_transfer(&psi, transfer_strength(cfg)?)?;
    let mut out = header(cfg, "readout");
    out.push_str("seed n_c s probability shift_over_omega_tilde\n");
    for i in 0..shots as u64 {
        let r = projective_measure(&moved.state, seed.wrapping_add(i), &cfg.bottle)?;
        let _ = writeln!(out, "{}", r.row(&cfg.bottle));
    }
    Ok(Report { body: out, code: EXIT_OK, warnings: moved.warnings })
}

fn cmd_roundtrip(cfg: &Config, amps: &Amplitudes, shots: usize, seed: u64, template: TemplateArg) -> Result<Report> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be >= 1".into()));
    }
    let spec = register_spec(cfg)?;
    target_state(spec, amps)?;
    let plan = plan_for(cfg, amps, template)?;
    let mut out = header(cfg, "roundtrip");
    plan_lines(&mut out, &plan);
    if !plan.reachable {
        return Ok(Report { body: out, code: EXIT_UNREACHABLE, warnings: Vec::new() });
    }
    let prepared = run(&plan.sequence, &initial_state(spec), RunMode::Effective)?;
    let moved = readout_transfer(&prepared.state, transfer_strength(cfg)?)?;
    let outcomes = sample_shots(&moved.state, seed, shots)?;
    let born = outcome_distribution(&moved.state)?;

    let _ = writeln!(out, "shots = {shots}\nseed = {seed}");
    out.push_str("n_c,s,amplitude_sq,born,observed,count,sigma,within_3sigma\n");
    let expected = amps.array();
    let mut all_within = true;
    for (k, label) in register_labels().iter().enumerate() {
        let s: i8 = label.spin.sign();
        let n_c = label.n_z;
        let count = outcomes.iter().filter(|o| o.n_c == n_c && o.s == s).count();
        let observed = count as f64 / shots as f64;
        let p = expected[k].norm_sqr();
        let b = born.iter().find(|o| o.n_c == n_c && o.s == s).map_or(0.0, |o| o.probability);
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        let within = (observed - p).abs() <= 3.0 * sigma + 1e-12;
        all_within &= within;
        let _ = writeln!(out, "{n_c},{s:+},{p:.9e},{b:.9e},{observed:.9e},{count},{sigma:.9e},{within}");
    }
    let mut warnings = prepared.warnings;
    warnings.extend(moved.warnings);
    Ok(Report { body: out, code: if all_within { EXIT_OK } else { EXIT_THRESHOLD }, warnings })
}

fn dispatch(command: &Command) -> (Result<Report>, Option<&PathBuf>) {
    let load = |p: &PathBuf| Config::load(p);
    match command {
        Command::Freqs { config, out } => (load(config).and_then(|c| cmd_freqs(&c)), out.as_ref()),
        Command::Prepare { config, amps, template, out } => {
            (load(config).and_then(|c| cmd_prepare(&c, amps, *template)), out.as_ref())
        }
        Command::Cnot { config, mode, out } => (load(config).and_then(|c| cmd_cnot(&c, *mode)), out.as_ref()),
        Command::RwaSweep { config, case, scales, out } => {
            (load(config).and_then(|c| cmd_rwa_sweep(&c, *case, scales)), out.as_ref())
        }
        Command::Readout { config, amps, shots, seed, out } => {
            (load(config).and_then(|c| cmd_readout(&c, amps, *shots, *seed)), out.as_ref())
        }
        Command::Roundtrip { config, amps, shots, seed, template, out } => {
            (load(config).and_then(|c| cmd_roundtrip(&c, amps, *shots, *seed, *template)), out.as_ref())
        }
    }
}

/// Parses `args` (program name first), runs the scenario and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let (result, out_path) = dispatch(&cli.command);
    match result {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &report.body) {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_ERROR;
                    }
                }
                None => print!("{}", report.body),
            }
            report.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
