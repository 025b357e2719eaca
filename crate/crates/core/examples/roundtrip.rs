//! Prepare, transfer and measure 10⁴ times; compare counts with |amplitude|².

use geonium::linalg::{HilbertSpec, C64};
use geonium::measurement::{readout_transfer, sample_shots};
use geonium::planner::{initial_state, prepare_state, register_labels, Rates, Template};
use geonium::pulses::{run, RunMode};

fn main() -> geonium::Result<()> {
    let spec = HilbertSpec::new(4, 3, 1)?;
    let raw = [C64::new(0.4, 0.1), C64::new(-0.2, 0.5), C64::new(0.3, -0.3), C64::new(0.0, 0.6)];
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps = raw.map(|a| a / norm);

    let plan = prepare_state(amps, Rates { rabi_s: 0.5, eta: 0.05 }, Template::Universal)?;
    let prepared = run(&plan.sequence, &initial_state(spec), RunMode::Effective)?.state;
    let moved = readout_transfer(&prepared, 0.5)?.state;
    let shots = 10_000;
    let outcomes = sample_shots(&moved, 42, shots)?;

    println!("{:>4} {:>3} {:>10} {:>10} {:>8}", "n_c", "s", "|amp|^2", "observed", "z");
    for (label, a) in register_labels().iter().zip(amps) {
        let (n_c, s) = (label.n_z, label.spin.sign());
        let p = a.norm_sqr();
        let count = outcomes.iter().filter(|o| o.n_c == n_c && o.s == s).count();
        let observed = count as f64 / shots as f64;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        println!("{n_c:>4} {s:>+3} {p:>10.5} {observed:>10.5} {:>8.2}", (observed - p) / sigma);
    }
    Ok(())
}
