//! Pulse sequences serialize to TOML and run unchanged after a round trip.

use geonium::linalg::{fidelity, BasisLabel, HilbertSpec, Spin, StateVector};
use geonium::pulses::{run, Pulse, PulseSequence, RunMode};

fn main() -> geonium::Result<()> {
    let seq = PulseSequence::new(vec![
        Pulse::spin_drive(0.4, 0.0, 1.5),
        Pulse::sideband_minus(0.1, 0.3, 4.0),
        Pulse::carrier(0.05, 0.1, 0.0, 10.0),
        Pulse::idle(2.0),
    ]);
    let text = seq.to_toml();
    print!("{text}");

    let back = PulseSequence::from_toml(&text)?;
    let spec = HilbertSpec::spin_axial(6)?;
    let psi = StateVector::basis(spec, BasisLabel::new(0, Spin::Down))?;
    let a = run(&seq, &psi, RunMode::Effective)?.state;
    let b = run(&back, &psi, RunMode::Effective)?.state;
    println!("\nround trip equal: {}, overlap {:.15}", back == seq, fidelity(&a, &b)?);
    println!("total duration {}", back.total_duration());
    Ok(())
}
