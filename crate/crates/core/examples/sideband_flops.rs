//! Red and blue sideband Rabi flops in the effective model.

use geonium::linalg::{BasisLabel, HilbertSpec, Spin, StateVector};
use geonium::pulses::{run, Pulse, PulseSequence, RunMode};

fn main() -> geonium::Result<()> {
    let spec = HilbertSpec::spin_axial(6)?;
    let eta = 0.2;
    let up0 = StateVector::basis(spec, BasisLabel::new(0, Spin::Up))?;
    let down0 = StateVector::basis(spec, BasisLabel::new(0, Spin::Down))?;

    println!("{:>8} {:>12} {:>12}", "eta*t", "P(1 down)", "P(1 up)");
    for step in 0..=16 {
        let t = step as f64 * 0.125 / eta;
        let red = run(&PulseSequence::new(vec![Pulse::sideband_minus(eta, 0.0, t)]), &up0, RunMode::Effective)?;
        let blue = run(&PulseSequence::new(vec![Pulse::sideband_plus(eta, 0.0, t)]), &down0, RunMode::Effective)?;
        println!(
            "{:>8.3} {:>12.6} {:>12.6}",
            eta * t,
            red.state.amp(BasisLabel::new(1, Spin::Down)).norm_sqr(),
            blue.state.amp(BasisLabel::new(1, Spin::Up)).norm_sqr()
        );
    }
    Ok(())
}
