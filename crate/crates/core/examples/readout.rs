//! Axial → cyclotron transfer followed by seeded bottle measurements.

use geonium::linalg::{HilbertSpec, C64};
use geonium::measurement::{axial_shift, outcome_distribution, projective_measure, readout_transfer, BottleConfig};
use geonium::planner::register_state;

fn main() -> geonium::Result<()> {
    let spec = HilbertSpec::new(4, 3, 1)?;
    let bottle = BottleConfig::new(1.0, 2.0023193)?;
    for (n_c, s) in [(0, -1), (0, 1), (1, -1), (1, 1)] {
        println!("shift(n_c = {n_c}, s = {s:+}) = {:+.6} omega_tilde", axial_shift(n_c, s, &bottle));
    }

    let amps = [C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.8)];
    let psi = register_state(spec, amps)?;
    let moved = readout_transfer(&psi, 1.0)?;
    println!("\nBorn distribution after transfer:");
    for o in outcome_distribution(&moved.state)? {
        println!("  n_c = {} s = {:+}: {:.6}", o.n_c, o.s, o.probability);
    }
    println!("\nseed n_c s probability shift");
    for seed in 0..8 {
        println!("{}", projective_measure(&moved.state, seed, &bottle)?.row(&bottle));
    }
    Ok(())
}
