//! Plans register states from |0↓⟩ with both templates.

use std::f64::consts::FRAC_1_SQRT_2;

use geonium::linalg::{fidelity, HilbertSpec, C64};
use geonium::planner::{initial_state, prepare_state, register_state, Rates, Template};
use geonium::pulses::{run, RunMode};

fn main() -> geonium::Result<()> {
    let spec = HilbertSpec::spin_axial(6)?;
    let rates = Rates { rabi_s: 0.5, eta: 0.05 };
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let targets = [
        ("bell", [h, z, z, h]),
        ("superposition", [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.0, -0.5)]),
    ];

    for (name, amps) in targets {
        for template in [Template::Universal, Template::SidebandPair] {
            let plan = prepare_state(amps, rates, template)?;
            let out = run(&plan.sequence, &initial_state(spec), RunMode::Effective)?;
            let f = fidelity(&out.state, &register_state(spec, amps)?)?;
            println!(
                "{name:<14} {template:?}: {} pulses, reachable {}, leakage {:.3e}, fidelity {f:.10}",
                plan.sequence.len(),
                plan.reachable,
                plan.leakage
            );
        }
    }

    let plan = prepare_state(targets[1].1, rates, Template::Universal)?;
    println!("\n{}", plan.sequence.to_toml());
    Ok(())
}
