//! The same protocol integrated against the lab-frame standing wave.
//!
//! cargo run --release --example cnot_full_lab

use std::time::Instant;

use geonium::gates::LabCnSetup;

fn main() -> geonium::Result<()> {
    let setup = LabCnSetup::default();
    let start = Instant::now();
    let (plan, report) = setup.run()?;
    println!(
        "zeta/omega_z {:.0e}, lamb-dicke {}, gate time {:.1}/omega_z",
        setup.zeta_scale, setup.lamb_dicke, plan.gate_time
    );
    println!("fidelity {:.6}", report.fidelity_vs_ideal);
    println!("leakage  {:.3e}", report.leakage);
    println!("unitarity defect on the register {:.3e}", report.subspace_unitarity_defect);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("({:.2?})", start.elapsed());
    Ok(())
}
