//! Controlled-NOT from a carrier pulse plus spin compensation, effective model.

use geonium::gates::{cn_reduced, cn_textbook, extract_gate, phase_equivalent};
use geonium::linalg::HilbertSpec;
use geonium::pulses::{cn_plan, RunMode};
use geonium::trap::Couplings;

fn main() -> geonium::Result<()> {
    let (zeta, ld) = (0.01, 0.1);
    let couplings =
        Couplings { epsilon: 0.0, zeta, eta: zeta * ld, kappa: 2.0 * zeta * ld * ld, lamb_dicke: ld, rabi_s: 0.01 };
    let plan = cn_plan(&couplings, 0)?;
    println!(
        "gate time {:.4}, compensation {:.4} (n = {}, sign {:+})",
        plan.gate_time, plan.compensation_time, plan.n, plan.sign
    );

    let report = extract_gate(&plan.sequence, HilbertSpec::spin_axial(6)?, RunMode::Effective, &cn_reduced())?;
    println!("fidelity {:.12}, leakage {:.2e}", report.fidelity_vs_ideal, report.leakage);
    println!("truth table (|0↓⟩, |0↑⟩, |1↓⟩, |1↑⟩):");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| {
                let z = report.truth_table[(i, j)];
                format!("{:+.3}{:+.3}i", z.re, z.im)
            })
            .collect();
        println!("  {}", row.join("  "));
    }
    let witness = phase_equivalent(&report.truth_table, &cn_textbook())?;
    println!("equal to CN up to local phases: {}", witness.is_some());
    Ok(())
}
