//! Infidelity of the effective models against full lab-frame integration.

use geonium::gates::{rwa_benchmark, Resonance};

fn main() -> geonium::Result<()> {
    let scales = [0.01, 0.0178, 0.0316, 0.0562, 0.1];
    for case in Resonance::ALL {
        let table = rwa_benchmark(case, &scales)?;
        println!("{}", case.name());
        for row in &table.rows {
            println!("  {:>8.4} {:>12.4e}", row.scale, row.infidelity);
        }
        println!("  log-log slope {:.3}\n", table.slope);
    }
    Ok(())
}
