//! Mode frequencies and drive couplings for a 1 T, 10 V, 3.3 mm trap.
//!
//! cargo run --example mode_frequencies

use std::f64::consts::TAU;

use geonium::trap::{derive_couplings, derive_frequencies, DriveConfig, SpinDriveConfig, TrapConfig};

fn main() -> geonium::Result<()> {
    let trap = TrapConfig::new(1.0, 10.0, 3.3e-3)?;
    let f = derive_frequencies(&trap)?;
    println!("axial      {:>12.4} MHz", f.omega_z / TAU / 1e6);
    println!("cyclotron  {:>12.4} GHz", f.omega_c / TAU / 1e9);
    println!("magnetron  {:>12.4} kHz", f.omega_m / TAU / 1e3);
    println!("spin       {:>12.4} GHz", f.omega_s / TAU / 1e9);
    if let Some(w) = f.hierarchy_warning() {
        println!("warning: {w}");
    }

    // A standing wave chosen for Lamb-Dicke 0.1 and ζ = 0.01 ω_z.
    let k = trap.wavevector_for(0.1)?;
    let alpha = trap.alpha_for_zeta(k, 0.01 * f.omega_z);
    let drive = DriveConfig { alpha, k, omega: f.omega_s - f.omega_z, phi: 0.0, varphi: 0.0 };
    let spin = SpinDriveConfig { b: trap.b_for_rabi(0.01 * f.omega_z), theta: 0.0 };
    let c = derive_couplings(&trap, &drive, &spin)?;
    println!("\nk = {k:.4e} 1/m, alpha = {alpha:.4e} V s/m");
    println!("lamb-dicke {:.4}", c.lamb_dicke);
    println!("zeta/omega_z  {:.3e}", c.zeta / f.omega_z);
    println!("eta/omega_z   {:.3e}", c.eta / f.omega_z);
    println!("kappa/omega_z {:.3e}", c.kappa / f.omega_z);
    println!("rabi/omega_z  {:.3e}", c.rabi_s / f.omega_z);
    Ok(())
}
