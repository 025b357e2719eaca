//! Quantum logic with a single electron in a Penning trap.
//!
//! The two qubits are the electron spin (target) and the lowest two Fock
//! states of the axial oscillation (control). The crate builds the trap
//! Hamiltonians, runs timed pulse sequences in either their rotating-wave
//! (effective) form or by integrating the full standing-wave Hamiltonian, and
//! simulates the cyclotron-transfer and magnetic-bottle readout.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod gates;
pub mod hamiltonians;
pub mod linalg;
pub mod measurement;
pub mod planner;
pub mod pulses;
pub mod trap;

pub use error::{Error, Result, Warning};
