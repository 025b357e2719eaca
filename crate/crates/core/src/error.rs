use thiserror::Error;

use crate::linalg::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible compensation: {0}")]
    InfeasibleCompensation(String),

    #[error("measurement degenerate: total outcome probability {0:e}")]
    MeasurementDegenerate(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Non-fatal diagnostics attached to simulation results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Population in the two highest Fock levels of a mode exceeded 1e-6.
    Truncation { mode: Mode, population: f64 },
    /// Input state outside the premise of an operation (e.g. readout transfer).
    Precondition { residual: f64, detail: String },
    /// Mode frequency ordering ω_m < ω_z < ω_c violated.
    Hierarchy { detail: String },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::Truncation { mode, population } => {
                write!(f, "truncation: {mode:?} top-two Fock levels hold population {population:.3e}")
            }
            Warning::Precondition { residual, detail } => {
                write!(f, "precondition: {detail} (residual {residual:.3e})")
            }
            Warning::Hierarchy { detail } => write!(f, "hierarchy: {detail}"),
        }
    }
}
