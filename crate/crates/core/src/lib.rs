//! Steady-state model of diamond-type four-wave-mixing frequency conversion
//! between 795 nm and the telecom E or C band in a cold Rb-87 ensemble.
//!
//! The crate covers the classical transfer matrix of the probe and signal
//! modes (with the coupling field attenuating along the medium), maximization
//! of the conversion efficiency over the five laser parameters, and the
//! resulting quantum channel acting on Fock-space states, dual-rail qubits and
//! post-selected EPR pairs.
//!
//! All rates, detunings and Rabi frequencies are in units of
//! `Γ = 2π × 6.063 MHz`; see [`scheme`].

pub mod cli;
pub mod coupled_mode;
pub mod coupling;
pub mod error;
pub mod lambert;
pub mod magnus;
pub mod mat2;
pub mod optimizer;
pub mod point;
pub mod propagation;
pub mod qubit;
pub mod scheme;
pub mod state;
pub mod table;

pub use error::{QfcError, Result};
pub use mat2::Mat2;
pub use point::{Controls, OperatingPoint};
pub use propagation::{
    conversion_metrics, nonabsorbing_transfer, transfer_matrix, ConversionMetrics, Method,
    PropagationControls, TransferMatrix,
};
pub use scheme::{build_scheme, AtomicScheme, Band};
