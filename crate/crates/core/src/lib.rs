//! Simulation and verification of measurement-and-feedback quantum circuits.
//!
//! Circuits are described once as a [`circuit::DilatedCircuit`] and can be run
//! on a stabilizer tableau ([`sim_stabilizer`]) or a dense state vector
//! ([`dense`]). Measurements are modelled through their Stinespring dilation
//! ([`dilation`]), logical operators can be pushed backward through a
//! circuit ([`heisenberg`]), and [`bounds`] audits runs against
//! measurement-enhanced Lieb-Robinson limits.

pub mod bounds;
pub mod circuit;
pub mod dense;
pub mod dilation;
pub mod error;
pub mod heisenberg;
pub mod num;
pub mod pauli;
pub mod protocols;
pub mod sim_stabilizer;

/// The dense simulator under its longer name.
pub use dense as sim_dense;
pub use error::{Error, Result};
pub use num::Real;
pub use pauli::{CliffordGate, CliffordKind, OutcomeSource, Pauli, PauliString, Tableau};

/// Double-precision state vector.
pub type StateVector64 = dense::StateVector<f64>;
/// Single-precision state vector.
pub type StateVector32 = dense::StateVector<f32>;
pub type ReducedDensity64 = dense::ReducedDensity<f64>;
pub type ReducedDensity32 = dense::ReducedDensity<f32>;
