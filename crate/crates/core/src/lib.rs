//! Quantum simulation of the quasi-periodically kicked rotator (a three-frequency
//! Anderson model) on an `n_q`-qubit register.
//!
//! The gate-level engine ([`circuit`], [`imperfections`]) is checked against a split-operator
//! oracle ([`oracle`]) that applies the same map with FFTs and exact phases.

pub mod circuit;
pub mod error;
pub mod fmt;
pub mod gates;
pub mod imperfections;
pub mod lab;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod qft;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use gates::{apply_gate, Gate, GateStream};
pub use model::{KickSchedule, ModelParams};
pub use state::{Basis, StateVector};
