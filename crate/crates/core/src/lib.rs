//! Security comparison of two ways to distribute a key of `2^n`-valued
//! symbols: strings of `n` qubits in the six-state protocol, or single
//! `2^n`-level systems in `2^n + 1` mutually unbiased bases.
//!
//! Both are attacked by an individual asymmetric cloner. The crate computes
//! Bob's and Eve's informations in closed form, solves for the border
//! disturbance where they cross, and checks the closed forms against a
//! state-vector oracle and Monte Carlo protocol runs.

pub mod cli;
pub mod error;
pub mod infotheory;
pub mod quantum_sim;
pub mod qubit_attack;
pub mod qudit_attack;
pub mod security_solver;

pub use error::{Error, Result};

/// Largest supported symbol width; keeps `2^n - 1` exact and symbols in `u32`.
pub const MAX_SYMBOL_BITS: u32 = 30;
