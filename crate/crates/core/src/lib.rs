//! Entanglement distillation driven by exchange interactions.
//!
//! The crate simulates two- and three-pair recurrence protocols on explicit
//! density matrices, evaluates their closed-form output fidelities and success
//! probabilities, and samples the three-pair protocol space to extract Pareto
//! fronts over (output fidelity, success probability).
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, tensor products, partial traces,
//!   Hermitian exponentials.
//! - [`states`]: Bell states, Bell-diagonal and Werner states, twirling.
//! - [`gates`]: exchange propagators, permutation operators and the
//!   three-qubit permutation algebra.
//! - [`distill2`]: the two-pair asymmetric protocol.
//! - [`distill3`]: the three-pair coincidence-filter protocol.
//! - [`pareto`]: dominance, front extraction and protocol sampling.
//! - [`experiments`]: dataset generation behind the `distillery` CLI.
//! - [`verify`]: self-check suites.
//!
//! With the default `parallel` feature, sweeps and sampling run on rayon;
//! without it every loop runs sequentially with identical results.

pub mod distill2;
pub mod distill3;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod linalg;
pub mod par;
pub mod pareto;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, StateVector, C64};
pub use states::{BellKind, Fidelity};
