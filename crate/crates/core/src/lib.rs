//! Learning unitaries from statistical queries to their Choi states.
//!
//! The hidden unitary is only reachable through a [`oracle::StatisticalQuery`]
//! oracle that returns noisy expectation values of bounded observables on the
//! Choi state `(I ⊗ U)|Ω⟩`. On top of that seam the crate provides subset-mass
//! and influence estimators, a Goldreich–Levin search over Pauli prefixes,
//! junta, tomography and shallow-circuit learners, Choi-distance and risk
//! metrics, and exact small-`n` checks of the classical-oracle constructions.

pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod oracle;
pub mod oracle_maps;
pub mod pauli;
pub mod rng;
pub mod state;

pub use error::{QsqError, Result};
pub use num_complex::Complex64 as C64;
