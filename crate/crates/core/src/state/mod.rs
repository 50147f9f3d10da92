//! Dense statevector and operator simulation.

pub mod choi;
pub mod circuit;
pub mod density;
pub mod eigen;
pub(crate) mod kernels;
pub mod operator;
pub mod random;
pub mod vector;

pub use choi::{
    bell_coefficients, bell_transform, choi_of_unitary, inverse_bell_transform, pauli_choi_state, ChoiState,
};
pub use circuit::{brickwork_pairs, random_brickwork_circuit, Circuit, Gate};
pub use density::DensityMatrix;
pub use eigen::dominant_eigenstate;
pub use operator::DenseOperator;
pub use random::{haar_random_state, haar_random_unitary};
pub use vector::StateVector;

use crate::Result;

/// Largest register (in qubits) any dense vector or operator may have.
pub const DENSE_LIMIT: usize = 12;
/// Largest system size whose Choi state (on twice as many qubits) we build.
pub const SYSTEM_LIMIT: usize = 6;

pub(crate) const NORM_TOL: f64 = 1e-9;
pub(crate) const UNITARY_TOL: f64 = 1e-9;

/// A hidden state an oracle can be built over.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn qubits(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.qubits(),
            QuantumState::Mixed(r) => r.qubits(),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            QuantumState::Pure(v) => v.partial_trace(keep),
            QuantumState::Mixed(r) => r.partial_trace(keep),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(v) => v.to_density(),
            QuantumState::Mixed(r) => r.clone(),
        }
    }
}

impl From<StateVector> for QuantumState {
    fn from(v: StateVector) -> Self {
        QuantumState::Pure(v)
    }
}

impl From<ChoiState> for QuantumState {
    fn from(v: ChoiState) -> Self {
        QuantumState::Pure(v.into_state())
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(r: DensityMatrix) -> Self {
        QuantumState::Mixed(r)
    }
}

/// Partial trace of a pure or mixed state.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}
