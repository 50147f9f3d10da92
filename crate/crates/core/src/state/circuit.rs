use rand::Rng;

use super::random::haar_random_unitary;
use super::{DenseOperator, StateVector, UNITARY_TOL};
use crate::{QsqError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub matrix: DenseOperator,
    pub targets: Vec<usize>,
}

/// Layered circuit of 1- and 2-qubit gates; depth is the number of layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    layers: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, layers: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn gates_mut(&mut self) -> impl Iterator<Item = &mut Gate> {
        self.layers.iter_mut().flatten()
    }

    /// Append a layer; targets must be disjoint and every gate unitary.
    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<()> {
        let mut used = vec![false; self.n];
        for gate in &layer {
            if gate.matrix.qubits() != gate.targets.len() || !(1..=2).contains(&gate.targets.len()) {
                return Err(QsqError::DimensionMismatch { expected: gate.matrix.qubits(), found: gate.targets.len() });
            }
            for &q in &gate.targets {
                if q >= self.n {
                    return Err(QsqError::QubitOutOfRange { index: q, n: self.n });
                }
                if used[q] {
                    return Err(QsqError::InvalidConfig(format!("qubit {q} targeted twice in one layer")));
                }
                used[q] = true;
            }
            gate.matrix.ensure_unitary(UNITARY_TOL)?;
        }
        self.layers.push(layer);
        Ok(())
    }

    /// Apply the circuit to qubits `offset..offset + n` of a larger register.
    pub fn apply_to(&self, state: &mut StateVector, offset: usize) -> Result<()> {
        for gate in self.layers.iter().flatten() {
            let targets: Vec<usize> = gate.targets.iter().map(|q| q + offset).collect();
            state.apply_on(&gate.matrix, &targets)?;
        }
        Ok(())
    }

    /// The circuit's `2^n × 2^n` unitary.
    pub fn compile(&self) -> DenseOperator {
        let mut u = DenseOperator::identity(self.n);
        for gate in self.layers.iter().flatten() {
            let g = gate.matrix.embed(&gate.targets, self.n).expect("targets validated on push");
            u = &g * &u;
        }
        u
    }
}

/// Qubit pairs of brickwork layer `layer`: `(0,1),(2,3),…` on even layers,
/// `(1,2),(3,4),…` on odd ones.
pub fn brickwork_pairs(n: usize, layer: usize) -> Vec<(usize, usize)> {
    let start = layer % 2;
    (start..n.saturating_sub(1)).step_by(2).map(|q| (q, q + 1)).collect()
}

/// Brickwork circuit of Haar-random two-qubit gates.
pub fn random_brickwork_circuit<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Result<Circuit> {
    if n < 2 {
        return Err(QsqError::InvalidConfig("brickwork circuits need at least 2 qubits".into()));
    }
    let mut circuit = Circuit::new(n);
    for layer in 0..depth {
        let gates = brickwork_pairs(n, layer)
            .into_iter()
            .map(|(a, b)| Gate { matrix: haar_random_unitary(2, rng), targets: vec![a, b] })
            .collect();
        circuit.push_layer(gates)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::state::choi::{choi_of_unitary, ChoiState};

    #[test]
    fn brickwork_gate_counts() {
        let mut rng = rng_from_seed(1);
        let c = random_brickwork_circuit(4, 2, &mut rng).unwrap();
        // (0,1),(2,3) then (1,2)
        assert_eq!(c.gate_count(), 3);
        assert_eq!(c.depth(), 2);
        assert_eq!(brickwork_pairs(4, 1), vec![(1, 2)]);
        assert_eq!(brickwork_pairs(5, 1), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn depth_zero_is_identity() {
        let mut rng = rng_from_seed(1);
        let c = random_brickwork_circuit(3, 0, &mut rng).unwrap();
        assert_eq!(c.compile(), DenseOperator::identity(3));
    }

    #[test]
    fn compiled_is_unitary() {
        let mut rng = rng_from_seed(2);
        let c = random_brickwork_circuit(5, 3, &mut rng).unwrap();
        assert!(c.compile().is_unitary(1e-9));
    }

    #[test]
    fn overlapping_targets_rejected() {
        let mut rng = rng_from_seed(3);
        let g = || Gate { matrix: haar_random_unitary(2, &mut rng_from_seed(0)), targets: vec![0, 1] };
        let mut c = Circuit::new(3);
        assert!(c
            .push_layer(vec![g(), Gate { matrix: haar_random_unitary(2, &mut rng), targets: vec![1, 2] }])
            .is_err());
    }

    #[test]
    fn choi_construction_paths_agree() {
        let mut rng = rng_from_seed(4);
        for n in 2..=4 {
            let c = random_brickwork_circuit(n, 3, &mut rng).unwrap();
            let via_matrix = choi_of_unitary(&c.compile()).unwrap();
            let mut via_gates = ChoiState::maximally_entangled(n).into_state();
            c.apply_to(&mut via_gates, n).unwrap();
            for (a, b) in via_matrix.state().amplitudes().iter().zip(via_gates.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
