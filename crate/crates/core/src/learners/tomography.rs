//! Pauli tomography through statistical queries.

use crate::oracle::{Observable, StatisticalQuery};
use crate::pauli::PauliString;
use crate::state::{dominant_eigenstate, DensityMatrix, StateVector};
use crate::{QsqError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TomographyEstimate {
    Mixed(DensityMatrix),
    Pure(StateVector),
}

impl TomographyEstimate {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            TomographyEstimate::Mixed(r) => r.clone(),
            TomographyEstimate::Pure(v) => v.to_density(),
        }
    }
}

/// Tomography of the whole register at `τ = ε·2^−m/2`.
pub fn qsq_state_tomography<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    epsilon: f64,
    pure: bool,
) -> Result<TomographyEstimate> {
    let m = oracle.register_qubits();
    let qubits: Vec<usize> = (0..m).collect();
    let tolerance = epsilon * 2f64.powf(-(m as f64) / 2.0);
    tomography_on(oracle, &qubits, tolerance, pure)
}

/// Estimate of the marginal on `qubits` (in that order) from the `4^|qubits| − 1`
/// non-identity Pauli expectations, each clamped above at 1.
pub fn tomography_on<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    qubits: &[usize],
    tolerance: f64,
    pure: bool,
) -> Result<TomographyEstimate> {
    let m = oracle.register_qubits();
    if qubits.is_empty() {
        return Err(QsqError::EmptyKeepSet);
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= m) {
        return Err(QsqError::QubitOutOfRange { index: q, n: m });
    }
    let k = qubits.len();
    let mut coeffs = Vec::with_capacity((1 << (2 * k)) - 1);
    for local in PauliString::all(k).skip(1) {
        let mut full = PauliString::identity(m);
        for (i, &q) in qubits.iter().enumerate() {
            full = full.with_letter(q, local.letter(i));
        }
        let o = oracle.query(&Observable::DoubledPauli(full), tolerance)?;
        coeffs.push((local, o.min(1.0)));
    }
    let rho = DensityMatrix::from_pauli_coefficients(k, &coeffs);
    if pure {
        let (psi, _) = dominant_eigenstate(&rho)?;
        Ok(TomographyEstimate::Pure(psi))
    } else {
        Ok(TomographyEstimate::Mixed(rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{NoiseModel, QsqOracle};
    use crate::rng::rng_from_seed;
    use crate::state::haar_random_state;

    #[test]
    fn zero_state_exact() {
        let mut o = QsqOracle::new(StateVector::zero(1), NoiseModel::Exact, 0);
        let est = qsq_state_tomography(&mut o, 0.1, false).unwrap();
        let rho = est.to_density();
        assert!(rho.trace_distance(&StateVector::zero(1).to_density()) < 1e-12);
        assert_eq!(o.ledger().total_queries, 3);
    }

    #[test]
    fn bounded_noise_pure_targets() {
        let mut rng = rng_from_seed(8);
        for m in 1..=3 {
            for trial in 0..10 {
                let psi = haar_random_state(m, &mut rng);
                let mut o = QsqOracle::new(psi.clone(), NoiseModel::BoundedUniform, trial);
                let est = qsq_state_tomography(&mut o, 0.1, true).unwrap();
                assert!(est.to_density().trace_distance(&psi.to_density()) <= 0.1);
                assert_eq!(o.ledger().total_queries, (1 << (2 * m)) - 1);
            }
        }
    }

    #[test]
    fn hs_bound_for_mixed_estimate() {
        let mut rng = rng_from_seed(9);
        for m in 1..=3 {
            let psi = haar_random_state(m, &mut rng);
            let mut o = QsqOracle::new(psi.clone(), NoiseModel::BoundedUniform, 3);
            let est = qsq_state_tomography(&mut o, 0.1, false).unwrap().to_density();
            assert!(est.hs_distance(&psi.to_density()) <= 0.1);
        }
    }

    #[test]
    fn marginal_matches_partial_trace() {
        let mut rng = rng_from_seed(10);
        let psi = haar_random_state(4, &mut rng);
        let mut o = QsqOracle::new(psi.clone(), NoiseModel::Exact, 0);
        let est = tomography_on(&mut o, &[3, 1], 0.01, false).unwrap().to_density();
        let exact = psi.partial_trace(&[3, 1]).unwrap();
        assert!(est.trace_distance(&exact) < 1e-10);
    }
}
