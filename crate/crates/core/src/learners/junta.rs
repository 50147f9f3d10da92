//! Two-phase junta learner: influence screening, then tomography of the
//! Choi state restricted to the influential pairs.

use super::{estimate_influence, LearnedUnitary};
use crate::oracle::{Observable, StatisticalQuery};
use crate::pauli::PauliString;
use crate::state::{dominant_eigenstate, ChoiState, DenseOperator, DensityMatrix};
use crate::{QsqError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JuntaConfig {
    pub k: usize,
    pub epsilon: f64,
    pub influence_tolerance: f64,
    pub influence_threshold: f64,
}

impl JuntaConfig {
    /// Influence tolerance `ε²/(20k)` and threshold `ε²/(16k)`.
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(QsqError::InvalidConfig("junta arity must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(QsqError::InvalidConfig(format!("epsilon {epsilon} outside (0, 1]")));
        }
        let e2 = epsilon * epsilon;
        Ok(Self {
            k,
            epsilon,
            influence_tolerance: e2 / (20.0 * k as f64),
            influence_threshold: e2 / (16.0 * k as f64),
        })
    }

    /// `2^−ℓ·ε/3`
    pub fn tomography_tolerance(&self, l: usize) -> f64 {
        self.epsilon / 3.0 * 0.5f64.powi(l as i32)
    }
}

/// Learn a `k`-junta to Choi distance `ε`.
pub fn learn_junta<O: StatisticalQuery + ?Sized>(oracle: &mut O, cfg: &JuntaConfig) -> Result<LearnedUnitary> {
    let n = oracle.system_qubits();
    let mut support = Vec::new();
    for j in 0..n {
        if estimate_influence(oracle, j, cfg.influence_tolerance)? >= cfg.influence_threshold {
            support.push(j);
        }
    }
    if support.len() > cfg.k {
        return Err(QsqError::JuntaTooLarge { found: support.len(), k: cfg.k });
    }
    let l = support.len();
    let done = |unitary, block, defect, oracle: &O| LearnedUnitary {
        n,
        unitary,
        support: Some(support.clone()),
        block,
        circuit: None,
        unitarity_defect: defect,
        certificate: None,
        ledger: oracle.ledger().clone(),
        config: format!("{cfg:?}"),
    };
    if l == 0 {
        return Ok(done(DenseOperator::identity(n), None, 0.0, oracle));
    }

    let tolerance = cfg.tomography_tolerance(l);
    let mut coeffs = Vec::with_capacity((1 << (4 * l)) - 1);
    for r in PauliString::all(2 * l).skip(1) {
        let obs = Observable::ProjectedDoubledPauli { r, support: support.clone() };
        coeffs.push((r, oracle.query(&obs, tolerance)?.min(1.0)));
    }
    let rho = DensityMatrix::from_pauli_coefficients(2 * l, &coeffs);
    let (psi, _) = dominant_eigenstate(&rho)?;
    let raw = ChoiState::from_state(psi)?.to_operator();
    let defect = raw.unitarity_defect();
    let block = raw.nearest_unitary();
    let unitary = block.embed(&support, n)?;
    Ok(done(unitary, Some(block), defect, oracle))
}
