//! Learning algorithms, written against [`StatisticalQuery`] only.

pub mod gl;
pub mod junta;
pub mod shallow;
pub mod tomography;

pub use gl::{
    estimate_coefficients_with_signs, goldreich_levin, learn_qbf, learn_qbf_with, GlConfig, QbfConfig, QbfEstimate,
};
pub use junta::{learn_junta, JuntaConfig};
pub use shallow::{learn_shallow, CircuitSearch, CoordinateSearch, MarginalProblem, SearchOutcome, ShallowConfig};
pub use tomography::{qsq_state_tomography, tomography_on, TomographyEstimate};

use crate::oracle::{Observable, QueryLedger, StatisticalQuery};
use crate::pauli::{PauliPattern, PauliSet};
use crate::state::{Circuit, DenseOperator};
use crate::{QsqError, Result};

/// `Σ_{P ∈ set} |Â_P|² ± τ` with one query.
pub fn estimate_subset_mass<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    set: PauliSet,
    tolerance: f64,
) -> Result<f64> {
    oracle.query(&Observable::SubsetMass(set), tolerance)
}

/// `Inf_j = 1 − Σ_{P_j = I} |Â_P|²`, one query against the Bell projector of pair `j`.
pub fn estimate_influence<O: StatisticalQuery + ?Sized>(oracle: &mut O, j: usize, tolerance: f64) -> Result<f64> {
    let n = oracle.system_qubits();
    if j >= n {
        return Err(QsqError::QubitOutOfRange { index: j, n });
    }
    let set = PauliPattern::identity_on(n, &[j])?;
    Ok(1.0 - estimate_subset_mass(oracle, set.into(), tolerance)?)
}

/// Outcome of the marginal-matching certificate of the shallow learner.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Largest marginal trace distance.
    pub value: f64,
    pub threshold: f64,
    pub certified: bool,
    pub restarts: usize,
}

/// A learner's output unitary with how it was obtained.
#[derive(Clone, Debug)]
pub struct LearnedUnitary {
    pub n: usize,
    pub unitary: DenseOperator,
    /// Qubits the learned block acts on, for junta outputs.
    pub support: Option<Vec<usize>>,
    /// The block on `support`.
    pub block: Option<DenseOperator>,
    pub circuit: Option<Circuit>,
    /// Distance from unitarity before the polar projection.
    pub unitarity_defect: f64,
    pub certificate: Option<Certificate>,
    pub ledger: QueryLedger,
    pub config: String,
}
