//! The statistical-query oracle.
//!
//! Learners see the hidden state only through [`StatisticalQuery::query`],
//! which returns `Tr[ρO]` for a bounded observable `O`, perturbed by a
//! [`NoiseModel`] scaled to the requested tolerance. Every call is recorded
//! in a [`QueryLedger`].

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal, Uniform};
use serde::Serialize;

use crate::pauli::{pauli_matrix, PauliSet, PauliString};
use crate::rng::{rng_from_seed, Rng};
use crate::state::choi::{bell_coefficients, inverse_bell_transform, pauli_choi_state};
use crate::state::{choi_of_unitary, DenseOperator, QuantumState, StateVector, NORM_TOL};
use crate::{QsqError, Result, C64};

/// A bounded-norm measurement the oracle accepts.
///
/// Variants other than `DoubledPauli` and `Dense` assume the register is a
/// `2n`-qubit Choi register in block layout.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// `Σ_{P ∈ set} |v(P)⟩⟨v(P)|`
    SubsetMass(PauliSet),
    /// A Pauli string on the whole register.
    DoubledPauli(PauliString),
    /// `(M⁺ − M⁻)/2 = |v(a)⟩⟨v(b)| + |v(b)⟩⟨v(a)|` with
    /// `M± = (|v(a)⟩ ± |v(b)⟩)(⟨v(a)| ± ⟨v(b)|)`.
    SignProbe {
        anchor: PauliString,
        other: PauliString,
    },
    /// `Π (R on T₂) Π`, where `R` has `2ℓ` letters, the first `ℓ` acting on
    /// reference qubits `support` and the last `ℓ` on system qubits
    /// `n + support`, and `Π` projects every pair outside `support` onto `|v(I)⟩`.
    ProjectedDoubledPauli {
        r: PauliString,
        support: Vec<usize>,
    },
    Dense(DenseOperator),
}

impl Observable {
    pub fn kind(&self) -> &'static str {
        match self {
            Observable::SubsetMass(_) => "subset_mass",
            Observable::DoubledPauli(_) => "doubled_pauli",
            Observable::SignProbe { .. } => "sign_probe",
            Observable::ProjectedDoubledPauli { .. } => "projected_doubled_pauli",
            Observable::Dense(_) => "dense",
        }
    }

    /// Check the observable against a register of `m` qubits.
    pub fn validate(&self, m: usize) -> Result<()> {
        let half = || -> Result<usize> {
            if !m.is_multiple_of(2) {
                return Err(QsqError::DimensionMismatch { expected: m + 1, found: m });
            }
            Ok(m / 2)
        };
        let same = |expected: usize, found: usize| -> Result<()> {
            if expected != found {
                return Err(QsqError::DimensionMismatch { expected, found });
            }
            Ok(())
        };
        match self {
            Observable::SubsetMass(set) => set.validate(half()?),
            Observable::DoubledPauli(r) => same(m, r.num_qubits()),
            Observable::SignProbe { anchor, other } => {
                let n = half()?;
                same(n, anchor.num_qubits())?;
                same(n, other.num_qubits())?;
                if anchor == other {
                    return Err(QsqError::NormViolation { norm: 2.0 });
                }
                Ok(())
            }
            Observable::ProjectedDoubledPauli { r, support } => {
                let n = half()?;
                if support.is_empty() {
                    return Err(QsqError::EmptyKeepSet);
                }
                let mut seen = vec![false; n];
                for &q in support {
                    if q >= n {
                        return Err(QsqError::QubitOutOfRange { index: q, n });
                    }
                    if std::mem::replace(&mut seen[q], true) {
                        return Err(QsqError::InvalidConfig(format!("qubit {q} repeated in support")));
                    }
                }
                same(2 * support.len(), r.num_qubits())
            }
            Observable::Dense(op) => {
                same(m, op.qubits())?;
                let defect = op.hermiticity_defect();
                if defect > NORM_TOL {
                    return Err(QsqError::NotHermitian { defect });
                }
                let norm = op.operator_norm();
                if norm > 1.0 + NORM_TOL {
                    return Err(QsqError::NormViolation { norm });
                }
                Ok(())
            }
        }
    }

    /// The observable as a dense `2^m × 2^m` matrix.
    pub fn to_matrix(&self, m: usize) -> Result<DMatrix<C64>> {
        self.validate(m)?;
        let dim = 1usize << m;
        let projector = |v: &StateVector| {
            let x = nalgebra::DVector::from_column_slice(v.amplitudes());
            &x * x.adjoint()
        };
        Ok(match self {
            Observable::SubsetMass(set) => {
                let mut acc = DMatrix::zeros(dim, dim);
                for p in set.members(m / 2) {
                    acc += projector(pauli_choi_state(&p).state());
                }
                acc
            }
            Observable::DoubledPauli(r) => pauli_matrix(r)?.into_matrix(),
            Observable::SignProbe { anchor, other } => {
                let a = nalgebra::DVector::from_column_slice(pauli_choi_state(anchor).state().amplitudes());
                let b = nalgebra::DVector::from_column_slice(pauli_choi_state(other).state().amplitudes());
                let plus = &a + &b;
                let minus = &a - &b;
                (&plus * plus.adjoint() - &minus * minus.adjoint()) * C64::new(0.5, 0.0)
            }
            Observable::ProjectedDoubledPauli { r, support } => {
                let n = m / 2;
                let l = support.len();
                let mut targets: Vec<usize> = support.clone();
                targets.extend(support.iter().map(|q| n + q));
                let r_full = pauli_matrix(r)?.embed(&targets, m)?;
                let comp: Vec<usize> = (0..n).filter(|q| !support.contains(q)).collect();
                let pi = if comp.is_empty() {
                    DenseOperator::identity(m)
                } else {
                    let phi = pauli_choi_state(&PauliString::identity(n - l));
                    let mut ctargets = comp.clone();
                    ctargets.extend(comp.iter().map(|q| n + q));
                    DenseOperator::new(projector(phi.state()))?.embed(&ctargets, m)?
                };
                (&(&pi * &r_full) * &pi).into_matrix()
            }
            Observable::Dense(op) => op.matrix().clone(),
        })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::SubsetMass(set) => write!(f, "subset_mass({set})"),
            Observable::DoubledPauli(r) => write!(f, "doubled_pauli({r})"),
            Observable::SignProbe { anchor, other } => write!(f, "sign_probe({anchor},{other})"),
            Observable::ProjectedDoubledPauli { r, support } => {
                write!(f, "projected_doubled_pauli({r};{support:?})")
            }
            Observable::Dense(op) => write!(f, "dense({} qubits)", op.qubits()),
        }
    }
}

/// How the oracle perturbs exact values, relative to the tolerance `τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NoiseModel {
    Exact,
    /// Normal with standard deviation `τ/2`; unbounded, so `|error| ≤ τ`
    /// holds only with probability about 0.95.
    Gaussian,
    /// Uniform on `[−τ, τ]`.
    BoundedUniform,
    /// Always `+τ` (or always `−τ`).
    AdversarialSign {
        positive: bool,
    },
}

impl NoiseModel {
    pub fn sample(&self, tolerance: f64, rng: &mut Rng) -> f64 {
        match self {
            NoiseModel::Exact => 0.0,
            NoiseModel::Gaussian => Normal::new(0.0, tolerance / 2.0).expect("positive sd").sample(rng),
            NoiseModel::BoundedUniform => {
                Uniform::new_inclusive(-tolerance, tolerance).expect("finite bounds").sample(rng)
            }
            NoiseModel::AdversarialSign { positive } => {
                if *positive {
                    tolerance
                } else {
                    -tolerance
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Exact => "exact",
            NoiseModel::Gaussian => "gaussian",
            NoiseModel::BoundedUniform => "bounded",
            NoiseModel::AdversarialSign { .. } => "adversarial",
        }
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = QsqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NoiseModel::Exact),
            "gaussian" => Ok(NoiseModel::Gaussian),
            "bounded" => Ok(NoiseModel::BoundedUniform),
            "adversarial" => Ok(NoiseModel::AdversarialSign { positive: true }),
            _ => Err(QsqError::InvalidConfig(format!("unknown noise model `{s}`"))),
        }
    }
}

/// Audit record of oracle usage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryLedger {
    pub total_queries: u64,
    /// `+∞` until the first query.
    pub min_tolerance: f64,
    pub tallies: BTreeMap<String, u64>,
}

impl Default for QueryLedger {
    fn default() -> Self {
        Self { total_queries: 0, min_tolerance: f64::INFINITY, tallies: BTreeMap::new() }
    }
}

impl QueryLedger {
    pub fn record(&mut self, kind: &str, tolerance: f64) {
        self.total_queries += 1;
        self.min_tolerance = self.min_tolerance.min(tolerance);
        *self.tallies.entry(kind.to_string()).or_default() += 1;
    }

    pub fn count(&self, kind: &str) -> u64 {
        self.tallies.get(kind).copied().unwrap_or(0)
    }
}

/// The only access learners have to a hidden state.
pub trait StatisticalQuery {
    /// Qubits of the hidden state (`2n` for a Choi state).
    fn register_qubits(&self) -> usize;

    /// `Tr[ρO] ± τ`.
    fn query(&mut self, obs: &Observable, tolerance: f64) -> Result<f64>;

    fn ledger(&self) -> &QueryLedger;

    /// System qubits when the register holds a Choi state.
    fn system_qubits(&self) -> usize {
        self.register_qubits() / 2
    }
}

/// Exact evaluation with cached Bell coefficients for pure Choi states.
#[derive(Clone, Debug)]
struct Evaluator {
    state: QuantumState,
    coeffs: Option<Vec<C64>>,
}

impl Evaluator {
    fn new(state: QuantumState) -> Self {
        Self { state, coeffs: None }
    }

    fn coeffs(&mut self) -> &[C64] {
        let QuantumState::Pure(v) = &self.state else { unreachable!("coefficients only cached for pure states") };
        self.coeffs.get_or_insert_with(|| bell_coefficients(v.amplitudes(), v.qubits() / 2))
    }

    fn evaluate(&mut self, obs: &Observable) -> Result<f64> {
        let m = self.state.qubits();
        obs.validate(m)?;
        let rho = match &self.state {
            QuantumState::Pure(_) => None,
            QuantumState::Mixed(r) => Some(r),
        };
        if let Some(rho) = rho {
            return Ok(match obs {
                Observable::DoubledPauli(r) => rho.pauli_expectation(r),
                _ => rho.expectation(&obs.to_matrix(m)?).re,
            });
        }
        Ok(match obs {
            Observable::SubsetMass(set) => {
                let set = set.clone();
                set.mass(self.coeffs())
            }
            Observable::DoubledPauli(r) => self.pure().pauli_expectation(r),
            Observable::SignProbe { anchor, other } => {
                let c = self.coeffs();
                2.0 * (c[anchor.index()].conj() * c[other.index()]).re
            }
            Observable::ProjectedDoubledPauli { r, support } => {
                let w = projected_vector(self.coeffs(), m / 2, support);
                w.pauli_expectation(r)
            }
            Observable::Dense(op) => {
                let v = self.pure();
                let x = nalgebra::DVector::from_column_slice(v.amplitudes());
                x.dotc(&(op.matrix() * &x)).re
            }
        })
    }

    fn pure(&self) -> &StateVector {
        match &self.state {
            QuantumState::Pure(v) => v,
            QuantumState::Mixed(_) => unreachable!(),
        }
    }
}

/// `(I_{T₂} ⊗ ⟨v(I)|_{comp})|v⟩` on `2ℓ` qubits in block layout, built from
/// the Bell coefficients with identity on every pair outside `support`.
fn projected_vector(coeffs: &[C64], n: usize, support: &[usize]) -> StateVector {
    let l = support.len();
    let mut reduced = vec![C64::new(0.0, 0.0); 1 << (2 * l)];
    for (idx, slot) in reduced.iter_mut().enumerate() {
        let mut full = 0usize;
        for (i, &q) in support.iter().enumerate() {
            let letter = (idx >> (2 * (l - 1 - i))) & 3;
            full |= letter << (2 * (n - 1 - q));
        }
        *slot = coeffs[full];
    }
    StateVector::from_amplitudes_unchecked(2 * l, inverse_bell_transform(&reduced, l))
}

/// Exact `Tr[ρO]`.
pub fn expectation_exact(state: &QuantumState, obs: &Observable) -> Result<f64> {
    Evaluator::new(state.clone()).evaluate(obs)
}

/// Oracle over a private hidden state.
///
/// Queries take `&mut self`, so a single instance serializes its queries
/// and ledger updates; independent trials use independent instances.
#[derive(Clone, Debug)]
pub struct QsqOracle {
    hidden: Evaluator,
    noise: NoiseModel,
    rng: Rng,
    ledger: QueryLedger,
}

impl QsqOracle {
    pub fn new(state: impl Into<QuantumState>, noise: NoiseModel, seed: u64) -> Self {
        Self::with_rng(state, noise, rng_from_seed(seed))
    }

    pub fn with_rng(state: impl Into<QuantumState>, noise: NoiseModel, rng: Rng) -> Self {
        Self { hidden: Evaluator::new(state.into()), noise, rng, ledger: QueryLedger::default() }
    }

    /// Oracle over the Choi state of `u`.
    pub fn for_unitary(u: &DenseOperator, noise: NoiseModel, seed: u64) -> Result<Self> {
        Ok(Self::new(choi_of_unitary(u)?, noise, seed))
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }
}

impl StatisticalQuery for QsqOracle {
    fn register_qubits(&self) -> usize {
        self.hidden.state.qubits()
    }

    fn query(&mut self, obs: &Observable, tolerance: f64) -> Result<f64> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(QsqError::InvalidTolerance(tolerance));
        }
        let exact = self.hidden.evaluate(obs)?;
        self.ledger.record(obs.kind(), tolerance);
        Ok(exact + self.noise.sample(tolerance, &mut self.rng))
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}
