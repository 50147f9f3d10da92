use nalgebra::DMatrix;

use super::kernels::{apply_on_qubits, gather_bits, mask_of};
use super::operator::check_dense_limit;
use super::{DenseOperator, DensityMatrix, NORM_TOL};
use crate::pauli::PauliString;
use crate::{QsqError, Result, C64};

/// A pure state on `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Validated constructor: length `2^m` and unit norm within `1e-9`.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let qubits = super::operator::qubits_for_dim(amps.len())
            .ok_or(QsqError::DimensionMismatch { expected: amps.len().next_power_of_two(), found: amps.len() })?;
        check_dense_limit(qubits)?;
        let v = Self { qubits, amps };
        let defect = (v.norm_sqr() - 1.0).abs();
        if defect > NORM_TOL {
            return Err(QsqError::NotNormalized { defect });
        }
        Ok(v)
    }

    /// Constructor for intermediate (possibly unnormalized) vectors.
    pub fn from_amplitudes_unchecked(qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << qubits);
        Self { qubits, amps }
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    /// `|+⟩^⊗m`
    pub fn plus(qubits: usize) -> Self {
        let a = C64::new((1.0 / (1u64 << qubits) as f64).sqrt(), 0.0);
        Self { qubits, amps: vec![a; 1 << qubits] }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
        self
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `self ⊗ other`
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Self { qubits: self.qubits + other.qubits, amps }
    }

    /// Apply an operator on the listed qubits in place.
    pub fn apply_on(&mut self, op: &DenseOperator, targets: &[usize]) -> Result<()> {
        if op.qubits() != targets.len() {
            return Err(QsqError::DimensionMismatch { expected: op.qubits(), found: targets.len() });
        }
        if let Some(&q) = targets.iter().find(|&&q| q >= self.qubits) {
            return Err(QsqError::QubitOutOfRange { index: q, n: self.qubits });
        }
        apply_on_qubits(&mut self.amps, self.qubits, op.matrix(), targets);
        Ok(())
    }

    /// `P|ψ⟩` for a Pauli string on the full register.
    pub fn apply_pauli(&self, p: &PauliString) -> Self {
        debug_assert_eq!(p.num_qubits(), self.qubits);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            let (phase, target) = p.act_on_basis(b);
            out[target] += phase * a;
        }
        Self { qubits: self.qubits, amps: out }
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P`.
    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let (phase, target) = p.act_on_basis(b);
                (self.amps[target].conj() * phase * a).re
            })
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix::from_matrix_unchecked(self.qubits, &v * v.adjoint())
    }

    /// Reduced state on `keep` (result qubit order follows `keep`).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_keep(keep, self.qubits)?;
        let k = keep.len();
        let rest: Vec<usize> = (0..self.qubits).filter(|q| !keep.contains(q)).collect();
        let mut m = DMatrix::<C64>::zeros(1 << k, 1 << rest.len());
        for (b, a) in self.amps.iter().enumerate() {
            m[(gather_bits(b, keep, self.qubits), gather_bits(b, &rest, self.qubits))] = *a;
        }
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(k, rho))
    }
}

pub(crate) fn check_keep(keep: &[usize], total: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(QsqError::EmptyKeepSet);
    }
    if let Some(&q) = keep.iter().find(|&&q| q >= total) {
        return Err(QsqError::QubitOutOfRange { index: q, n: total });
    }
    if mask_of(keep, total).count_ones() as usize != keep.len() {
        return Err(QsqError::InvalidConfig("duplicate qubit in keep set".into()));
    }
    Ok(())
}
