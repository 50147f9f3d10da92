use nalgebra::DMatrix;

use super::eigen::hermitian_eigenvalues;
use super::kernels::gather_bits;
use super::operator::{max_abs_diff, qubits_for_dim};
use super::vector::check_keep;
use super::NORM_TOL;
use crate::pauli::PauliString;
use crate::{QsqError, Result, C64};

/// A density matrix on `m` qubits.
///
/// [`DensityMatrix::new`] enforces Hermiticity, unit trace and positivity
/// (eigenvalue floor `-1e-9`). Estimates produced from noisy queries are not
/// positive in general; those go through [`DensityMatrix::from_estimate`],
/// which only symmetrizes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(mat.nrows())
            .filter(|_| mat.is_square())
            .ok_or(QsqError::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() })?;
        let herm = max_abs_diff(&mat, &mat.adjoint());
        if herm > NORM_TOL {
            return Err(QsqError::NotHermitian { defect: herm });
        }
        let rho = Self { qubits, mat };
        let tr_defect = (rho.trace() - 1.0).abs();
        if tr_defect > NORM_TOL {
            return Err(QsqError::NotNormalized { defect: tr_defect });
        }
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(QsqError::InvalidConfig(format!("density matrix has eigenvalue {min_eig:.3e} < 0")));
        }
        Ok(rho)
    }

    /// Hermitian part of `mat`, no positivity or trace checks.
    pub fn from_estimate(mat: DMatrix<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(mat.nrows())
            .filter(|_| mat.is_square())
            .ok_or(QsqError::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() })?;
        let herm = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self { qubits, mat: herm })
    }

    pub(crate) fn from_matrix_unchecked(qubits: usize, mat: DMatrix<C64>) -> Self {
        Self { qubits, mat }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let d = 1 << qubits;
        Self { qubits, mat: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) }
    }

    /// `2^-m (I + Σ_P x_P P)` assembled sparsely from Pauli coefficients.
    pub fn from_pauli_coefficients(qubits: usize, coeffs: &[(PauliString, f64)]) -> Self {
        let d = 1usize << qubits;
        let mut mat = DMatrix::<C64>::identity(d, d);
        for (p, x) in coeffs {
            for col in 0..d {
                let (phase, row) = p.act_on_basis(col);
                mat[(row, col)] += phase * *x;
            }
        }
        mat *= C64::new(1.0 / d as f64, 0.0);
        Self { qubits, mat }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ
        self.mat.norm_squared()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.mat * op).trace()
    }

    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        // Tr[ρP] = Σ_b ⟨b|ρP|b⟩ = Σ_b phase_b ρ[b, P(b)]
        (0..self.dim())
            .map(|b| {
                let (phase, target) = p.act_on_basis(b);
                (self.mat[(b, target)] * phase).re
            })
            .sum()
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.mat - &other.mat;
        0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
    }

    /// Schatten-2 distance `‖ρ − σ‖₂`.
    pub fn hs_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_keep(keep, self.qubits)?;
        let k = keep.len();
        let mut out = DMatrix::<C64>::zeros(1 << k, 1 << k);
        let rest: Vec<usize> = (0..self.qubits).filter(|q| !keep.contains(q)).collect();
        let m = self.qubits;
        for r in 0..self.dim() {
            let rr = gather_bits(r, &rest, m);
            let rk = gather_bits(r, keep, m);
            for c in 0..self.dim() {
                if gather_bits(c, &rest, m) == rr {
                    out[(rk, gather_bits(c, keep, m))] += self.mat[(r, c)];
                }
            }
        }
        Ok(DensityMatrix { qubits: k, mat: out })
    }
}
