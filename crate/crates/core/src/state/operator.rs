use std::ops::Mul;

use nalgebra::DMatrix;

use super::kernels::{gather_bits, mask_of};
use super::{StateVector, DENSE_LIMIT};
use crate::{QsqError, Result, C64};

/// A dense `2^m × 2^m` complex operator on `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    qubits: usize,
    mat: DMatrix<C64>,
}

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim > 0).then(|| dim.trailing_zeros() as usize)
}

pub(crate) fn check_dense_limit(qubits: usize) -> Result<()> {
    if qubits > DENSE_LIMIT {
        return Err(QsqError::DimensionLimit { qubits, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Largest entry modulus of `a - b`.
pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl DenseOperator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(QsqError::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        let qubits = qubits_for_dim(mat.nrows())
            .ok_or(QsqError::DimensionMismatch { expected: mat.nrows().next_power_of_two(), found: mat.nrows() })?;
        check_dense_limit(qubits)?;
        Ok(Self { qubits, mat })
    }

    pub fn identity(qubits: usize) -> Self {
        let d = 1 << qubits;
        Self { qubits, mat: DMatrix::identity(d, d) }
    }

    /// Diagonal operator with the given diagonal.
    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
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

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { qubits: self.qubits, mat: self.mat.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { qubits: self.qubits, mat: &self.mat * c }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn kron(&self, other: &Self) -> Self {
        Self { qubits: self.qubits + other.qubits, mat: self.mat.kronecker(&other.mat) }
    }

    /// Largest entry modulus of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        max_abs_diff(&prod, &DMatrix::identity(self.dim(), self.dim()))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tol {
            return Err(QsqError::NonUnitary { defect });
        }
        Ok(())
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.mat.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// Projection onto the nearest unitary in Frobenius norm (polar factor).
    pub fn nearest_unitary(&self) -> Self {
        let svd = self.mat.clone().svd(true, true);
        let u = svd.u.expect("svd computed with u");
        let v_t = svd.v_t.expect("svd computed with v_t");
        Self { qubits: self.qubits, mat: u * v_t }
    }

    /// Lift to a `total`-qubit operator acting as `self` on `targets`
    /// (first target ↔ most significant qubit of `self`) and identity elsewhere.
    pub fn embed(&self, targets: &[usize], total: usize) -> Result<Self> {
        if targets.len() != self.qubits {
            return Err(QsqError::DimensionMismatch { expected: self.qubits, found: targets.len() });
        }
        if let Some(&q) = targets.iter().find(|&&q| q >= total) {
            return Err(QsqError::QubitOutOfRange { index: q, n: total });
        }
        check_dense_limit(total)?;
        let dim = 1usize << total;
        let mask = mask_of(targets, total);
        let mut mat = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let tc = gather_bits(col, targets, total);
            let rest = col & !mask;
            for tr in 0..(1usize << self.qubits) {
                let row = super::kernels::scatter_bits(rest, targets, total, tr);
                mat[(row, col)] = self.mat[(tr, tc)];
            }
        }
        Ok(Self { qubits: total, mat })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.qubits() != self.qubits {
            return Err(QsqError::DimensionMismatch { expected: self.qubits, found: v.qubits() });
        }
        let out = &self.mat * nalgebra::DVector::from_column_slice(v.amplitudes());
        Ok(StateVector::from_amplitudes_unchecked(self.qubits, out.as_slice().to_vec()))
    }

    /// Normalized Hilbert–Schmidt distance `sqrt(Tr[(A−B)†(A−B)] / 2^m)`.
    pub fn normalized_hs_distance(&self, other: &Self) -> f64 {
        let diff = &self.mat - &other.mat;
        (diff.norm_squared() / self.dim() as f64).sqrt()
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.qubits, rhs.qubits, "operator qubit counts differ");
        DenseOperator { qubits: self.qubits, mat: &self.mat * &rhs.mat }
    }
}

/// Hermitian matrix exponential `exp(i·θ·H)` through the eigendecomposition.
pub fn exp_i_hermitian(h: &DenseOperator, theta: f64) -> DenseOperator {
    let eig = nalgebra::SymmetricEigen::new(h.matrix().clone());
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, theta * l));
    let v = &eig.eigenvectors;
    let mat = v * DMatrix::from_diagonal(&phases) * v.adjoint();
    DenseOperator { qubits: h.qubits, mat }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(DenseOperator::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn embed_matches_kron_on_leading_qubits() {
        let x = DenseOperator::new(DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap();
        let direct = x.kron(&DenseOperator::identity(2));
        let embedded = x.embed(&[0], 3).unwrap();
        assert_eq!(direct, embedded);
        let tail = DenseOperator::identity(2).kron(&x);
        assert_eq!(tail, x.embed(&[2], 3).unwrap());
    }

    #[test]
    fn embed_respects_target_order() {
        // CNOT with control on qubit 1 and target on qubit 0
        let mut m = DMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            m[(r, col)] = c(1.0);
        }
        let cnot = DenseOperator::new(m).unwrap();
        let flipped = cnot.embed(&[1, 0], 2).unwrap();
        // |01> (q1 = 1) → |11>
        assert_eq!(flipped.matrix()[(3, 1)], c(1.0));
        assert_eq!(flipped.matrix()[(0, 0)], c(1.0));
    }

    #[test]
    fn nearest_unitary_is_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.1), c(0.1), c(-0.05), c(0.9)]);
        let u = DenseOperator::new(m).unwrap().nearest_unitary();
        assert!(u.is_unitary(1e-12));
    }
}
