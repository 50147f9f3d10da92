//! Dominant eigenpairs of Hermitian matrices.
//!
//! Small matrices (dimension below [`DENSE_EIGEN_THRESHOLD`]) go straight to
//! a full Hermitian eigendecomposition. Larger ones use shifted power
//! iteration from a fixed pseudo-random start vector.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::{DensityMatrix, StateVector};
use crate::rng::rng_from_seed;
use crate::{QsqError, Result, C64};

pub const DENSE_EIGEN_THRESHOLD: usize = 64;
pub const POWER_MAX_ITERATIONS: usize = 20_000;
pub const RESIDUAL_TOL: f64 = 1e-8;

const START_SEED: u64 = 0x5EED_E16E;

pub(crate) fn hermitian_eigenvalues(mat: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = mat.clone().symmetric_eigenvalues().iter().cloned().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

fn residual(mat: &DMatrix<C64>, x: &DVector<C64>, lambda: f64) -> f64 {
    (mat * x - x * C64::new(lambda, 0.0)).norm()
}

/// Largest eigenpair through a full eigendecomposition.
pub fn dense_dominant(mat: &DMatrix<C64>) -> (DVector<C64>, f64) {
    let eig = nalgebra::SymmetricEigen::new(mat.clone());
    let (idx, &lambda) =
        eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty matrix");
    (eig.eigenvectors.column(idx).into_owned(), lambda)
}

/// Largest eigenpair of a Hermitian matrix by power iteration on `A + sI`,
/// with `s` a Gershgorin bound so the shifted matrix is positive semidefinite.
pub fn power_iteration(mat: &DMatrix<C64>, max_iterations: usize) -> Result<(DVector<C64>, f64)> {
    let n = mat.nrows();
    let shift = (0..n).map(|r| mat.row(r).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut rng = rng_from_seed(START_SEED);
    let mut x = DVector::from_fn(n, |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
    x /= C64::new(x.norm(), 0.0);
    let mut last_residual = f64::INFINITY;
    for it in 0..max_iterations {
        let ax = mat * &x;
        let lambda = x.dotc(&ax).re;
        // check every few steps, the residual costs one extra product
        if it % 8 == 0 {
            last_residual = (&ax - &x * C64::new(lambda, 0.0)).norm();
            if last_residual <= RESIDUAL_TOL * 0.1 {
                return Ok((x, lambda));
            }
        }
        let mut y = ax + &x * C64::new(shift, 0.0);
        let norm = y.norm();
        if norm == 0.0 {
            return Ok((x, 0.0));
        }
        y /= C64::new(norm, 0.0);
        x = y;
    }
    let lambda = x.dotc(&(mat * &x)).re;
    let r = residual(mat, &x, lambda);
    if r <= RESIDUAL_TOL {
        return Ok((x, lambda));
    }
    Err(QsqError::NoConvergence { iterations: max_iterations, residual: r.min(last_residual) })
}

/// Unit eigenvector of the largest eigenvalue, with that eigenvalue.
pub fn dominant_eigenstate(rho: &DensityMatrix) -> Result<(StateVector, f64)> {
    let mat = rho.matrix();
    let (x, lambda) = if mat.nrows() < DENSE_EIGEN_THRESHOLD {
        dense_dominant(mat)
    } else {
        power_iteration(mat, POWER_MAX_ITERATIONS)?
    };
    let r = residual(mat, &x, lambda);
    if r > RESIDUAL_TOL {
        return Err(QsqError::NoConvergence { iterations: 0, residual: r });
    }
    let v = StateVector::from_amplitudes_unchecked(rho.qubits(), x.as_slice().to_vec()).normalized();
    Ok((v, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random::haar_random_state;

    fn diag(values: &[f64]) -> DensityMatrix {
        let d: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        DensityMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(d))).unwrap()
    }

    #[test]
    fn basis_projector() {
        let (v, l) = dominant_eigenstate(&diag(&[0.0, 1.0])).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_mixture() {
        let (v, l) = dominant_eigenstate(&diag(&[0.7, 0.3])).unwrap();
        assert!((l - 0.7).abs() < 1e-12);
        assert!((v.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_matches_dense_on_rank_two_mixture() {
        let mut rng = rng_from_seed(3);
        for m in [2, 3, 6] {
            let a = haar_random_state(m, &mut rng).to_density();
            let b = haar_random_state(m, &mut rng).to_density();
            let mat = a.matrix() * C64::new(0.8, 0.0) + b.matrix() * C64::new(0.2, 0.0);
            let (x_pow, l_pow) = power_iteration(&mat, POWER_MAX_ITERATIONS).unwrap();
            let (x_dense, l_dense) = dense_dominant(&mat);
            assert!((l_pow - l_dense).abs() < 1e-8, "m={m}: {l_pow} vs {l_dense}");
            // eigenvectors agree up to a phase
            assert!((x_pow.dotc(&x_dense).norm() - 1.0).abs() < 1e-8);
            assert!(residual(&mat, &x_pow, l_pow) <= RESIDUAL_TOL);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        // two nearly degenerate top eigenvalues and a starved iteration budget
        let mat = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0 - 1e-7, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let err = power_iteration(&mat, 3).unwrap_err();
        assert!(matches!(err, QsqError::NoConvergence { .. }));
    }
}
