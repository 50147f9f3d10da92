use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DenseOperator, StateVector};
use crate::C64;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary on `m` qubits: QR of a Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DenseOperator {
    let d = 1usize << m;
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    DenseOperator::new(q).expect("power-of-two dimension")
}

/// Haar-random pure state on `m` qubits.
pub fn haar_random_state<R: Rng + ?Sized>(m: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << m).map(|_| complex_gaussian(rng)).collect();
    StateVector::from_amplitudes_unchecked(m, amps).normalized()
}
