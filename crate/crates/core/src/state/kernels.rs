//! Index arithmetic and matrix-free gate application on amplitude slices.
//!
//! Qubit 0 is the most significant bit of a basis index, so a basis index
//! reads left to right in the same order as a tensor product `q0 ⊗ q1 ⊗ ...`.

use crate::C64;
use nalgebra::DMatrix;

/// Bit position of qubit `q` in a `total`-qubit basis index.
#[inline]
pub(crate) fn bit_pos(q: usize, total: usize) -> usize {
    total - 1 - q
}

/// Read the bits of `index` at `qubits`, first qubit most significant.
#[inline]
pub(crate) fn gather_bits(index: usize, qubits: &[usize], total: usize) -> usize {
    qubits.iter().fold(0, |acc, &q| (acc << 1) | ((index >> bit_pos(q, total)) & 1))
}

/// Overwrite the bits of `index` at `qubits` with `value` (first qubit most significant).
#[inline]
pub(crate) fn scatter_bits(index: usize, qubits: &[usize], total: usize, value: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(index, |acc, (a, &q)| {
        let p = bit_pos(q, total);
        let bit = (value >> (k - 1 - a)) & 1;
        (acc & !(1 << p)) | (bit << p)
    })
}

pub(crate) fn mask_of(qubits: &[usize], total: usize) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << bit_pos(q, total)))
}

/// Apply a `2^k × 2^k` matrix to the `k` target qubits of `amps` in place.
pub(crate) fn apply_on_qubits(amps: &mut [C64], total: usize, op: &DMatrix<C64>, targets: &[usize]) {
    let k = targets.len();
    let sub = 1usize << k;
    debug_assert_eq!(op.nrows(), sub);
    let mask = mask_of(targets, total);
    let offsets: Vec<usize> = (0..sub).map(|t| scatter_bits(0, targets, total, t)).collect();
    let mut buf = vec![C64::new(0.0, 0.0); sub];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (t, off) in offsets.iter().enumerate() {
            buf[t] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, b) in buf.iter().enumerate() {
                acc += op[(r, c)] * b;
            }
            amps[base | off] = acc;
        }
    }
}
