//! Choi states of unitaries and the Bell transform.
//!
//! Layout: a Choi state of an `n`-qubit unitary lives on `2n` qubits, with
//! qubits `0..n` the reference half and `n..2n` the half `U` acts on. The
//! Bell pair of system qubit `j` is `(j, n + j)`, and the basis index of
//! `|i⟩_ref |j⟩_sys` is `(i << n) | j`.
//!
//! The Bell transform rewrites such a vector in the basis `{|v(P)⟩}` of
//! Choi states of Pauli strings. Output entry `c[P]` is `⟨v(P)|v⟩`, indexed
//! by [`PauliString::index`], so for `v = v(U)` it is the Pauli–Fourier
//! coefficient `Tr[PU]/2^n`. Because the Pauli index is base-4 with qubit 0
//! most significant, every [`crate::pauli::PauliPrefix`] is a contiguous
//! block of the output.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{DenseOperator, StateVector, SYSTEM_LIMIT, UNITARY_TOL};
use crate::pauli::{PauliExpansion, PauliString};
use crate::{QsqError, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    n: usize,
    vec: StateVector,
}

fn check_system_limit(n: usize) -> Result<()> {
    if n > SYSTEM_LIMIT {
        return Err(QsqError::DimensionLimit { qubits: 2 * n, limit: 2 * SYSTEM_LIMIT });
    }
    Ok(())
}

/// `(I ⊗ U)|Ω⟩`, amplitude at `(i, j)` equal to `U[j, i] / sqrt(2^n)`.
pub fn choi_of_unitary(u: &DenseOperator) -> Result<ChoiState> {
    check_system_limit(u.qubits())?;
    u.ensure_unitary(UNITARY_TOL)?;
    Ok(choi_of_operator(u))
}

/// Choi vector of an arbitrary operator, without the unitarity check.
pub(crate) fn choi_of_operator(u: &DenseOperator) -> ChoiState {
    let n = u.qubits();
    let d = 1usize << n;
    let scale = 1.0 / (d as f64).sqrt();
    let m = u.matrix();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            amps[(i << n) | j] = m[(j, i)] * scale;
        }
    }
    ChoiState { n, vec: StateVector::from_amplitudes_unchecked(2 * n, amps) }
}

impl ChoiState {
    /// `|Ω⟩` on `2n` qubits.
    pub fn maximally_entangled(n: usize) -> Self {
        choi_of_operator(&DenseOperator::identity(n))
    }

    /// Wrap a `2n`-qubit vector in the Choi layout.
    pub fn from_state(vec: StateVector) -> Result<Self> {
        if !vec.qubits().is_multiple_of(2) {
            return Err(QsqError::DimensionMismatch { expected: vec.qubits() + 1, found: vec.qubits() });
        }
        Ok(Self { n: vec.qubits() / 2, vec })
    }

    pub fn system_qubits(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &StateVector {
        &self.vec
    }

    pub fn into_state(self) -> StateVector {
        self.vec
    }

    /// Read the operator back off the vector: `U[j, i] = sqrt(2^n) · v[(i << n) | j]`.
    pub fn to_operator(&self) -> DenseOperator {
        let n = self.n;
        let d = 1usize << n;
        let scale = (d as f64).sqrt();
        let amps = self.vec.amplitudes();
        let m = nalgebra::DMatrix::from_fn(d, d, |j, i| amps[(i << n) | j] * scale);
        DenseOperator::new(m).expect("dimension within limit")
    }

    /// `|⟨self|other⟩|`
    pub fn overlap(&self, other: &Self) -> f64 {
        self.vec.inner(&other.vec).norm()
    }

    pub fn bell_coefficients(&self) -> Vec<C64> {
        bell_transform(self)
    }

    /// Sparse Pauli expansion, dropping entries with modulus at most `cutoff`.
    pub fn pauli_expansion(&self, cutoff: f64) -> PauliExpansion {
        PauliExpansion::from_dense(self.n, &self.bell_coefficients(), cutoff)
    }
}

/// Pauli–Fourier coefficients of a Choi state, `c[P] = ⟨v(P)|v⟩`.
pub fn bell_transform(v: &ChoiState) -> Vec<C64> {
    bell_coefficients(v.vec.amplitudes(), v.n)
}

/// Bell transform of a raw `2n`-qubit amplitude vector in Choi layout.
pub fn bell_coefficients(amps: &[C64], n: usize) -> Vec<C64> {
    debug_assert_eq!(amps.len(), 1 << (2 * n));
    let mut out = interleave(amps, n);
    for_each_pair(&mut out, n, |d| {
        // d = (a00, a01, a10, a11) over (ref bit, sys bit)
        let h = FRAC_1_SQRT_2;
        [(d[0] + d[3]) * h, (d[1] + d[2]) * h, (d[2] - d[1]) * C64::new(0.0, h), (d[0] - d[3]) * h]
    });
    out
}

/// Inverse of [`bell_coefficients`].
pub fn inverse_bell_transform(coeffs: &[C64], n: usize) -> Vec<C64> {
    debug_assert_eq!(coeffs.len(), 1 << (2 * n));
    let mut work = coeffs.to_vec();
    for_each_pair(&mut work, n, |c| {
        let h = FRAC_1_SQRT_2;
        let i_cy = c[2] * C64::new(0.0, 1.0);
        [(c[0] + c[3]) * h, (c[1] + i_cy) * h, (c[1] - i_cy) * h, (c[0] - c[3]) * h]
    });
    deinterleave(&work, n)
}

/// Reorder Choi-layout amplitudes so that each Bell pair forms one base-4
/// digit `2·ref + sys`, qubit 0's pair most significant.
fn interleave(amps: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (idx, a) in amps.iter().enumerate() {
        out[interleaved_index(idx, n)] = *a;
    }
    out
}

fn deinterleave(work: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); work.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        *slot = work[interleaved_index(idx, n)];
    }
    out
}

#[inline]
fn interleaved_index(idx: usize, n: usize) -> usize {
    let i = idx >> n;
    let j = idx & ((1 << n) - 1);
    let mut out = 0;
    for q in 0..n {
        let p = n - 1 - q;
        let digit = (((i >> p) & 1) << 1) | ((j >> p) & 1);
        out |= digit << (2 * p);
    }
    out
}

fn for_each_pair(work: &mut [C64], n: usize, f: impl Fn([C64; 4]) -> [C64; 4]) {
    for p in 0..n {
        let stride = 1usize << (2 * p);
        for base in 0..work.len() {
            if (base >> (2 * p)) & 3 != 0 {
                continue;
            }
            let d = [work[base], work[base + stride], work[base + 2 * stride], work[base + 3 * stride]];
            let c = f(d);
            for (t, v) in c.into_iter().enumerate() {
                work[base + t * stride] = v;
            }
        }
    }
}

/// `|v(P)⟩` for a Pauli string.
pub fn pauli_choi_state(p: &PauliString) -> ChoiState {
    let n = p.num_qubits();
    let mut coeffs = vec![C64::new(0.0, 0.0); 1 << (2 * n)];
    coeffs[p.index()] = C64::new(1.0, 0.0);
    ChoiState { n, vec: StateVector::from_amplitudes_unchecked(2 * n, inverse_bell_transform(&coeffs, n)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_matrix, Pauli};
    use crate::rng::rng_from_seed;
    use crate::state::random::haar_random_unitary;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn single(p: Pauli) -> DenseOperator {
        pauli_matrix(&PauliString::from_letters(&[p])).unwrap()
    }

    fn assert_amps(v: &ChoiState, expected: [f64; 4]) {
        for (a, e) in v.state().amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-12, "{:?}", v.state().amplitudes());
        }
    }

    #[test]
    fn single_qubit_choi_states() {
        let h = FRAC_1_SQRT_2;
        assert_amps(&choi_of_unitary(&single(Pauli::I)).unwrap(), [h, 0.0, 0.0, h]);
        assert_amps(&choi_of_unitary(&single(Pauli::X)).unwrap(), [0.0, h, h, 0.0]);
        assert_amps(&choi_of_unitary(&single(Pauli::Z)).unwrap(), [h, 0.0, 0.0, -h]);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DenseOperator::identity(1).scale(c(2.0));
        assert!(matches!(choi_of_unitary(&m), Err(QsqError::NonUnitary { .. })));
    }

    #[test]
    fn amplitude_layout() {
        let mut rng = rng_from_seed(5);
        let u = haar_random_unitary(2, &mut rng);
        let v = choi_of_unitary(&u).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((v.state().amplitudes()[(i << 2) | j] - u.matrix()[(j, i)] * 0.5).norm() < 1e-15);
            }
        }
        assert!((v.to_operator().matrix() - u.matrix()).norm() < 1e-12);
    }

    #[test]
    fn identity_transform() {
        for n in 1..=3 {
            let coeffs = bell_transform(&ChoiState::maximally_entangled(n));
            assert!((coeffs[0] - c(1.0)).norm() < 1e-12);
            assert!(coeffs[1..].iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn hadamard_coefficients() {
        let hm = (single(Pauli::X).matrix() + single(Pauli::Z).matrix()) * c(FRAC_1_SQRT_2);
        let h = DenseOperator::new(hm).unwrap();
        let coeffs = bell_transform(&choi_of_unitary(&h).unwrap());
        let expected = [0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for (a, e) in coeffs.iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn transform_roundtrip() {
        let mut rng = rng_from_seed(6);
        for n in 1..=3 {
            let v = choi_of_unitary(&haar_random_unitary(n, &mut rng)).unwrap();
            let back = inverse_bell_transform(&bell_transform(&v), n);
            for (a, b) in back.iter().zip(v.state().amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_choi_states_are_orthonormal() {
        for n in 1..=3 {
            let states: Vec<ChoiState> =
                PauliString::all(n).map(|p| choi_of_unitary(&pauli_matrix(&p).unwrap()).unwrap()).collect();
            for (a, sa) in states.iter().enumerate() {
                for (b, sb) in states.iter().enumerate() {
                    let ip = sa.state().inner(sb.state());
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - c(expected)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pauli_choi_state_matches_direct_construction() {
        for p in PauliString::all(2) {
            let direct = choi_of_unitary(&pauli_matrix(&p).unwrap()).unwrap();
            let via_transform = pauli_choi_state(&p);
            assert!((direct.state().inner(via_transform.state()) - c(1.0)).norm() < 1e-12);
        }
    }
}
