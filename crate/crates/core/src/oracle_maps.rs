//! Classical-function oracles, observable translations between their QSQ
//! oracles, and the quadratic-form separation construction.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::oracle::{expectation_exact, Observable};
use crate::pauli::{Pauli, PauliPrefix, PauliSet, PauliString};
use crate::rng::{rng_from_seed, Rng};
use crate::state::eigen::hermitian_eigenvalues;
use crate::state::operator::check_dense_limit;
use crate::state::{choi_of_unitary, pauli_choi_state, DenseOperator, StateVector};
use crate::{QsqError, Result, C64};

/// Largest `n` for which quadratic forms are enumerated exhaustively.
pub const EXHAUSTIVE_FORM_LIMIT: usize = 3;

/// Bit of `x` read by qubit `i` (qubit 0 is the most significant).
fn bit(x: usize, i: usize, n: usize) -> usize {
    (x >> (n - 1 - i)) & 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if table.len() != 1 << n {
            return Err(QsqError::InvalidConfig(format!("truth table of length {} for n = {n}", table.len())));
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> bool) -> Self {
        Self { n, table: (0..1 << n).map(f).collect() }
    }

    /// The `index`-th function in truth-table order (bit `x` of `index` is `f(x)`).
    pub fn from_index(n: usize, index: u64) -> Self {
        Self::from_fn(n, |x| (index >> x) & 1 == 1)
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        Self::from_fn(n, |_| rng.random::<bool>())
    }

    pub fn num_inputs(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    /// `f̂(y) = 2^−n Σ_x (−1)^(f(x) + x·y)`
    pub fn fourier(&self) -> Vec<f64> {
        let size = 1usize << self.n;
        (0..size)
            .map(|y| {
                let s: i64 =
                    (0..size).map(|x| if self.table[x] ^ ((x & y).count_ones() % 2 == 1) { -1 } else { 1 }).sum();
                s as f64 / size as f64
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticForm {
    n: usize,
    /// Entry `(i, j)` is bit `i·n + j`.
    bits: u64,
}

impl QuadraticForm {
    pub fn new(n: usize, entries: &[Vec<u8>]) -> Result<Self> {
        if n * n > 64 || entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(QsqError::InvalidConfig(format!("expected an {n}×{n} bit matrix")));
        }
        let mut bits = 0;
        for (i, row) in entries.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                match a {
                    0 => {}
                    1 => bits |= 1 << (i * n + j),
                    _ => return Err(QsqError::InvalidConfig(format!("entry {a} is not a bit"))),
                }
            }
        }
        Ok(Self { n, bits })
    }

    /// Every `n×n` bit matrix, indexed `0..2^(n²)`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self { n, bits: index }
    }

    pub fn count(n: usize) -> u64 {
        1u64 << (n * n)
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        Self { n, bits: rng.random_range(0..Self::count(n)) }
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        ((self.bits >> (i * self.n + j)) & 1) as u8
    }

    /// `f_A(x) = xᵀAx mod 2`
    pub fn eval(&self, x: usize) -> bool {
        let mut s = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                s ^= self.entry(i, j) as usize & bit(x, i, self.n) & bit(x, j, self.n);
            }
        }
        s == 1
    }

    pub fn to_function(&self) -> BooleanFunction {
        BooleanFunction::from_fn(self.n, |x| self.eval(x))
    }
}

/// `U_f|x, y⟩ = |x, y ⊕ f(x)⟩`, the target bit being the last qubit.
pub fn bitflip_unitary(f: &BooleanFunction) -> Result<DenseOperator> {
    check_dense_limit(f.n + 1)?;
    let d = 1usize << (f.n + 1);
    let mut m = DMatrix::<C64>::zeros(d, d);
    for col in 0..d {
        let row = col ^ usize::from(f.eval(col >> 1));
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    DenseOperator::new(m)
}

/// `V_f|x⟩ = (−1)^f(x)|x⟩`
pub fn phase_unitary(f: &BooleanFunction) -> Result<DenseOperator> {
    check_dense_limit(f.n)?;
    let diag: Vec<C64> = f.table.iter().map(|&b| C64::new(if b { -1.0 } else { 1.0 }, 0.0)).collect();
    DenseOperator::diagonal(&diag)
}

/// `2^−n/2 Σ_x |x, f(x)⟩`
pub fn uniform_example_state(f: &BooleanFunction) -> Result<StateVector> {
    check_dense_limit(f.n + 1)?;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << (f.n + 1)];
    let a = (0.5f64).powf(f.n as f64 / 2.0);
    for x in 0..1usize << f.n {
        amps[(x << 1) | usize::from(f.eval(x))] = C64::new(a, 0.0);
    }
    Ok(StateVector::from_amplitudes_unchecked(f.n + 1, amps))
}

/// `Z^x`, with `Z` on qubit `i` when bit `i` of `x` is set.
pub fn z_string(n: usize, x: usize) -> PauliString {
    let letters: Vec<Pauli> = (0..n).map(|i| if bit(x, i, n) == 1 { Pauli::Z } else { Pauli::I }).collect();
    PauliString::from_letters(&letters)
}

/// `A′ = I_n ⊗ |0⟩⟨0| ⊗ A` on the Choi register of an `(n+1)`-qubit
/// bit-flip oracle.
#[derive(Clone, Debug)]
pub struct LiftedObservable {
    pub operator: DenseOperator,
    /// `⟨ψ_f|A|ψ_f⟩ = scale·⟨v(U_f)|A′|v(U_f)⟩` for x-diagonal `A`.
    pub scale: f64,
}

pub const LIFT_SCALE: f64 = 2.0;

pub fn lift_observable_bitflip(a: &DenseOperator) -> Result<LiftedObservable> {
    let norm = a.operator_norm();
    if norm > 1.0 + 1e-9 {
        return Err(QsqError::NormViolation { norm });
    }
    let m = a.qubits();
    if m == 0 {
        return Err(QsqError::InvalidConfig("observable needs at least one qubit".into()));
    }
    check_dense_limit(2 * m)?;
    let zero = DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    );
    let reference = DenseOperator::identity(m - 1).kron(&DenseOperator::new(zero)?);
    Ok(LiftedObservable { operator: reference.kron(a), scale: LIFT_SCALE })
}

/// Whether `A` is block diagonal in the first `n` qubits of its `n+1`.
pub fn is_x_diagonal(a: &DenseOperator) -> bool {
    let m = a.matrix();
    (0..a.dim()).all(|r| (0..a.dim()).all(|c| r >> 1 == c >> 1 || m[(r, c)].norm() < 1e-12))
}

/// Both sides of the lift identity, `(⟨ψ_f|A|ψ_f⟩, scale·⟨v(U_f)|A′|v(U_f)⟩)`.
pub fn lift_identity_sides(f: &BooleanFunction, a: &DenseOperator) -> Result<(f64, f64)> {
    if a.qubits() != f.n + 1 {
        return Err(QsqError::DimensionMismatch { expected: f.n + 1, found: a.qubits() });
    }
    let lifted = lift_observable_bitflip(a)?;
    let psi = uniform_example_state(f)?;
    let lhs = psi.to_density().expectation(a.matrix()).re;
    let choi = choi_of_unitary(&bitflip_unitary(f)?)?.into_state();
    let rhs = choi.to_density().expectation(lifted.operator.matrix()).re;
    Ok((lhs, lifted.scale * rhs))
}

/// `B′ = H^⊗(n+1)(I_n ⊗ |1⟩⟨1|)·T·(I_n ⊗ |1⟩⟨1|)H^⊗(n+1)` with
/// `T = Σ_x c_x|x⟩⟨x|`.
#[derive(Clone, Debug)]
pub struct CompressedObservable {
    pub operator: DenseOperator,
    /// `⟨v(V_f)|B|v(V_f)⟩ = scale·⟨ψ_f|B′|ψ_f⟩`; the post-selection on
    /// the last qubit succeeds with probability ½.
    pub scale: f64,
}

pub const COMPRESS_SCALE: f64 = 2.0;

pub fn compress_observable_phase(c: &[f64]) -> Result<CompressedObservable> {
    let n = c.len().trailing_zeros() as usize;
    if c.len() != 1 << n {
        return Err(QsqError::InvalidConfig(format!("{} coefficients is not a power of two", c.len())));
    }
    check_dense_limit(n + 1)?;
    let d = 1usize << (n + 1);
    let mut t = DMatrix::<C64>::zeros(d, d);
    for (x, &cx) in c.iter().enumerate() {
        t[((x << 1) | 1, (x << 1) | 1)] = C64::new(cx, 0.0);
    }
    let h = hadamard_all(n + 1);
    Ok(CompressedObservable { operator: DenseOperator::new(&h * t * &h)?, scale: COMPRESS_SCALE })
}

fn hadamard_all(m: usize) -> DMatrix<C64> {
    let d = 1usize << m;
    let a = (0.5f64).powf(m as f64 / 2.0);
    DMatrix::from_fn(d, d, |r, c| C64::new(if (r & c).count_ones() % 2 == 1 { -a } else { a }, 0.0))
}

/// `B = Σ_x c_x |v(Z^x)⟩⟨v(Z^x)|` on `2n` qubits.
pub fn diagonal_choi_observable(c: &[f64]) -> Result<DenseOperator> {
    let n = c.len().trailing_zeros() as usize;
    if c.len() != 1 << n {
        return Err(QsqError::InvalidConfig(format!("{} coefficients is not a power of two", c.len())));
    }
    check_dense_limit(2 * n)?;
    let d = 1usize << (2 * n);
    let mut b = DMatrix::<C64>::zeros(d, d);
    for (x, &cx) in c.iter().enumerate() {
        let v = DVector::from_column_slice(pauli_choi_state(&z_string(n, x)).state().amplitudes());
        b += &v * v.adjoint() * C64::new(cx, 0.0);
    }
    DenseOperator::new(b)
}

/// Which reading of the compressed identity is being checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoefficientConvention {
    /// `⟨v(V_f)|B|v(V_f)⟩ = ⟨ψ_f|B′|ψ_f⟩` with `T` built from `c`.
    Linear,
    /// As `Linear` with the post-selection scale applied.
    LinearScaled,
    /// `Σ_x c_x² f̂(x)² = ⟨ψ_f|B′|ψ_f⟩`.
    Squared,
}

impl CoefficientConvention {
    pub const ALL: [Self; 3] = [Self::Linear, Self::LinearScaled, Self::Squared];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompressCheck {
    pub convention: CoefficientConvention,
    pub max_deviation: f64,
    pub holds: bool,
}

/// Check every convention on the given functions to `1e−9`.
pub fn validate_compress(c: &[f64], functions: &[BooleanFunction]) -> Result<Vec<CompressCheck>> {
    let b = diagonal_choi_observable(c)?;
    let compressed = compress_observable_phase(c)?;
    let mut dev = [0.0f64; 3];
    for f in functions {
        let choi = choi_of_unitary(&phase_unitary(f)?)?.into_state().to_density();
        let lhs = choi.expectation(b.matrix()).re;
        let rhs = uniform_example_state(f)?.to_density().expectation(compressed.operator.matrix()).re;
        let squared: f64 = f.fourier().iter().zip(c).map(|(fh, cx)| cx * cx * fh * fh).sum();
        dev[0] = dev[0].max((lhs - rhs).abs());
        dev[1] = dev[1].max((lhs - compressed.scale * rhs).abs());
        dev[2] = dev[2].max((squared - rhs).abs());
    }
    Ok(CoefficientConvention::ALL
        .iter()
        .zip(dev)
        .map(|(&convention, max_deviation)| CompressCheck { convention, max_deviation, holds: max_deviation <= 1e-9 })
        .collect())
}

fn check_form_size(n: usize) -> Result<()> {
    if n == 0 || n > EXHAUSTIVE_FORM_LIMIT {
        return Err(QsqError::InvalidConfig(format!(
            "exhaustive enumeration supports 1 ≤ n ≤ {EXHAUSTIVE_FORM_LIMIT}, got {n}"
        )));
    }
    Ok(())
}

fn phase_choi(form: &QuadraticForm) -> Result<StateVector> {
    Ok(choi_of_unitary(&phase_unitary(&form.to_function())?)?.into_state())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationGap {
    pub n: usize,
    /// `min_A ½‖ρ_A − 𝔼_B ρ_B‖₁` over all `A ∈ F₂^(n×n)`.
    pub gap: f64,
    pub argmin: u64,
    pub forms: u64,
}

/// Exact minimum trace distance between a quadratic-form phase oracle's
/// Choi state and the uniform mixture over all forms.
pub fn separation_gap(n: usize) -> Result<SeparationGap> {
    check_form_size(n)?;
    let forms = QuadraticForm::count(n);
    let states = (0..forms).map(|a| phase_choi(&QuadraticForm::from_index(n, a))).collect::<Result<Vec<_>>>()?;
    let d = states[0].dim();
    let mut mixture = DMatrix::<C64>::zeros(d, d);
    for s in &states {
        let v = DVector::from_column_slice(s.amplitudes());
        mixture += &v * v.adjoint();
    }
    mixture /= C64::new(forms as f64, 0.0);
    let distances: Vec<f64> = states
        .par_iter()
        .map(|s| {
            let v = DVector::from_column_slice(s.amplitudes());
            let diff = &v * v.adjoint() - &mixture;
            0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
        })
        .collect();
    let (argmin, gap) =
        distances.iter().enumerate().fold((0, f64::INFINITY), |best, (i, &g)| if g < best.1 { (i, g) } else { best });
    Ok(SeparationGap { n, gap, argmin: argmin as u64, forms })
}

/// `1 − √(17/32)`
pub fn separation_bound() -> f64 {
    1.0 - (17.0f64 / 32.0).sqrt()
}

/// Mass on Paulis whose first letter is `Z`.
pub fn default_variance_probe(n: usize) -> Result<Observable> {
    Ok(Observable::SubsetMass(PauliSet::Prefix(PauliPrefix::new(n, vec![Pauli::Z])?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub n: usize,
    pub variance: f64,
    pub std_error: f64,
    pub samples: u64,
    pub exhaustive: bool,
}

fn probe_value(form: &QuadraticForm, probe: &Observable) -> Result<f64> {
    expectation_exact(&phase_choi(form)?.into(), probe)
}

/// Variance over uniform `A` of `Tr[M|v(V_{f_A})⟩⟨·|]`, exhaustive for
/// `n ≤ 3` and sampled (with `samples` draws) otherwise.
pub fn variance_probe(n: usize, probe: &Observable, samples: usize, seed: u64) -> Result<VarianceEstimate> {
    if n <= EXHAUSTIVE_FORM_LIMIT {
        variance_exhaustive(n, probe)
    } else {
        variance_sampled(n, probe, samples, seed)
    }
}

pub fn variance_exhaustive(n: usize, probe: &Observable) -> Result<VarianceEstimate> {
    check_form_size(n)?;
    probe.validate(2 * n)?;
    let forms = QuadraticForm::count(n);
    let values = (0..forms)
        .into_par_iter()
        .map(|a| probe_value(&QuadraticForm::from_index(n, a), probe))
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<f64>() / forms as f64;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / forms as f64;
    Ok(VarianceEstimate { n, variance, std_error: 0.0, samples: forms, exhaustive: true })
}

pub fn variance_sampled(n: usize, probe: &Observable, samples: usize, seed: u64) -> Result<VarianceEstimate> {
    if samples < 4 {
        return Err(QsqError::InvalidConfig("at least 4 samples needed".into()));
    }
    if n == 0 || n * n > 64 || 2 * n > crate::state::DENSE_LIMIT {
        return Err(QsqError::InvalidConfig(format!("n = {n} too large for the variance probe")));
    }
    probe.validate(2 * n)?;
    let mut rng = rng_from_seed(seed);
    let forms: Vec<QuadraticForm> = (0..samples).map(|_| QuadraticForm::random(n, &mut rng)).collect();
    let values = forms.par_iter().map(|f| probe_value(f, probe)).collect::<Result<Vec<_>>>()?;
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / m;
    let var_of_var = ((m4 - variance * variance * (m - 3.0) / (m - 1.0)) / m).max(0.0);
    Ok(VarianceEstimate { n, variance, std_error: var_of_var.sqrt(), samples: samples as u64, exhaustive: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_matrix;
    use crate::state::operator::max_abs_diff;
    use crate::state::{bell_transform, haar_random_unitary};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn cnot() -> DMatrix<C64> {
        let mut m = DMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            m[(r, col)] = c(1.0);
        }
        m
    }

    #[test]
    fn bitflip_examples() {
        assert_eq!(bitflip_unitary(&BooleanFunction::from_fn(2, |_| false)).unwrap(), DenseOperator::identity(3));
        let u = bitflip_unitary(&BooleanFunction::from_fn(1, |x| x == 1)).unwrap();
        assert_eq!(u.matrix(), &cnot());
        let toffoli = bitflip_unitary(&BooleanFunction::from_fn(2, |x| x == 3)).unwrap();
        for col in 0..8 {
            let row = if col >= 6 { col ^ 1 } else { col };
            assert_eq!(toffoli.matrix()[(row, col)], c(1.0));
        }
    }

    #[test]
    fn bitflip_is_an_involution() {
        let mut rng = rng_from_seed(1);
        for _ in 0..10 {
            let u = bitflip_unitary(&BooleanFunction::random(3, &mut rng)).unwrap();
            assert!(max_abs_diff((&u * &u).matrix(), DenseOperator::identity(4).matrix()) == 0.0);
        }
    }

    #[test]
    fn phase_examples() {
        assert_eq!(phase_unitary(&BooleanFunction::from_fn(2, |_| false)).unwrap(), DenseOperator::identity(2));
        let z = pauli_matrix(&"Z".parse().unwrap()).unwrap();
        assert_eq!(phase_unitary(&BooleanFunction::from_fn(1, |x| x == 1)).unwrap(), z);
        let mut rng = rng_from_seed(2);
        let v = phase_unitary(&BooleanFunction::random(3, &mut rng)).unwrap();
        assert!(v.is_unitary(1e-15) && v.is_hermitian(1e-15));
    }

    #[test]
    fn phase_choi_expansion_is_fourier() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let f = BooleanFunction::random(2, &mut rng);
            let coeffs = bell_transform(&choi_of_unitary(&phase_unitary(&f).unwrap()).unwrap());
            let fh = f.fourier();
            let mut expected = vec![c(0.0); 16];
            for (x, v) in fh.iter().enumerate() {
                expected[z_string(2, x).index()] = c(*v);
            }
            for (a, b) in coeffs.iter().zip(&expected) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_example_paths_agree() {
        let f0 = BooleanFunction::from_fn(2, |_| false);
        let expected = StateVector::plus(2).tensor(&StateVector::zero(1));
        assert!((uniform_example_state(&f0).unwrap().inner(&expected).norm() - 1.0).abs() < 1e-12);
        let bell = uniform_example_state(&BooleanFunction::from_fn(1, |x| x == 1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell.amplitudes()[0] - c(h)).norm() < 1e-15 && (bell.amplitudes()[3] - c(h)).norm() < 1e-15);
        let mut rng = rng_from_seed(4);
        for n in 1..=3 {
            for _ in 0..5 {
                let f = BooleanFunction::random(n, &mut rng);
                let start = StateVector::plus(n).tensor(&StateVector::zero(1));
                let via = bitflip_unitary(&f).unwrap().apply(&start).unwrap();
                let direct = uniform_example_state(&f).unwrap();
                for (a, b) in via.amplitudes().iter().zip(direct.amplitudes()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    fn random_x_diagonal(n: usize, rng: &mut Rng) -> DenseOperator {
        let d = 1usize << (n + 1);
        let mut m = DMatrix::<C64>::zeros(d, d);
        for x in 0..1usize << n {
            let u = haar_random_unitary(1, rng);
            let a = (u.matrix() + u.matrix().adjoint()) * c(0.5);
            for r in 0..2 {
                for col in 0..2 {
                    m[((x << 1) | r, (x << 1) | col)] = a[(r, col)];
                }
            }
        }
        DenseOperator::new(m).unwrap()
    }

    #[test]
    fn lift_identity_on_x_diagonal_observables() {
        let mut rng = rng_from_seed(5);
        let identity =
            lift_identity_sides(&BooleanFunction::from_fn(2, |_| false), &DenseOperator::identity(3)).unwrap();
        assert!((identity.0 - identity.1).abs() < 1e-12);
        let parity = BooleanFunction::from_fn(2, |x| x.count_ones() % 2 == 1);
        for _ in 0..10 {
            let a = random_x_diagonal(2, &mut rng);
            assert!(is_x_diagonal(&a));
            for f in [BooleanFunction::from_fn(2, |_| false), parity.clone(), BooleanFunction::random(2, &mut rng)] {
                let (lhs, rhs) = lift_identity_sides(&f, &a).unwrap();
                assert!((lhs - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lift_identity_fails_for_general_observables() {
        // X on the first input qubit couples different x, which A′ cannot see.
        let a = pauli_matrix(&"XII".parse().unwrap()).unwrap();
        assert!(!is_x_diagonal(&a));
        let (lhs, rhs) = lift_identity_sides(&BooleanFunction::from_fn(2, |_| false), &a).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12);
        assert!(rhs.abs() < 1e-12);
        assert!(lift_observable_bitflip(&DenseOperator::identity(2).scale(c(2.0))).is_err());
    }

    #[test]
    fn compress_examples() {
        let all: Vec<BooleanFunction> = (0..16).map(|i| BooleanFunction::from_index(2, i)).collect();
        let ones = validate_compress(&[1.0; 4], &all).unwrap();
        assert!(ones.iter().find(|c| c.convention == CoefficientConvention::LinearScaled).unwrap().holds);
        let b = diagonal_choi_observable(&[1.0; 4]).unwrap();
        for f in &all {
            let choi = choi_of_unitary(&phase_unitary(f).unwrap()).unwrap().into_state().to_density();
            assert!((choi.expectation(b.matrix()).re - 1.0).abs() < 1e-12);
        }
        let single = [0.7, 0.0, 0.0, 0.0];
        let compressed = compress_observable_phase(&single).unwrap();
        for f in &all {
            let rhs = uniform_example_state(f).unwrap().to_density().expectation(compressed.operator.matrix()).re;
            assert!((2.0 * rhs - 0.7 * f.fourier()[0].powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn compress_random_coefficients() {
        let mut rng = rng_from_seed(6);
        let all: Vec<BooleanFunction> = (0..16).map(|i| BooleanFunction::from_index(2, i)).collect();
        let cs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let checks = validate_compress(&cs, &all).unwrap();
        let by = |k| checks.iter().find(|c| c.convention == k).unwrap().holds;
        assert!(by(CoefficientConvention::LinearScaled));
        assert!(!by(CoefficientConvention::Linear));
        assert!(!by(CoefficientConvention::Squared));
        let fs: Vec<BooleanFunction> = (0..30).map(|_| BooleanFunction::random(3, &mut rng)).collect();
        let cs: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(validate_compress(&cs, &fs).unwrap()[1].holds);
    }

    #[test]
    fn quadratic_forms() {
        let a = QuadraticForm::new(2, &[vec![1, 0], vec![1, 0]]).unwrap();
        // x₀² + x₁x₀
        assert_eq!((0..4).map(|x| a.eval(x)).collect::<Vec<_>>(), vec![false, false, true, false]);
        assert!(QuadraticForm::new(2, &[vec![2, 0], vec![0, 0]]).is_err());
        assert!((0..4).all(|x| !QuadraticForm::from_index(2, 0).eval(x)));
    }

    #[test]
    fn separation_gap_is_deterministic_and_above_bound() {
        let first = separation_gap(2).unwrap();
        assert_eq!(first, separation_gap(2).unwrap());
        assert_eq!(first.forms, 16);
        assert!(first.gap >= separation_bound(), "{first:?}");
        assert!(separation_gap(4).is_err());
    }

    #[test]
    fn variance_probe_values() {
        let identity = Observable::SubsetMass(PauliSet::Prefix(PauliPrefix::all(2)));
        assert!(variance_exhaustive(2, &identity).unwrap().variance < 1e-24);
        let probe = default_variance_probe(2).unwrap();
        let exact = variance_exhaustive(2, &probe).unwrap();
        let sampled = variance_sampled(2, &probe, 4000, 7).unwrap();
        assert!((exact.variance - sampled.variance).abs() <= 3.0 * sampled.std_error, "{exact:?} {sampled:?}");
    }
}
