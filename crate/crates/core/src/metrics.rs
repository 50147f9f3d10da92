//! Choi distance, expected risk over state ensembles, and channel unitarity.

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::Serialize;

use crate::rng::{rng_from_seed, Rng};
use crate::state::choi::choi_of_operator;
use crate::state::{
    haar_random_state, haar_random_unitary, random_brickwork_circuit, DenseOperator, DensityMatrix, StateVector,
};
use crate::{QsqError, Result, C64};

/// Unitarity tolerance for operators handed to the metrics.
pub const METRIC_UNITARY_TOL: f64 = 1e-8;

/// Values of `1 − |overlap|²` below this are rounding noise and reported as 0.
const ZERO_FLOOR: f64 = 64.0 * f64::EPSILON;

fn infidelity(overlap_sqr: f64) -> f64 {
    let x = 1.0 - overlap_sqr;
    if x < ZERO_FLOOR {
        0.0
    } else {
        x
    }
}

/// `D(U, V) = √(1 − |Tr[U†V]/2^n|²)`, the trace distance of the Choi states.
pub fn choi_distance(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.qubits() != v.qubits() {
        return Err(QsqError::DimensionMismatch { expected: u.qubits(), found: v.qubits() });
    }
    u.ensure_unitary(METRIC_UNITARY_TOL)?;
    v.ensure_unitary(METRIC_UNITARY_TOL)?;
    let overlap = u.matrix().dotc(v.matrix()).norm() / u.dim() as f64;
    Ok(infidelity(overlap * overlap).sqrt())
}

/// `1 − |⟨a|b⟩|²`, the squared trace distance of two pure states.
pub fn pure_trace_distance_sqr(a: &StateVector, b: &StateVector) -> f64 {
    infidelity(a.inner(b).norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StateEnsemble {
    /// Each qubit uniform over the six single-qubit stabilizer states.
    StabilizerProduct,
    /// Haar-random states on consecutive blocks of `k` qubits (the last block may be shorter).
    HaarProductK(usize),
    HaarGlobal,
    /// A random brickwork circuit of the given depth applied to `|0…0⟩`.
    BrickworkScrambled(usize),
}

impl StateEnsemble {
    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<StateVector> {
        Ok(match self {
            StateEnsemble::StabilizerProduct => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let z = C64::new(0.0, 0.0);
                let states = [
                    [C64::new(1.0, 0.0), z],
                    [z, C64::new(1.0, 0.0)],
                    [C64::new(h, 0.0), C64::new(h, 0.0)],
                    [C64::new(h, 0.0), C64::new(-h, 0.0)],
                    [C64::new(h, 0.0), C64::new(0.0, h)],
                    [C64::new(h, 0.0), C64::new(0.0, -h)],
                ];
                (0..n).fold(StateVector::from_amplitudes_unchecked(0, vec![C64::new(1.0, 0.0)]), |acc, _| {
                    let s = states[rng.random_range(0..6)];
                    acc.tensor(&StateVector::from_amplitudes_unchecked(1, s.to_vec()))
                })
            }
            StateEnsemble::HaarProductK(k) => {
                if *k == 0 {
                    return Err(QsqError::InvalidConfig("block size must be positive".into()));
                }
                let mut acc = StateVector::from_amplitudes_unchecked(0, vec![C64::new(1.0, 0.0)]);
                let mut left = n;
                while left > 0 {
                    let b = left.min(*k);
                    acc = acc.tensor(&haar_random_state(b, rng));
                    left -= b;
                }
                acc
            }
            StateEnsemble::HaarGlobal => haar_random_state(n, rng),
            StateEnsemble::BrickworkScrambled(depth) => {
                let mut v = StateVector::zero(n);
                if n == 1 {
                    v.apply_on(&haar_random_unitary(1, rng), &[0])?;
                } else {
                    random_brickwork_circuit(n, *depth, rng)?.apply_to(&mut v, 0)?;
                }
                v
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte-Carlo `𝔼_ψ ‖Uψ U† − Vψ V†‖²_tr` with its standard error.
pub fn expected_risk_mc(
    u: &DenseOperator,
    v: &DenseOperator,
    ensemble: StateEnsemble,
    samples: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if samples < 2 {
        return Err(QsqError::InvalidConfig("at least 2 samples needed".into()));
    }
    if u.qubits() != v.qubits() {
        return Err(QsqError::DimensionMismatch { expected: u.qubits(), found: v.qubits() });
    }
    let n = u.qubits();
    let mut rng = rng_from_seed(seed);
    let values = (0..samples)
        .map(|_| {
            let psi = ensemble.sample(n, &mut rng)?;
            Ok(pure_trace_distance_sqr(&u.apply(&psi)?, &v.apply(&psi)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok(RiskEstimate { mean, std_error: (var / samples as f64).sqrt(), samples })
}

/// A channel in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    n: usize,
    kraus: Vec<DenseOperator>,
}

impl KrausChannel {
    /// Checks `Σ K†K = I` within 1e-9.
    pub fn new(kraus: Vec<DenseOperator>) -> Result<Self> {
        let first = kraus.first().ok_or(QsqError::EmptyList)?;
        let n = first.qubits();
        let d = first.dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for k in &kraus {
            if k.qubits() != n {
                return Err(QsqError::DimensionMismatch { expected: n, found: k.qubits() });
            }
            acc += k.matrix().adjoint() * k.matrix();
        }
        let defect = (acc - DMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-9 {
            return Err(QsqError::NotTracePreserving { defect });
        }
        Ok(Self { n, kraus })
    }

    pub fn unitary(u: DenseOperator) -> Result<Self> {
        u.ensure_unitary(1e-9)?;
        Self::new(vec![u])
    }

    /// `(1 − p)ρ + p·Tr[ρ] I/2^n`, as `√(1 − p + p/4^n)·I` and `√(p/4^n)·P`.
    pub fn depolarizing(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QsqError::InvalidConfig(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let d2 = (1u64 << (2 * n)) as f64;
        let mut kraus = vec![DenseOperator::identity(n).scale(C64::new((1.0 - p + p / d2).sqrt(), 0.0))];
        if p > 0.0 {
            for q in crate::pauli::PauliString::all(n).skip(1) {
                kraus.push(crate::pauli::pauli_matrix(&q)?.scale(C64::new((p / d2).sqrt(), 0.0)));
            }
        }
        Self::new(kraus)
    }

    /// Random channel from a Haar-random Stinespring isometry into an
    /// environment of `2^env_qubits` dimensions.
    pub fn random_stinespring(n: usize, env_qubits: usize, rng: &mut Rng) -> Result<Self> {
        let big = haar_random_unitary(n + env_qubits, rng);
        let d = 1usize << n;
        let kraus = (0..1usize << env_qubits)
            .map(|l| {
                let m = DMatrix::from_fn(d, d, |j, i| big.matrix()[((j << env_qubits) | l, i << env_qubits)]);
                DenseOperator::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kraus)
    }

    /// Uniform mixture of `count` Haar-random unitaries; always unital.
    pub fn random_mixed_unitary(n: usize, count: usize, rng: &mut Rng) -> Result<Self> {
        let w = C64::new(1.0 / (count as f64).sqrt(), 0.0);
        Self::new((0..count).map(|_| haar_random_unitary(n, rng).scale(w)).collect())
    }

    /// Single-qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        let c = |x: f64| C64::new(x, 0.0);
        let k0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
        let k1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
        Self::new(vec![DenseOperator::new(k0)?, DenseOperator::new(k1)?])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn kraus(&self) -> &[DenseOperator] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        self.kraus
            .iter()
            .map(|k| k.matrix() * rho * k.matrix().adjoint())
            .fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |acc, x| acc + x)
    }
}

/// The normalized Choi matrix `Σ_ℓ |v(K_ℓ)⟩⟨v(K_ℓ)|`.
pub fn choi_matrix(ch: &KrausChannel) -> DensityMatrix {
    let mut acc = DMatrix::<C64>::zeros(ch.dim() * ch.dim(), ch.dim() * ch.dim());
    for k in ch.kraus() {
        let v = choi_of_operator(k);
        let x = nalgebra::DVector::from_column_slice(v.state().amplitudes());
        acc += &x * x.adjoint();
    }
    DensityMatrix::new(acc).expect("Choi matrix of a valid channel")
}

/// `Σ_{ℓ,ℓ′} |Tr[K_ℓ K_ℓ′†]|²`
pub fn kraus_overlap_sum(ch: &KrausChannel) -> f64 {
    let ks = ch.kraus();
    ks.iter().flat_map(|a| ks.iter().map(move |b| a.matrix().dotc(b.matrix()).norm_sqr())).sum()
}

/// `Tr[N(I/d)²]`
fn mixed_output_purity(ch: &KrausChannel) -> f64 {
    let d = ch.dim();
    let out = ch.apply(&(DMatrix::<C64>::identity(d, d) / C64::new(d as f64, 0.0)));
    out.norm_squared()
}

fn swap(d: usize) -> DMatrix<C64> {
    let mut f = DMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    f
}

/// Unitarity from its definition
/// `d/(d−1)·(𝔼_ψ Tr[N(ψ)²] − Tr[N(I/d)²])`, with the Haar average taken
/// exactly through `𝔼 ψ⊗ψ = (𝕀 + 𝔽)/(d(d+1))`.
pub fn unitarity(ch: &KrausChannel) -> f64 {
    let d = ch.dim();
    let f = swap(d);
    let moment = (DMatrix::<C64>::identity(d * d, d * d) + &f) / C64::new((d * (d + 1)) as f64, 0.0);
    let mut out = DMatrix::<C64>::zeros(d * d, d * d);
    for a in ch.kraus() {
        for b in ch.kraus() {
            let k = a.matrix().kronecker(b.matrix());
            out += &k * &moment * k.adjoint();
        }
    }
    let avg_purity = (&f * out).trace().re;
    d as f64 / (d as f64 - 1.0) * (avg_purity - mixed_output_purity(ch))
}

/// Unitarity from the Choi purity, `(d²·Tr[J²] − d·Tr[N(I/d)²])/(d² − 1)`.
pub fn unitarity_closed_form(ch: &KrausChannel) -> f64 {
    let d = ch.dim() as f64;
    let purity = choi_matrix(ch).purity();
    (d * d * purity - d * mixed_output_purity(ch)) / (d * d - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SandwichCheck {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
}

fn sandwich(lower: f64, value: f64, upper: f64) -> SandwichCheck {
    let slack = 1e-9;
    SandwichCheck { lower, value, upper, holds: lower - slack <= value && value <= upper + slack }
}

/// `(d²P − 1)/(d² − 1) ≤ u ≤ d²P/(d² − 1)` with `P = Tr[J²]`.
///
/// The lower bound requires `Tr[N(I/d)²] = 1/d`, i.e. a unital channel.
pub fn purity_unitarity_sandwich_check(ch: &KrausChannel) -> SandwichCheck {
    let d2 = (ch.dim() * ch.dim()) as f64;
    let p = choi_matrix(ch).purity();
    sandwich((d2 * p - 1.0) / (d2 - 1.0), unitarity(ch), d2 * p / (d2 - 1.0))
}

/// `(d²P − d)/(d² − 1) ≤ u ≤ (d²P − 1)/(d² − 1)`, valid for every channel.
pub fn general_sandwich_check(ch: &KrausChannel) -> SandwichCheck {
    let d = ch.dim() as f64;
    let p = choi_matrix(ch).purity();
    sandwich((d * d * p - d) / (d * d - 1.0), unitarity(ch), (d * d * p - 1.0) / (d * d - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_matrix, PauliString};
    use crate::state::ChoiState;

    #[test]
    fn distance_values() {
        let mut rng = rng_from_seed(1);
        let u = haar_random_unitary(2, &mut rng);
        assert_eq!(choi_distance(&u, &u).unwrap(), 0.0);
        assert_eq!(choi_distance(&u, &u.scale(C64::from_polar(1.0, 0.7))).unwrap(), 0.0);
        let xx = pauli_matrix(&"XX".parse::<PauliString>().unwrap()).unwrap();
        assert!((choi_distance(&DenseOperator::identity(2), &xx).unwrap() - 1.0).abs() < 1e-15);
        assert!(choi_distance(&u, &DenseOperator::identity(2).scale(C64::new(2.0, 0.0))).is_err());
    }

    #[test]
    fn distance_matches_choi_overlap() {
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let u = haar_random_unitary(2, &mut rng);
            let v = haar_random_unitary(2, &mut rng);
            let cu = crate::state::choi_of_unitary(&u).unwrap();
            let cv = crate::state::choi_of_unitary(&v).unwrap();
            let direct = (1.0 - cu.overlap(&cv).powi(2)).sqrt();
            assert!((choi_distance(&u, &v).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_properties() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let [a, b, c] = [0, 1, 2].map(|_| haar_random_unitary(2, &mut rng));
            let ab = choi_distance(&a, &b).unwrap();
            assert!((ab - choi_distance(&b, &a).unwrap()).abs() < 1e-15);
            assert!(ab >= 0.0);
            assert!(ab <= choi_distance(&a, &c).unwrap() + choi_distance(&c, &b).unwrap() + 1e-12);
        }
    }

    #[test]
    fn risk_of_equal_unitaries_is_zero() {
        let mut rng = rng_from_seed(4);
        let u = haar_random_unitary(2, &mut rng);
        for e in [StateEnsemble::HaarGlobal, StateEnsemble::StabilizerProduct, StateEnsemble::HaarProductK(1)] {
            let r = expected_risk_mc(&u, &u, e, 50, 1).unwrap();
            assert_eq!(r.mean, 0.0);
        }
        assert!(expected_risk_mc(&u, &u, StateEnsemble::HaarGlobal, 1, 1).is_err());
    }

    #[test]
    fn haar_risk_identity() {
        let mut rng = rng_from_seed(5);
        for seed in 0..5 {
            let u = haar_random_unitary(2, &mut rng);
            let v = haar_random_unitary(2, &mut rng);
            let d = choi_distance(&u, &v).unwrap();
            let r = expected_risk_mc(&u, &v, StateEnsemble::HaarGlobal, 2000, seed).unwrap();
            assert!((r.mean - 0.8 * d * d).abs() <= 3.0 * r.std_error + 1e-12);
        }
    }

    #[test]
    fn stabilizer_states_are_normalized() {
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let v = StateEnsemble::StabilizerProduct.sample(3, &mut rng).unwrap();
            assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
            assert_eq!(v.qubits(), 3);
        }
        assert_eq!(StateEnsemble::HaarProductK(2).sample(3, &mut rng).unwrap().qubits(), 3);
        assert_eq!(StateEnsemble::BrickworkScrambled(2).sample(3, &mut rng).unwrap().qubits(), 3);
    }

    #[test]
    fn choi_matrix_examples() {
        let id = KrausChannel::unitary(DenseOperator::identity(1)).unwrap();
        let omega = ChoiState::maximally_entangled(1).into_state().to_density();
        assert!(choi_matrix(&id).trace_distance(&omega) < 1e-12);
        let p = 0.3;
        let dep = choi_matrix(&KrausChannel::depolarizing(2, p).unwrap());
        let omega = ChoiState::maximally_entangled(2).into_state().to_density();
        let expected =
            omega.matrix() * C64::new(1.0 - p, 0.0) + DMatrix::<C64>::identity(16, 16) * C64::new(p / 16.0, 0.0);
        assert!((dep.matrix() - expected).norm() < 1e-12);
        assert!((dep.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_paths_and_identities() {
        let mut rng = rng_from_seed(7);
        for _ in 0..10 {
            let ch = KrausChannel::random_stinespring(2, 2, &mut rng).unwrap();
            assert!((unitarity(&ch) - unitarity_closed_form(&ch)).abs() < 1e-9);
            assert!((kraus_overlap_sum(&ch) - 16.0 * choi_matrix(&ch).purity()).abs() < 1e-9);
            assert!(general_sandwich_check(&ch).holds);
        }
    }

    #[test]
    fn unitarity_extremes() {
        let mut rng = rng_from_seed(8);
        let u = KrausChannel::unitary(haar_random_unitary(2, &mut rng)).unwrap();
        assert!((unitarity(&u) - 1.0).abs() < 1e-9);
        assert!(purity_unitarity_sandwich_check(&u).holds);
        let dep = KrausChannel::depolarizing(2, 1.0).unwrap();
        assert!(unitarity(&dep).abs() < 1e-9);
        for p in [0.0, 0.25, 0.5, 1.0] {
            assert!(purity_unitarity_sandwich_check(&KrausChannel::depolarizing(2, p).unwrap()).holds);
        }
    }

    #[test]
    fn stated_lower_bound_needs_unital_channels() {
        let ad = KrausChannel::amplitude_damping(1.0).unwrap();
        assert!(unitarity(&ad).abs() < 1e-12);
        let check = purity_unitarity_sandwich_check(&ad);
        assert!((check.lower - 1.0 / 3.0).abs() < 1e-12);
        assert!(!check.holds);
        assert!(general_sandwich_check(&ad).holds);
        let mut rng = rng_from_seed(9);
        let mix = KrausChannel::random_mixed_unitary(2, 3, &mut rng).unwrap();
        assert!(purity_unitarity_sandwich_check(&mix).holds);
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let k = DenseOperator::identity(1).scale(C64::new(0.5, 0.0));
        assert!(matches!(KrausChannel::new(vec![k]), Err(QsqError::NotTracePreserving { .. })));
    }
}
