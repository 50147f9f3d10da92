//! Goldreich–Levin over Pauli prefixes and quantum Boolean function learning.

use std::collections::BTreeMap;

use super::estimate_subset_mass;
use crate::oracle::{Observable, StatisticalQuery};
use crate::pauli::{Pauli, PauliExpansion, PauliPrefix, PauliSet, PauliString};
use crate::{QsqError, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlConfig {
    pub gamma: f64,
    pub tolerance: f64,
}

impl GlConfig {
    /// Threshold `γ` with the default tolerance `γ²/4`.
    pub fn new(gamma: f64) -> Result<Self> {
        Self::with_tolerance(gamma, gamma * gamma / 4.0)
    }

    pub fn with_tolerance(gamma: f64, tolerance: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(QsqError::InvalidConfig(format!("gamma {gamma} outside (0, 1]")));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(QsqError::InvalidTolerance(tolerance));
        }
        Ok(Self { gamma, tolerance })
    }

    pub fn keep_threshold(&self) -> f64 {
        self.gamma * self.gamma / 2.0
    }

    /// `4n·⌈4/γ²⌉`
    pub fn query_bound(&self, n: usize) -> u64 {
        4 * n as u64 * (4.0 / (self.gamma * self.gamma)).ceil() as u64
    }
}

/// Strings whose coefficient may be heavy, found level by level: every
/// live prefix is extended by I, X, Y, Z in turn and the extension is kept
/// when its estimated mass is at least `γ²/2`.
pub fn goldreich_levin<O: StatisticalQuery + ?Sized>(oracle: &mut O, cfg: &GlConfig) -> Result<Vec<PauliString>> {
    let n = oracle.system_qubits();
    let mut live = vec![PauliPrefix::all(n)];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &live {
            for letter in Pauli::ALL {
                let ext = prefix.extend(letter);
                let mass = estimate_subset_mass(oracle, ext.clone().into(), cfg.tolerance)?;
                if mass >= cfg.keep_threshold() {
                    next.push(ext);
                }
            }
        }
        live = next;
    }
    Ok(live.iter().filter_map(PauliPrefix::to_string_if_complete).collect())
}

/// Real coefficients of a quantum Boolean function on `list`, up to one
/// global sign.
///
/// Magnitudes come from singleton subset-mass queries at tolerance `τ²`.
/// The largest estimate is the anchor and gets sign `+`; every other sign is
/// the sign of a sign-probe query against the anchor at tolerance `τ²/2`.
pub fn estimate_coefficients_with_signs<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    list: &[PauliString],
    tolerance: f64,
) -> Result<BTreeMap<PauliString, f64>> {
    if list.is_empty() {
        return Err(QsqError::EmptyList);
    }
    let mut squares = Vec::with_capacity(list.len());
    for p in list {
        squares.push(estimate_subset_mass(oracle, PauliSet::singleton(*p), tolerance * tolerance)?);
    }
    let anchor_idx = (0..list.len()).fold(0, |best, i| if squares[i] > squares[best] { i } else { best });
    let anchor = list[anchor_idx];
    let anchor_mag = squares[anchor_idx].max(0.0).sqrt();
    if anchor_mag < tolerance / 2.0 {
        return Err(QsqError::AnchorTooSmall { magnitude: anchor_mag, half_tolerance: tolerance / 2.0 });
    }
    let mut out = BTreeMap::new();
    for (i, p) in list.iter().enumerate() {
        let mag = squares[i].max(0.0).sqrt();
        let sign = if i == anchor_idx {
            1.0
        } else {
            let probe = Observable::SignProbe { anchor, other: *p };
            if oracle.query(&probe, tolerance * tolerance / 2.0)? >= 0.0 {
                1.0
            } else {
                -1.0
            }
        };
        out.insert(*p, sign * mag);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QbfConfig {
    pub gl: GlConfig,
    /// Per-coefficient accuracy `τ`; queries run at `τ²` and `τ²/2`.
    pub coefficient_tolerance: f64,
}

impl QbfConfig {
    /// `γ = ε·2^−k/2`, coefficient accuracy `ε·4^−k`.
    pub fn from_truncation(k: u32, epsilon: f64) -> Result<Self> {
        let gamma = epsilon * 0.5f64.powi(k as i32) / 2.0;
        Ok(Self { gl: GlConfig::new(gamma)?, coefficient_tolerance: epsilon * 0.25f64.powi(k as i32) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QbfEstimate {
    pub list: Vec<PauliString>,
    /// Real coefficients stored as complex numbers.
    pub expansion: PauliExpansion,
    /// `Σ B̂_P²`
    pub recovered_mass: f64,
    /// Whether `Σ B̂_P² ≥ 1 − ε²`.
    pub concentrated: bool,
}

impl QbfEstimate {
    /// `min{‖A − A′‖₂, ‖A + A′‖₂}` in the normalized Hilbert–Schmidt norm.
    pub fn sign_free_distance(&self, target: &PauliExpansion) -> f64 {
        let dist = |s: f64| {
            let keys = target.iter().map(|(p, _)| *p).chain(self.expansion.iter().map(|(p, _)| *p));
            let mut seen = std::collections::BTreeSet::new();
            keys.filter(|p| seen.insert(*p))
                .map(|p| (target.get(&p) - self.expansion.get(&p) * s).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        dist(1.0).min(dist(-1.0))
    }
}

/// Truncated Pauli expansion of a quantum Boolean target, up to global sign.
pub fn learn_qbf<O: StatisticalQuery + ?Sized>(oracle: &mut O, k: u32, epsilon: f64) -> Result<QbfEstimate> {
    learn_qbf_with(oracle, &QbfConfig::from_truncation(k, epsilon)?, epsilon)
}

/// [`learn_qbf`] with explicit thresholds; `epsilon` only sets the
/// concentration flag.
pub fn learn_qbf_with<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    cfg: &QbfConfig,
    epsilon: f64,
) -> Result<QbfEstimate> {
    let n = oracle.system_qubits();
    let list = goldreich_levin(oracle, &cfg.gl)?;
    let mut expansion = PauliExpansion::new(n);
    if !list.is_empty() {
        match estimate_coefficients_with_signs(oracle, &list, cfg.coefficient_tolerance) {
            Ok(coeffs) => {
                for (p, c) in coeffs {
                    expansion.insert(p, C64::new(c, 0.0))?;
                }
            }
            // Every magnitude is below τ/2, so zero is within the coefficient accuracy.
            Err(QsqError::AnchorTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let recovered_mass = expansion.mass();
    Ok(QbfEstimate { list, expansion, recovered_mass, concentrated: recovered_mass >= 1.0 - epsilon * epsilon })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use nalgebra::DMatrix;

    use super::*;
    use crate::oracle::{NoiseModel, QsqOracle};
    use crate::pauli::pauli_matrix;
    use crate::rng::rng_from_seed;
    use crate::state::{random_brickwork_circuit, DenseOperator};

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn cnot() -> DenseOperator {
        let mut m = DMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, c)] = C64::new(1.0, 0.0);
        }
        DenseOperator::new(m).unwrap()
    }

    fn exact(u: &DenseOperator) -> QsqOracle {
        QsqOracle::for_unitary(u, NoiseModel::Exact, 0).unwrap()
    }

    #[test]
    fn single_pauli_is_found() {
        let p = ps("XZY");
        let mut o = exact(&pauli_matrix(&p).unwrap());
        assert_eq!(goldreich_levin(&mut o, &GlConfig::new(0.9).unwrap()).unwrap(), vec![p]);
    }

    #[test]
    fn cnot_lists() {
        let mut o = exact(&cnot());
        let l = goldreich_levin(&mut o, &GlConfig::new(0.4).unwrap()).unwrap();
        let names: Vec<String> = l.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["II", "IX", "ZI", "ZX"]);
        let mut o = exact(&cnot());
        assert!(goldreich_levin(&mut o, &GlConfig::new(0.8).unwrap()).unwrap().is_empty());
        assert!(o.ledger().total_queries <= GlConfig::new(0.8).unwrap().query_bound(2));
    }

    #[test]
    fn hadamard_signs() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let had = DenseOperator::new(DMatrix::from_row_slice(2, 2, &[h, h, h, -h])).unwrap();
        let mut o = exact(&had);
        let c = estimate_coefficients_with_signs(&mut o, &[ps("X"), ps("Z")], 0.1).unwrap();
        assert!((c[&ps("X")] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((c[&ps("Z")] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(o.ledger().count("subset_mass"), 2);
        assert_eq!(o.ledger().count("sign_probe"), 1);
    }

    #[test]
    fn conjugated_z() {
        // CNOT (Z⊗I) CNOT = Z⊗I
        let z = pauli_matrix(&ps("ZI")).unwrap();
        let a = &(&cnot() * &z) * &cnot();
        let mut o = exact(&a);
        let c = estimate_coefficients_with_signs(&mut o, &[ps("ZI")], 0.1).unwrap();
        assert!((c[&ps("ZI")].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_list_and_small_anchor() {
        let mut o = exact(&DenseOperator::identity(1));
        assert!(matches!(estimate_coefficients_with_signs(&mut o, &[], 0.1), Err(QsqError::EmptyList)));
        assert!(matches!(
            estimate_coefficients_with_signs(&mut o, &[ps("X")], 0.1),
            Err(QsqError::AnchorTooSmall { .. })
        ));
    }

    #[test]
    fn zz_is_learned_exactly() {
        let zz = pauli_matrix(&ps("ZZ")).unwrap();
        for k in 0..3 {
            let mut o = exact(&zz);
            let est = learn_qbf(&mut o, k, 0.1).unwrap();
            let target = PauliExpansion::from_operator(&zz, 1e-12);
            assert_eq!(est.list, vec![ps("ZZ")]);
            assert!(est.sign_free_distance(&target) < 1e-12);
            assert!(est.concentrated);
        }
    }

    #[test]
    fn heisenberg_evolved_observable() {
        let mut rng = rng_from_seed(21);
        let u = random_brickwork_circuit(2, 1, &mut rng).unwrap().compile();
        let a = &(&u.adjoint() * &pauli_matrix(&ps("ZI")).unwrap()) * &u;
        let mut o = exact(&a);
        let est = learn_qbf(&mut o, 1, 0.1).unwrap();
        let target = PauliExpansion::from_operator(&a, 0.0);
        assert!(est.sign_free_distance(&target) <= 0.1);
    }

    #[test]
    fn adversarial_noise_keeps_guarantees() {
        let mut rng = rng_from_seed(5);
        for trial in 0..20 {
            let u = random_brickwork_circuit(3, 2, &mut rng).unwrap().compile();
            let a = &(&u.adjoint() * &pauli_matrix(&ps("ZII")).unwrap()) * &u;
            let coeffs = PauliExpansion::from_operator(&a, 0.0);
            for gamma in [0.3, 0.5] {
                let cfg = GlConfig::new(gamma).unwrap();
                for positive in [true, false] {
                    let mut o = QsqOracle::for_unitary(&a, NoiseModel::AdversarialSign { positive }, trial).unwrap();
                    let l = goldreich_levin(&mut o, &cfg).unwrap();
                    for p in PauliString::all(3) {
                        let mag = coeffs.get(&p).norm();
                        if mag >= gamma {
                            assert!(l.contains(&p));
                        }
                    }
                    assert!(l.iter().all(|p| coeffs.get(p).norm() >= gamma / 2.0));
                    assert!(o.ledger().total_queries <= cfg.query_bound(3));
                }
            }
        }
    }
}
