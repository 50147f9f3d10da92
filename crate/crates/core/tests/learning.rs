use qsq::learners::{
    estimate_coefficients_with_signs, goldreich_levin, learn_junta, learn_qbf, learn_shallow, qsq_state_tomography,
    CoordinateSearch, GlConfig, JuntaConfig, ShallowConfig,
};
use qsq::metrics::choi_distance;
use qsq::oracle::{NoiseModel, Observable, QsqOracle, QueryLedger, StatisticalQuery};
use qsq::oracle_maps::{phase_unitary, QuadraticForm};
use qsq::pauli::{pauli_matrix, PauliExpansion, PauliString};
use qsq::rng::rng_from_seed;
use qsq::state::{haar_random_state, haar_random_unitary, random_brickwork_circuit, DenseOperator};
use qsq::Result;
use rand::Rng as _;

/// Counts calls before handing them to the wrapped oracle.
struct Counting<O> {
    inner: O,
    calls: u64,
}

impl<O: StatisticalQuery> StatisticalQuery for Counting<O> {
    fn register_qubits(&self) -> usize {
        self.inner.register_qubits()
    }

    fn query(&mut self, obs: &Observable, tolerance: f64) -> Result<f64> {
        self.calls += 1;
        self.inner.query(obs, tolerance)
    }

    fn ledger(&self) -> &QueryLedger {
        self.inner.ledger()
    }
}

fn counting(u: &DenseOperator, noise: NoiseModel, seed: u64) -> Counting<QsqOracle> {
    Counting { inner: QsqOracle::for_unitary(u, noise, seed).unwrap(), calls: 0 }
}

fn conjugated(u: &DenseOperator, p: &PauliString) -> DenseOperator {
    &(&u.adjoint() * &pauli_matrix(p).unwrap()) * u
}

#[test]
fn ledger_matches_calls_in_every_learner() {
    let mut rng = rng_from_seed(1);
    let a = conjugated(&random_brickwork_circuit(3, 1, &mut rng).unwrap().compile(), &"ZII".parse().unwrap());
    let mut o = counting(&a, NoiseModel::BoundedUniform, 1);
    learn_qbf(&mut o, 1, 0.2).unwrap();
    assert_eq!(o.calls, o.ledger().total_queries);

    let u = haar_random_unitary(2, &mut rng).embed(&[1, 3], 4).unwrap();
    let mut o = counting(&u, NoiseModel::BoundedUniform, 2);
    learn_junta(&mut o, &JuntaConfig::new(2, 0.3).unwrap()).unwrap();
    assert_eq!(o.calls, o.ledger().total_queries);

    let u = random_brickwork_circuit(2, 1, &mut rng).unwrap().compile();
    let mut o = counting(&u, NoiseModel::Exact, 3);
    learn_shallow(&mut o, &ShallowConfig::new(1, 0.3).unwrap(), &CoordinateSearch::default(), 4).unwrap();
    assert_eq!(o.calls, o.ledger().total_queries);

    let mut o =
        Counting { inner: QsqOracle::new(haar_random_state(2, &mut rng), NoiseModel::BoundedUniform, 5), calls: 0 };
    qsq_state_tomography(&mut o, 0.1, true).unwrap();
    assert_eq!(o.calls, 15);
    assert_eq!(o.ledger().total_queries, 15);
}

#[test]
fn pairwise_signs_are_recovered_exactly() {
    let mut rng = rng_from_seed(2);
    for _ in 0..20 {
        let u = random_brickwork_circuit(3, 2, &mut rng).unwrap().compile();
        let p = PauliString::from_index(3, rng.random_range(1..64));
        let a = conjugated(&u, &p);
        let exact = PauliExpansion::from_operator(&a, 0.0);
        let mut o = QsqOracle::for_unitary(&a, NoiseModel::AdversarialSign { positive: false }, 0).unwrap();
        let list = goldreich_levin(&mut o, &GlConfig::new(0.3).unwrap()).unwrap();
        let est = estimate_coefficients_with_signs(&mut o, &list, 0.1).unwrap();
        for x in &list {
            for y in &list {
                let truth = exact.get(x).re * exact.get(y).re;
                assert_eq!(truth.signum(), (est[x] * est[y]).signum(), "{x} {y}");
            }
        }
    }
}

#[test]
fn quadratic_phase_oracles_are_learned() {
    let mut rng = rng_from_seed(3);
    for _ in 0..10 {
        let form = QuadraticForm::random(3, &mut rng);
        let v = phase_unitary(&form.to_function()).unwrap();
        assert!(v.is_hermitian(1e-15) && v.is_unitary(1e-15));
        let mut o = QsqOracle::for_unitary(&v, NoiseModel::BoundedUniform, 7).unwrap();
        let est = learn_qbf(&mut o, 1, 0.2).unwrap();
        assert!(est.sign_free_distance(&PauliExpansion::from_operator(&v, 0.0)) <= 0.2);
    }
}

#[test]
fn prediction_transfer_on_pure_states() {
    // Hölder: |Tr[(A − A′)ρ]| ≤ ‖A − A′‖_op ≤ √d·‖A − A′‖₂ with the normalized norm.
    let mut rng = rng_from_seed(4);
    let u = random_brickwork_circuit(3, 1, &mut rng).unwrap().compile();
    let a = conjugated(&u, &"ZIZ".parse().unwrap());
    let mut o = QsqOracle::for_unitary(&a, NoiseModel::BoundedUniform, 8).unwrap();
    let est = learn_qbf(&mut o, 1, 0.1).unwrap();
    let b = est.expansion.to_operator().unwrap();
    let dist = est.sign_free_distance(&PauliExpansion::from_operator(&a, 0.0));
    for _ in 0..50 {
        let rho = haar_random_state(3, &mut rng).to_density();
        let gap = (rho.expectation(a.matrix()).re.abs() - rho.expectation(b.matrix()).re.abs()).abs();
        assert!(gap <= 8f64.sqrt() * dist + 1e-12, "{gap} vs {dist}");
    }
}

#[test]
fn junta_support_is_never_spurious() {
    let mut rng = rng_from_seed(5);
    for seed in 0..20 {
        let u = haar_random_unitary(1, &mut rng).embed(&[2], 4).unwrap();
        let mut o = QsqOracle::for_unitary(&u, NoiseModel::BoundedUniform, seed).unwrap();
        let learned = learn_junta(&mut o, &JuntaConfig::new(2, 0.2).unwrap()).unwrap();
        assert!(learned.support.unwrap().iter().all(|&q| q == 2));
        assert!(choi_distance(&u, &learned.unitary).unwrap() <= 0.2);
    }
}
