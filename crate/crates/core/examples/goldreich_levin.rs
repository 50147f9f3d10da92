//! Heavy Pauli coefficients of a Heisenberg-evolved observable, with signs.
use qsq::learners::{goldreich_levin, learn_qbf, GlConfig};
use qsq::oracle::{NoiseModel, QsqOracle, StatisticalQuery};
use qsq::pauli::{pauli_matrix, PauliExpansion};
use qsq::rng::rng_from_seed;
use qsq::state::random_brickwork_circuit;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(3);
    let u = random_brickwork_circuit(4, 1, &mut rng)?.compile();
    let a = &(&u.adjoint() * &pauli_matrix(&"IZII".parse()?)?) * &u;
    let truth = PauliExpansion::from_operator(&a, 1e-12);

    let mut oracle = QsqOracle::for_unitary(&a, NoiseModel::AdversarialSign { positive: true }, 0)?;
    let heavy = goldreich_levin(&mut oracle, &GlConfig::new(0.25)?)?;
    println!("GL list ({} queries): {heavy:?}", oracle.ledger().total_queries);

    let mut oracle = QsqOracle::for_unitary(&a, NoiseModel::BoundedUniform, 1)?;
    let est = learn_qbf(&mut oracle, 1, 0.1)?;
    for (p, c) in est.expansion.iter() {
        println!("{p}  estimate {:+.4}  true {:+.4}", c.re, truth.get(p).re);
    }
    println!("distance up to global sign {:.4}", est.sign_free_distance(&truth));
    Ok(())
}
