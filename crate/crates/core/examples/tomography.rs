//! Pure and mixed state tomography from doubled Pauli queries.
use qsq::learners::qsq_state_tomography;
use qsq::oracle::{NoiseModel, QsqOracle, StatisticalQuery};
use qsq::rng::rng_from_seed;
use qsq::state::haar_random_state;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(2);
    for m in 1..=3 {
        let psi = haar_random_state(m, &mut rng);
        let rho = psi.to_density();
        for pure in [false, true] {
            let mut oracle = QsqOracle::new(psi.clone(), NoiseModel::BoundedUniform, m as u64);
            let est = qsq_state_tomography(&mut oracle, 0.1, pure)?;
            println!(
                "m={m} pure={pure:<5} queries={:<3} trace distance {:.4}",
                oracle.ledger().total_queries,
                est.to_density().trace_distance(&rho)
            );
        }
    }
    Ok(())
}
