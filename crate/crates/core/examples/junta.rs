//! Recover a 2-junta hidden in a 5 qubit register.
use qsq::learners::{learn_junta, JuntaConfig};
use qsq::metrics::choi_distance;
use qsq::oracle::{NoiseModel, QsqOracle};
use qsq::rng::rng_from_seed;
use qsq::state::haar_random_unitary;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(11);
    let u = haar_random_unitary(2, &mut rng).embed(&[1, 4], 5)?;
    let mut oracle = QsqOracle::for_unitary(&u, NoiseModel::BoundedUniform, 5)?;
    let learned = learn_junta(&mut oracle, &JuntaConfig::new(2, 0.2)?)?;
    println!("support {:?}", learned.support);
    println!("queries {}", learned.ledger.total_queries);
    println!("unitarity defect {:.2e}", learned.unitarity_defect);
    println!("distance {:.4}", choi_distance(&u, &learned.unitary)?);
    Ok(())
}
