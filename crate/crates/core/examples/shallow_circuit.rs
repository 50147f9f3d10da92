//! Learn a depth-1 brickwork circuit from its local Choi marginals.
use qsq::learners::{learn_shallow, CoordinateSearch, ShallowConfig};
use qsq::metrics::choi_distance;
use qsq::oracle::{NoiseModel, QsqOracle};
use qsq::rng::rng_from_seed;
use qsq::state::random_brickwork_circuit;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(4);
    let u = random_brickwork_circuit(3, 1, &mut rng)?.compile();
    let mut oracle = QsqOracle::for_unitary(&u, NoiseModel::Exact, 9)?;
    let search = CoordinateSearch { restarts: 50, ..CoordinateSearch::default() };
    let learned = learn_shallow(&mut oracle, &ShallowConfig::new(1, 0.3)?, &search, 1)?;
    if let Some(cert) = &learned.certificate {
        println!(
            "certificate {:.4} <= {:.4}: {} after {} restarts",
            cert.value, cert.threshold, cert.certified, cert.restarts
        );
    }
    println!("queries {}", learned.ledger.total_queries);
    println!("distance {:.4}", choi_distance(&u, &learned.unitary)?);
    Ok(())
}
