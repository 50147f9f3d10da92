//! Average prediction risk over several input ensembles next to the Choi distance.
use qsq::metrics::{choi_distance, expected_risk_mc, StateEnsemble};
use qsq::rng::rng_from_seed;
use qsq::state::haar_random_unitary;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(5);
    let n = 2;
    let u = haar_random_unitary(n, &mut rng);
    let v = haar_random_unitary(n, &mut rng);
    let d = choi_distance(&u, &v)?;
    let dim = (1 << n) as f64;
    println!("Choi distance {d:.4}, Haar prediction {:.4}", dim / (dim + 1.0) * d * d);
    for ens in [
        StateEnsemble::StabilizerProduct,
        StateEnsemble::HaarProductK(1),
        StateEnsemble::HaarGlobal,
        StateEnsemble::BrickworkScrambled(2),
    ] {
        let r = expected_risk_mc(&u, &v, ens, 4000, 1)?;
        println!("{ens:?}: {:.4} ± {:.4}", r.mean, r.std_error);
    }
    Ok(())
}
