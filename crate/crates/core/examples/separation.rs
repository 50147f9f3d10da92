//! Classical reductions: lifted and compressed observables, the quadratic-form gap,
//! and the variance of a probe over random phase oracles.
use qsq::oracle_maps::{
    default_variance_probe, lift_identity_sides, separation_bound, separation_gap, validate_compress, variance_probe,
    BooleanFunction,
};
use qsq::pauli::pauli_matrix;
use qsq::rng::rng_from_seed;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(8);
    let f = BooleanFunction::random(2, &mut rng);
    let (lhs, rhs) = lift_identity_sides(&f, &pauli_matrix(&"ZIZ".parse()?)?)?;
    println!("lift: {lhs:.6} vs {rhs:.6}");

    let c = [0.5, -0.25, 0.125, 1.0];
    let fns: Vec<_> = (0..4).map(|_| BooleanFunction::random(2, &mut rng)).collect();
    for check in validate_compress(&c, &fns)? {
        println!("compress {:?}: max deviation {:.2e}", check.convention, check.max_deviation);
    }

    for n in 2..=3 {
        let gap = separation_gap(n)?;
        println!("n={n}: gap {:.4} over {} forms (bound {:.4})", gap.gap, gap.forms, separation_bound());
    }
    for n in 2..=4 {
        let v = variance_probe(n, &default_variance_probe(n)?, 4000, 1)?;
        println!("n={n}: variance {:.6} ± {:.6}", v.variance, v.std_error);
    }
    Ok(())
}
