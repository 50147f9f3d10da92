//! Bell sampling view of a unitary: Pauli weights of its Choi state.
use qsq::pauli::pauli_matrix;
use qsq::rng::rng_from_seed;
use qsq::state::{choi_of_unitary, random_brickwork_circuit};

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(7);
    let u = random_brickwork_circuit(2, 1, &mut rng)?.compile();
    let choi = choi_of_unitary(&u)?;
    let mut total = 0.0;
    for (p, c) in choi.pauli_expansion(1e-3).iter() {
        // Cross-check against Tr(P U) / 2^n.
        let direct = (&pauli_matrix(p)? * &u).matrix().trace() / 4.0;
        println!("{p}  |c|^2 = {:.4}  direct = {:.4}", c.norm_sqr(), direct.norm_sqr());
        total += c.norm_sqr();
    }
    println!("retained mass {total:.6}");
    Ok(())
}
