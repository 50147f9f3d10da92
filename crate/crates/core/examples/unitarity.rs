//! Unitarity of a few channels and where the purity bounds land.
use qsq::metrics::{
    choi_matrix, general_sandwich_check, purity_unitarity_sandwich_check, unitarity, unitarity_closed_form,
    KrausChannel,
};
use qsq::rng::rng_from_seed;

fn main() -> qsq::Result<()> {
    let mut rng = rng_from_seed(6);
    let channels = [
        ("depolarizing 0.3", KrausChannel::depolarizing(1, 0.3)?),
        ("amplitude damping 1", KrausChannel::amplitude_damping(1.0)?),
        ("mixed unitary", KrausChannel::random_mixed_unitary(2, 3, &mut rng)?),
        ("stinespring", KrausChannel::random_stinespring(2, 2, &mut rng)?),
    ];
    for (name, ch) in &channels {
        let stated = purity_unitarity_sandwich_check(ch);
        let general = general_sandwich_check(ch);
        println!(
            "{name:<20} u={:.4} closed={:.4} purity={:.4} unital bound {} general bound {}",
            unitarity(ch),
            unitarity_closed_form(ch),
            choi_matrix(ch).purity(),
            stated.holds,
            general.holds
        );
    }
    Ok(())
}
