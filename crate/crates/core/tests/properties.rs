use proptest::prelude::*;
use qsq::metrics::{choi_distance, expected_risk_mc, unitarity, unitarity_closed_form, KrausChannel, StateEnsemble};
use qsq::oracle::{expectation_exact, Observable};
use qsq::oracle_maps::{bitflip_unitary, phase_unitary, BooleanFunction};
use qsq::pauli::{PauliPrefix, PauliSet, PauliString};
use qsq::rng::rng_from_seed;
use qsq::state::{
    bell_coefficients, choi_of_unitary, haar_random_state, haar_random_unitary, inverse_bell_transform, DenseOperator,
};
use qsq::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bell_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let v = haar_random_state(2 * n, &mut rng_from_seed(seed));
        let back = inverse_bell_transform(&bell_coefficients(v.amplitudes(), n), n);
        for (a, b) in v.amplitudes().iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn choi_of_products_is_normalized(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let u = haar_random_unitary(n, &mut rng);
        let v = haar_random_unitary(n, &mut rng);
        let w = &u * &v;
        let norm: f64 = choi_of_unitary(&w).unwrap().bell_coefficients().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert_eq!(choi_distance(&w, &w).unwrap(), 0.0);
    }

    #[test]
    fn distance_is_a_phase_quotient_metric(seed in any::<u64>(), phase in 0.0f64..6.3) {
        let mut rng = rng_from_seed(seed);
        let [a, b, c] = [0, 1, 2].map(|_| haar_random_unitary(2, &mut rng));
        let ab = choi_distance(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - choi_distance(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!(ab <= choi_distance(&a, &c).unwrap() + choi_distance(&c, &b).unwrap() + 1e-12);
        prop_assert_eq!(choi_distance(&a, &a.scale(C64::from_polar(1.0, phase))).unwrap(), 0.0);
        prop_assert!(ab > 1e-6);
    }

    #[test]
    fn subset_mass_is_additive_over_prefix_children(seed in any::<u64>(), letters in prop::collection::vec(0u64..4, 0..3)) {
        let u = haar_random_unitary(3, &mut rng_from_seed(seed));
        let state = choi_of_unitary(&u).unwrap().into_state().into();
        let prefix = PauliPrefix::new(3, letters.iter().map(|&l| qsq::pauli::Pauli::from_bits(l)).collect()).unwrap();
        let whole = expectation_exact(&state, &Observable::SubsetMass(PauliSet::Prefix(prefix.clone()))).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&whole));
        let parts: f64 = qsq::pauli::Pauli::ALL
            .iter()
            .map(|&l| expectation_exact(&state, &Observable::SubsetMass(PauliSet::Prefix(prefix.extend(l)))).unwrap())
            .sum();
        prop_assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn classical_oracles(seed in any::<u64>(), n in 1usize..=3) {
        let f = BooleanFunction::random(n, &mut rng_from_seed(seed));
        let u = bitflip_unitary(&f).unwrap();
        prop_assert_eq!(&u * &u, DenseOperator::identity(n + 1));
        let v = phase_unitary(&f).unwrap();
        prop_assert!(v.is_hermitian(0.0) && v.is_unitary(1e-15));
    }

    #[test]
    fn unitarity_paths_agree(seed in any::<u64>(), env in 1usize..=3) {
        let ch = KrausChannel::random_stinespring(2, env, &mut rng_from_seed(seed)).unwrap();
        let u = unitarity(&ch);
        prop_assert!((u - unitarity_closed_form(&ch)).abs() < 1e-9);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&u));
    }
}

#[test]
fn pauli_choi_states_are_orthonormal() {
    for n in 1..=3 {
        let states: Vec<_> = PauliString::all(n).map(|p| qsq::state::pauli_choi_state(&p).into_state()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).norm() - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn stabilizer_product_is_locally_scrambled() {
    let mut rng = rng_from_seed(9);
    let n = 2;
    let u = haar_random_unitary(n, &mut rng);
    let v = haar_random_unitary(n, &mut rng);
    let local = haar_random_unitary(1, &mut rng).kron(&haar_random_unitary(1, &mut rng));
    let base = expected_risk_mc(&u, &v, StateEnsemble::StabilizerProduct, 4000, 1).unwrap();
    let rotated = expected_risk_mc(&(&u * &local), &(&v * &local), StateEnsemble::StabilizerProduct, 4000, 2).unwrap();
    let band = 3.0 * (base.std_error.powi(2) + rotated.std_error.powi(2)).sqrt();
    assert!((base.mean - rotated.mean).abs() <= band, "{base:?} {rotated:?}");
}
