mod common;

use std::f64::consts::PI;

use entlab::cli::csv::fmt_num;
use entlab::control::singlet_mix;
use entlab::entangle::{concurrence, concurrence_x, kappa_of, state_concurrence, XState};
use entlab::qmat::{coherence_to_rho, rho_to_coherence, tensor2, ComplexMat4, Mat2, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn local_unitary(a: f64, b: f64, c: f64) -> Mat2 {
    let (s, co) = a.sin_cos();
    Mat2::new([
        [C64::from_polar(co, b), C64::from_polar(s, c)],
        [-C64::from_polar(s, -c), C64::from_polar(co, -b)],
    ])
}

fn x_state() -> impl Strategy<Value = XState> {
    (
        proptest::array::uniform4(0.01f64..1.0),
        0.0f64..0.999,
        -PI..PI,
        0.0f64..0.999,
        -PI..PI,
    )
        .prop_map(|(p, sw, pw, sz, pz)| {
            let s: f64 = p.iter().sum();
            let [a, b, c, d] = p.map(|x| x / s);
            let w = C64::from_polar(sw * (a * d).sqrt(), pw);
            let z = C64::from_polar(sz * (b * c).sqrt(), pz);
            XState::new(a, b, c, d, w, z).unwrap()
        })
}

proptest! {
    #[test]
    fn csv_numbers_roundtrip(x in prop::num::f64::NORMAL) {
        let y: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((x - y).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn concurrence_is_in_unit_interval(seed in any::<u64>()) {
        let rho = common::random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let c = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(
        x in x_state(),
        u in (-PI..PI, -PI..PI, -PI..PI),
        v in (-PI..PI, -PI..PI, -PI..PI),
    ) {
        let rho = x.to_density();
        let l = tensor2(&local_unitary(u.0, u.1, u.2), &local_unitary(v.0, v.1, v.2));
        let rotated = entlab::qmat::DensityMatrix::new(l * *rho.mat() * l.adjoint()).unwrap();
        prop_assert!((concurrence(&rotated).unwrap() - concurrence_x(&x)).abs() < 1e-7);
    }

    #[test]
    fn x_state_path_matches_general(x in x_state()) {
        let rho = x.to_density();
        prop_assert!((state_concurrence(&rho).unwrap() - concurrence(&rho).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn coherence_vector_roundtrip(seed in any::<u64>()) {
        let rho = common::random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let back = coherence_to_rho(&rho_to_coherence(&rho).unwrap());
        prop_assert!((*rho.mat() - *back.mat()).max_abs() < 1e-14);
    }

    #[test]
    fn kappa_is_a_probability(seed in any::<u64>()) {
        let rho = common::random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let k = kappa_of(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&k));
    }

    #[test]
    fn singlet_mix_has_requested_kappa(k in 0.0f64..=1.0) {
        prop_assert!((kappa_of(&singlet_mix(k).unwrap()).unwrap() - k).abs() < 1e-14);
    }

    #[test]
    fn x_state_roundtrip(x in x_state()) {
        let back = XState::from_matrix(&x.to_matrix()).unwrap();
        prop_assert_eq!(back, x);
        prop_assert_eq!(ComplexMat4::from_row_major(&x.to_matrix().to_row_major()), x.to_matrix());
    }
}
