mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_box_search(seed in any::<u64>(), rank in 1usize..=4, bound in 0i64..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_definite(&mut rng, rank);
        prop_assert_eq!(check_enumeration(&g, bound), Ok(()));
    }

    #[test]
    fn overlattices_round_trip(seed in any::<u64>(), rank in 1usize..=3, scale in 1i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_even(&mut rng, rank, scale);
        prop_assert_eq!(check_overlattice_round_trip(&g, 16), Ok(()));
    }

    #[test]
    fn milgram_formula(seed in any::<u64>(), rank in 1usize..=5, scale in 1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_even(&mut rng, rank, scale);
        prop_assert_eq!(check_milgram(&g), Ok(()));
    }

    #[test]
    fn gauss_reduction_is_a_class_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng);
        let m = random_sl2(&mut rng);
        prop_assert_eq!(check_gauss(&f, &m), Ok(()));
    }

    #[test]
    fn certificate_ignores_labels(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let p = random_perm(&mut rng, n);
        prop_assert_eq!(check_certificate(&g, &p), Ok(()));
    }
}
