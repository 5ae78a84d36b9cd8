mod common;

use common::*;
use groupoid_logic::{
    convolve, counting_haar, custom_haar, decoherence, normalized_haar, set_product, FiniteGroupoid, GroupoidFunction,
    MorphismId, MorphismSet, ObjectSet,
};
use proptest::prelude::*;

fn fixture(i: usize) -> FiniteGroupoid {
    let all = small_fixtures();
    all[i % all.len()].1.clone()
}

fn morphisms(g: &FiniteGroupoid, bits: &[bool]) -> MorphismSet {
    MorphismSet::from_ids(g, g.morphisms().filter(|m| bits[m.0 % bits.len()]))
}

proptest! {
    #[test]
    fn product_distributes_over_unions(i in 0usize..64, a in prop::collection::vec(any::<bool>(), 36),
                                       b in prop::collection::vec(any::<bool>(), 36),
                                       c in prop::collection::vec(any::<bool>(), 36)) {
        let g = fixture(i);
        let (a, b, c) = (morphisms(&g, &a), morphisms(&g, &b), morphisms(&g, &c));
        let left = set_product(&g, &a, &(&b | &c)).unwrap();
        let right = &set_product(&g, &a, &b).unwrap() | &set_product(&g, &a, &c).unwrap();
        prop_assert_eq!(left, right);
        let left = set_product(&g, &(&a | &b), &c).unwrap();
        let right = &set_product(&g, &a, &c).unwrap() | &set_product(&g, &b, &c).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inversion_reverses_products(i in 0usize..64, a in prop::collection::vec(any::<bool>(), 36),
                                   b in prop::collection::vec(any::<bool>(), 36)) {
        let g = fixture(i);
        let (a, b) = (morphisms(&g, &a), morphisms(&g, &b));
        let lhs = set_product(&g, &a, &b).unwrap().inverted(&g);
        let rhs = set_product(&g, &b.inverted(&g), &a.inverted(&g)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_is_associative(i in 0usize..64, a in prop::collection::vec(any::<bool>(), 36),
                              b in prop::collection::vec(any::<bool>(), 36),
                              c in prop::collection::vec(any::<bool>(), 36)) {
        let g = fixture(i);
        let (a, b, c) = (morphisms(&g, &a), morphisms(&g, &b), morphisms(&g, &c));
        let left = set_product(&g, &set_product(&g, &a, &b).unwrap(), &c).unwrap();
        let right = set_product(&g, &a, &set_product(&g, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn disintegration(i in 0usize..64, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 36)) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = fixture(i);
        let lambda = random_lambda_with_zeros(&mut rng, g.num_objects());
        let set = morphisms(&g, &bits);
        for mg in [counting_haar(g.clone(), lambda.clone()).unwrap(), normalized_haar(g.clone(), lambda).unwrap()] {
            let direct: f64 = set.iter().map(|m| mg.mu(m)).sum();
            prop_assert!((mg.measure(&set) - direct).abs() < 1e-12);
            prop_assert!((mg.disintegrated_measure(&set) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn phased_functional_is_hermitian(i in 0usize..64, seed in any::<u64>(), a in 0u64..64, b in 0u64..64) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = fixture(i);
        let n = g.num_objects();
        let mg = normalized_haar(g.clone(), random_lambda(&mut rng, n)).unwrap();
        let p = groupoid_logic::phase_from_potential(&g, &random_potential(&mut rng, n)).unwrap();
        let mask = (1u64 << n) - 1;
        let (sa, sb) = (ObjectSet::from_mask(&g, a & mask), ObjectSet::from_mask(&g, b & mask));
        let ab = decoherence(&mg, &sa, &sb, Some(&p)).unwrap();
        let ba = decoherence(&mg, &sb, &sa, Some(&p)).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }
}

#[test]
fn convolution_is_not_commutative() {
    let mg = normalized_haar(pair(2), vec![0.5, 0.5]).unwrap();
    let g = mg.groupoid();
    let m = |l: &str| g.morphism_by_label(l).unwrap();
    let (f, h) = (GroupoidFunction::delta(g, m("(2,1)")), GroupoidFunction::delta(g, m("(1,2)")));
    assert_ne!(convolve(&mg, &f, &h).unwrap(), convolve(&mg, &h, &f).unwrap());
}

#[test]
fn set_product_is_not_commutative() {
    let g = pair(2);
    let a = MorphismSet::from_ids(&g, [g.morphism_by_label("(2,1)").unwrap()]);
    let b = MorphismSet::from_ids(&g, [g.morphism_by_label("(1,2)").unwrap()]);
    assert_ne!(set_product(&g, &a, &b).unwrap(), set_product(&g, &b, &a).unwrap());
}

#[test]
fn left_translation_is_a_bijection_on_fibers() {
    for (name, g) in fixtures_to_64() {
        for alpha in g.morphisms() {
            assert!(g.left_translation_is_bijection(alpha), "{name}");
        }
        for o in g.orbits() {
            let sizes: Vec<usize> = o.iter().map(|&j| g.with_target(j).len()).collect();
            assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{name}");
        }
        assert!(g.validate().is_valid(), "{name}");
    }
}

#[test]
fn custom_haar_matches_counting_for_unit_weights() {
    let g = union(&[pair(3), z(2)]);
    let lambda = vec![0.1, 0.2, 0.3, 0.4];
    let a = custom_haar(g.clone(), lambda.clone(), vec![1.0; g.num_morphisms()]).unwrap();
    let b = counting_haar(g.clone(), lambda).unwrap();
    for m in g.morphisms() {
        assert_eq!(a.mu(m), b.mu(m));
    }
    let _ = MorphismId(0);
}
