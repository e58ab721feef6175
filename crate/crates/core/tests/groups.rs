mod common;

use common::{group, random_group};
use pipoor_core::sample::{random_descriptor, DescriptorShape};
use pipoor_core::{canonicalize, Characteristic, Height, Multiplicity, Rank, UniformAtom};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn canonicalize_merges_atoms() {
    let g = group("Z(2^1) + Z(2^1)");
    assert_eq!(
        g.atoms(),
        vec![(UniformAtom::Cyclic { p: 2, n: 1 }, Multiplicity::Finite(2))]
    );
    let g = group("Z(2^1)^omega + Z(2^1)^3");
    assert_eq!(g.atoms(), vec![(UniformAtom::Cyclic { p: 2, n: 1 }, Multiplicity::Omega)]);
    let g = group("Z + R(0; 2:3)");
    assert_eq!(
        g.atoms(),
        vec![(UniformAtom::Rational(Characteristic::integers()), Multiplicity::Finite(2))]
    );
}

#[test]
fn torsion_part_examples() {
    assert_eq!(group("Z + Z(2^2)").torsion_part(), group("Z(2^2)"));
    assert_eq!(group("sum{p}[Z(p^1)] + Q").torsion_part(), group("sum{p}[Z(p^1)]"));
    assert!(group("Q + Z").torsion_part().is_zero());
}

#[test]
fn p_primary_examples() {
    assert_eq!(group("sum{p}[Z(p^1)]").p_primary(5), group("Z(5^1)"));
    assert_eq!(group("sum{p}[tower(p)]").p_primary(2), group("tower(2)"));
    assert!(group("Z + Z(3^2)").p_primary(2).is_zero());
    assert!(group("sum{p}[Z(p^1)]\\{5}").p_primary(5).is_zero());
}

#[test]
fn divisible_and_reduced_examples() {
    let g = group("Z(2^inf) + Z(2^2)");
    assert_eq!(g.divisible_part(), group("Z(2^inf)"));
    assert_eq!(g.reduced_part(), group("Z(2^2)"));
    let local = group("Q_(2)");
    assert!(local.divisible_part().is_zero());
    assert_eq!(local.reduced_part(), local);
    let q = group("Q^omega");
    assert_eq!(q.divisible_part(), q);
    assert!(q.reduced_part().is_zero());
}

#[test]
fn boundedness_examples() {
    assert!(group("Z(2^1)^omega + Z(2^3)").is_bounded());
    assert!(!group("sum{p}[Z(p^1)]").is_bounded());
    assert!(!group("tower(2)").is_bounded());
    assert!(!group("Z(2^inf)").is_bounded());
    assert!(!group("Z + Z(2^1)").is_bounded());
}

#[test]
fn rank_examples() {
    assert_eq!(group("Z + Z + Z(2^2)").torsion_free_rank(), Rank::Finite(2));
    assert_eq!(group("Q^omega").torsion_free_rank(), Rank::Omega);
    assert_eq!(group("sum{p}[Z(p^1)]").torsion_free_rank(), Rank::Finite(0));
}

#[test]
fn predicate_examples() {
    let p = group("sum{p}[Z(p^1)]").structural_predicates();
    assert!(p.is_torsion && !p.is_torsion_free && !p.is_divisible && p.is_reduced && p.is_semisimple);
    assert!(!group("Z(2^2)").structural_predicates().is_semisimple);
    let q = group("Q").structural_predicates();
    assert!(q.is_torsion_free && q.is_divisible && !q.is_semisimple);
}

#[test]
fn sum_and_isomorphism_examples() {
    assert!(group("Z(2^1)").direct_sum(&group("Z(2^1)^omega")).is_isomorphic(&group("Z(2^1)^omega")));
    assert!(!group("Z(2^1) + Z(2^2)").is_isomorphic(&group("Z(2^3)")));
    assert!(group("Z").is_isomorphic(&group("R(0; 3:5)")));
    assert!(!group("Z").is_isomorphic(&group("Q_(3)")));
}

#[test]
fn localization_height() {
    let chi = Characteristic::localization(3).unwrap();
    assert_eq!(chi.default_height(), Height::Infinite);
    assert_eq!(chi.height_at(3), Height::Finite(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_descriptor(&mut rng, &DescriptorShape::default());
        let g = canonicalize(&d).unwrap();
        let again = canonicalize(&pipoor_core::parse(&g.to_string()).unwrap()).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn torsion_and_torsion_free_split(seed in any::<u64>()) {
        let g = random_group(seed);
        prop_assert_eq!(g.torsion_part().direct_sum(&g.torsion_free_summand()), g);
    }

    #[test]
    fn primary_parts_of_torsion_part(seed in any::<u64>()) {
        let g = random_group(seed);
        let t = g.torsion_part();
        for p in pipoor_core::primes::primes_up_to(50) {
            prop_assert_eq!(t.p_primary(p), g.p_primary(p));
        }
    }

    #[test]
    fn divisible_reduced_split(seed in any::<u64>()) {
        let g = random_group(seed);
        let (d, r) = (g.divisible_part(), g.reduced_part());
        prop_assert!(d.reduced_part().is_zero());
        prop_assert!(r.divisible_part().is_zero());
        prop_assert_eq!(r.direct_sum(&d), g);
    }

    #[test]
    fn rank_is_additive(a in any::<u64>(), b in any::<u64>()) {
        let (g, h) = (random_group(a), random_group(b));
        prop_assert_eq!(g.direct_sum(&h).torsion_free_rank(), g.torsion_free_rank() + h.torsion_free_rank());
    }

    #[test]
    fn direct_sum_laws(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (g, h, k) = (random_group(a), random_group(b), random_group(c));
        prop_assert_eq!(g.direct_sum(&h), h.direct_sum(&g));
        prop_assert_eq!(g.direct_sum(&h).direct_sum(&k), g.direct_sum(&h.direct_sum(&k)));
    }

    #[test]
    fn semisimple_implies_bounded_primary(seed in any::<u64>()) {
        let g = random_group(seed);
        if g.structural_predicates().is_semisimple {
            for p in pipoor_core::primes::primes_up_to(50) {
                prop_assert!(g.p_primary(p).is_bounded());
            }
        }
    }

    #[test]
    fn predicates_match_parts(seed in any::<u64>()) {
        let g = random_group(seed);
        let flags = g.structural_predicates();
        prop_assert_eq!(flags.is_reduced, g.divisible_part().is_zero());
        prop_assert_eq!(flags.is_divisible, g.reduced_part().is_zero());
        prop_assert_eq!(flags.is_torsion, g.torsion_free_rank() == Rank::Finite(0));
    }

    #[test]
    fn homogeneity_ignores_order_and_duplication(seed in any::<u64>()) {
        let tf = random_group(seed).torsion_free_summand();
        let doubled = tf.direct_sum(&tf);
        prop_assert_eq!(
            pipoor_core::is_homogeneous(&tf).unwrap(),
            pipoor_core::is_homogeneous(&doubled).unwrap()
        );
    }
}
