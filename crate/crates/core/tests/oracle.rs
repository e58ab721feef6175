use pipoor_core::finite::{
    enumerate_subgroups, hom_extends, hom_extends_exhaustive, hom_extends_snf, is_pure_split_finite,
    is_pure_subgroup, is_relatively_injective, is_relatively_pure_injective, localization_hom_image,
    parse_finite_group, quotient, smith_normal_form, snf::rational_rank, Element, FiniteAbelianGroup, IntMatrix,
};
use pipoor_core::sample::random_finite_group;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cyclic(q: u64) -> FiniteAbelianGroup {
    FiniteAbelianGroup::cyclic(q).unwrap()
}

#[test]
fn relative_injectivity_table() {
    for p in [2u64, 3, 5] {
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                let verdict = is_relatively_injective(&cyclic(p.pow(m)), &cyclic(p.pow(n)), 512).unwrap();
                assert_eq!(verdict, m >= n, "p={p} m={m} n={n}");
            }
        }
    }
}

#[test]
fn zp_obstruction() {
    for p in [2u64, 3, 5] {
        let mut n = 2;
        while p.pow(n) <= 512 {
            assert!(!is_relatively_injective(&cyclic(p), &cyclic(p.pow(n)), 512).unwrap());
            n += 1;
        }
    }
}

#[test]
fn pure_injectivity_is_inherited() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let m = random_finite_group(&mut rng, 32);
        let n = random_finite_group(&mut rng, 64);
        assert!(is_relatively_pure_injective(&m, &n, 512).unwrap());
        assert!(is_pure_split_finite(&n, 512).unwrap());
        for k in enumerate_subgroups(&n, 512).unwrap() {
            if !is_pure_subgroup(&k, &n).unwrap() {
                continue;
            }
            let basis = k.basis().unwrap();
            assert!(is_relatively_pure_injective(&m, &basis.group, 512).unwrap());
            assert!(is_relatively_pure_injective(&m, &quotient(&n, &k).unwrap(), 512).unwrap());
        }
    }
}

#[test]
fn finite_oracle_parses_both_notations() {
    assert_eq!(parse_finite_group("Z4 x Z2").unwrap(), parse_finite_group("Z(2^2) x Z(2)").unwrap());
}

fn random_element(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> Element {
    Element::new(g.factors().iter().map(|&m| rng.random_range(0..m)).collect())
}

#[test]
fn hom_routes_agree_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let g = random_finite_group(&mut rng, 64);
        let m = random_finite_group(&mut rng, 64);
        let gens: Vec<Element> = (0..rng.random_range(0..3)).map(|_| random_element(&mut rng, &g)).collect();
        // arbitrary images: some extend, some do not, some are ill-defined
        let images: Vec<Element> = gens.iter().map(|_| random_element(&mut rng, &m)).collect();
        match (hom_extends_snf(&g, &m, &gens, &images), hom_extends_exhaustive(&g, &m, &gens, &images)) {
            (Ok(a), Ok(b)) => assert_eq!(a, b, "{g} -> {m}"),
            (Err(a), Err(b)) => assert_eq!(a, b),
            other => panic!("routes disagree on validity: {other:?}"),
        }
        let _ = hom_extends(&g, &m, &gens, &images);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_additivity(rows in prop::collection::vec(prop::collection::vec(-6i64..6, 3), 0..5)) {
        // H = column span of A inside Z^3; rank(H) + rank(Z^3 / H) = 3
        let r = 3;
        let a = if rows.is_empty() { IntMatrix::zeros(r, 0) } else {
            let mut t = IntMatrix::zeros(r, rows.len());
            for (j, col) in rows.iter().enumerate() {
                for i in 0..r { t[(i, j)] = col[i]; }
            }
            t
        };
        let h_rank = rational_rank(&a).unwrap();
        let smith = smith_normal_form(&a).unwrap();
        let free_cokernel = r - smith.rank();
        prop_assert_eq!(h_rank + free_cokernel, r);
    }

    #[test]
    fn localization_is_additive_and_lands_in_cyclic_span(
        p_idx in 0usize..3, e in 1u32..4, b1 in -50i64..50, b2 in -50i64..50, c in 1i64..200, seed in any::<u64>()
    ) {
        let p = [2u64, 3, 5][p_idx];
        let c = if c % p as i64 == 0 { c + 1 } else { c };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = FiniteAbelianGroup::new(vec![p.pow(e), p]).unwrap();
        let a = random_element(&mut rng, &m);
        let f = |b| localization_hom_image(&m, &a, b, c).unwrap();
        prop_assert_eq!(m.add(&f(b1), &f(b2)), f(b1 + b2));
        // b/c = (b k)/(c k) for any k coprime to p
        prop_assert_eq!(localization_hom_image(&m, &a, b1 * 7, c * 7).unwrap(), f(b1));
        // c * f(b/c) = f(b) = b a
        prop_assert_eq!(m.scale(c, &f(b1)), m.scale(b1, &a));
        let span: Vec<Element> = (0..m.order_of(&a) as i64).map(|t| m.scale(t, &a)).collect();
        prop_assert!(span.contains(&f(b1)));
    }
}
