//! Structural invariants of maps, Möbius groups, deck groups and detection,
//! checked on random samples.

use deckmap::algebra::{ComplexPoly, GaussianRational};
use deckmap::deck::deck_group;
use deckmap::detect::{all_critical_fibers, cross_ratio, mobius_factor, shared_iterate_analysis};
use deckmap::mobius::{group_closure_mixed, IsoType, MobiusGroup, MobiusTransform, ELEMENT_TOL};
use deckmap::ratmap::{critical_data, degree_partition, fiber, local_degree, same_set, Mode, Point, RationalMap, SpherePoint};
use deckmap::sample;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn gaussian(rng: &mut StdRng) -> GaussianRational {
    let mut z = sample::rational(rng, 9);
    z += &(sample::rational(rng, 9) * GaussianRational::i());
    z
}

fn quadratic_or_cubic(rng: &mut StdRng) -> RationalMap {
    if rng.gen_bool(0.5) {
        sample::quadratic(rng)
    } else {
        sample::bicritical_cubic(rng)
    }
}

fn power(d: usize) -> RationalMap {
    let mut num = vec![0; d + 1];
    num[d] = 1;
    RationalMap::from_ints(&num, &[1]).unwrap()
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

fn lagrange(g: &MobiusGroup) -> bool {
    g.orders.iter().all(|o| g.order() % o == 0)
}

/// Elements of order at least 3 in a cyclic group all fix the same pair.
fn cyclic_axis_shared(g: &MobiusGroup) -> bool {
    if !matches!(g.iso_type, IsoType::Cyclic(n) if n >= 3) {
        return true;
    }
    let axes: Vec<Vec<Point>> = (0..g.order())
        .filter(|&i| g.orders[i] >= 3)
        .map(|i| g.elements[i].fixed_points().unwrap())
        .collect();
    axes.windows(2).all(|w| same_set(&w[0], &w[1], 1e-7))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn composition_multiplies_degrees(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = quadratic_or_cubic(&mut r);
        let g = quadratic_or_cubic(&mut r);
        prop_assert_eq!(f.compose(&g).degree(), f.degree() * g.degree());
    }

    #[test]
    fn scaling_entries_changes_nothing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = sample::mobius(&mut r);
        let s = sample::mobius(&mut r);
        let lambda = sample::nonzero_rational(&mut r, 9) * GaussianRational::i();
        let scaled: Vec<GaussianRational> = t.entries().iter().map(|e| {
            let mut x = (*e).clone();
            x *= &lambda;
            x
        }).collect();
        let u = MobiusTransform::new(scaled[0].clone(), scaled[1].clone(), scaled[2].clone(), scaled[3].clone()).unwrap();
        prop_assert_eq!(&u, &t);
        prop_assert_eq!(u.compose(&s), t.compose(&s));
        prop_assert_eq!(s.compose(&u), s.compose(&t));
    }

    #[test]
    fn fixed_points_are_fixed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = sample::mobius(&mut r);
        prop_assume!(!t.is_identity());
        let fp = t.fixed_points().unwrap();
        prop_assert!(fp.len() == 1 || fp.len() == 2);
        for p in &fp {
            let img = t.apply_point(p);
            match p {
                Point::Exact(_) => prop_assert_eq!(&img, p),
                Point::Numeric(_) => prop_assert!(img.same(p, 1e-9)),
            }
        }
    }

    #[test]
    fn cross_ratio_is_mobius_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts: Vec<SpherePoint> = (0..4).map(|_| SpherePoint::Finite(gaussian(&mut r))).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                prop_assume!(pts[i] != pts[j]);
            }
        }
        let phi = sample::mobius(&mut r);
        let p: Vec<Point> = pts.iter().cloned().map(Point::Exact).collect();
        let q: Vec<Point> = pts.iter().map(|z| Point::Exact(phi.apply(z))).collect();
        let before = cross_ratio(&p[0], &p[1], &p[2], &p[3]).unwrap();
        let after = cross_ratio(&q[0], &q[1], &q[2], &q[3]).unwrap();
        prop_assert!(before.is_exact());
        prop_assert_eq!(before, after);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fibers_have_full_weight(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = quadratic_or_cubic(&mut r);
        for _ in 0..20 {
            let w = SpherePoint::Finite(gaussian(&mut r));
            let total: usize = fiber(&f, &w, Mode::Numeric).unwrap().iter().map(|(_, m)| m).sum();
            prop_assert_eq!(total, f.degree());
        }
    }

    #[test]
    fn degree_partition_identity(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = rng(seed);
        let f = quadratic_or_cubic(&mut r);
        let d = f.degree();
        for _ in 0..10 {
            let z = SpherePoint::Finite(gaussian(&mut r));
            let p = degree_partition(&f, k, &z).unwrap();
            prop_assert_eq!(p.weighted_total(), d.pow(k as u32));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn deck_elements_preserve_fibers_and_local_degrees(seed in any::<u64>(), k in 1usize..=2) {
        let mut r = rng(seed);
        let f = quadratic_or_cubic(&mut r);
        let big_f = f.iterate(k).unwrap();
        let g = deck_group(&f, k, 53).unwrap().group;
        let crit = critical_data(&big_f, Mode::Exact).unwrap();
        for _ in 0..5 {
            let w = SpherePoint::Finite(gaussian(&mut r));
            let fib = fiber(&big_f, &w, Mode::Numeric).unwrap();
            let pts: Vec<Point> = fib.iter().map(|(p, _)| p.clone()).collect();
            for e in &g.elements {
                let img: Vec<Point> = pts.iter().map(|p| e.apply(p)).collect();
                prop_assert!(same_set(&img, &pts, 1e-7));
                for (p, m) in &fib {
                    prop_assert_eq!(local_degree(&big_f, &e.apply(p)).unwrap(), *m);
                }
            }
        }
        for e in &g.elements {
            for (c, m) in &crit.points {
                prop_assert_eq!(local_degree(&big_f, &e.apply(c)).unwrap(), m + 1);
            }
        }
    }

    #[test]
    fn bicritical_decks_are_cyclic_or_dihedral(seed in any::<u64>(), d in 2usize..=4, k in 1usize..=2) {
        let mut r = rng(seed);
        let f = sample::bicritical(&mut r, d);
        let g = deck_group(&f, k, 53).unwrap().group;
        prop_assert!(!g.iso_type.is_polyhedral());
        prop_assert!(matches!(g.iso_type, IsoType::Cyclic(_) | IsoType::Dihedral(_) | IsoType::V4));
        if d % 2 == 1 {
            prop_assert!(matches!(g.iso_type, IsoType::Cyclic(_)), "{}", g.iso_type);
        }
        for &o in &g.orders {
            prop_assert!(!is_prime(o) || d % o == 0, "order {} in degree {}", o, d);
        }
        prop_assert!(lagrange(&g));
        prop_assert!(cyclic_axis_shared(&g));
    }

    #[test]
    fn deck_groups_grow_along_iterates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::quadratic(&mut r);
        let base = deck_group(&f, 1, 53).unwrap().group;
        for k in 2..=3 {
            let g = deck_group(&f, k, 53).unwrap().group;
            for e in &base.elements {
                prop_assert!(g.position(e).is_some(), "missing at k = {}", k);
                if let Some(t) = &e.exact {
                    prop_assert!(g.contains_exact(t));
                }
            }
        }
    }

    #[test]
    fn deck_type_is_conjugation_invariant(seed in any::<u64>(), k in 1usize..=2) {
        let mut r = rng(seed);
        let f = quadratic_or_cubic(&mut r);
        let phi = sample::mobius(&mut r);
        let conj = phi.inverse().to_map().compose(&f.compose(&phi.to_map()));
        let a = deck_group(&f, k, 53).unwrap().group;
        let b = deck_group(&conj, k, 53).unwrap().group;
        prop_assert_eq!(a.iso_type, b.iso_type);
    }

    #[test]
    fn v4_at_level_two_iff_coalescing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = if r.gen_bool(0.5) { sample::coalescing_quadratic(&mut r) } else { sample::quadratic(&mut r) };
        let cd = critical_data(&f, Mode::Exact).unwrap();
        prop_assume!(!cd.is_power_map());
        let v4 = deck_group(&f, 2, 53).unwrap().group.iso_type == IsoType::V4;
        prop_assert_eq!(v4, cd.critically_coalescing == Some(true));
        // V4 at any level up to three forces V4 at level two
        let v4_at_3 = deck_group(&f, 3, 53).unwrap().group.iso_type == IsoType::V4;
        if v4_at_3 {
            prop_assert!(v4);
        }
    }

    #[test]
    fn coalescing_family_stays_klein(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::fa_parameter(&mut r);
        let f = sample::fa(&a);
        for k in 2..=3 {
            prop_assert_eq!(deck_group(&f, k, 53).unwrap().group.iso_type, IsoType::V4);
        }
    }

    #[test]
    fn fully_critical_fibers_of_coalescing_second_iterate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::coalescing_quadratic(&mut r);
        let cd = critical_data(&f, Mode::Exact).unwrap();
        prop_assert!(cd.exact);
        let mut expected = cd.value_set();
        expected.push(f.eval_point(&expected[0], 53));
        let found = all_critical_fibers(&f.iterate(2).unwrap()).unwrap();
        prop_assert!(found.iter().all(Point::is_exact));
        prop_assert!(same_set(&found, &expected, 0.0), "{:?} vs {:?}", found, expected);
    }

    #[test]
    fn symmetric_pairs_share_the_second_iterate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = sample::nonzero_rational(&mut r, 9);
        let rep = shared_iterate_analysis(&sample::sigma2(&c), &sample::sigma2(&-&c), 4).unwrap();
        prop_assert_eq!(rep.minimal_k, Some(2));
        prop_assert!(rep.second_iterate_equal);
        prop_assert!(rep.cv_cp_agree);
    }

    #[test]
    fn shared_iterates_force_matching_critical_data(seed in any::<u64>()) {
        let mut r = rng(seed);
        // an odd quadratic and its negative share the second iterate
        let a = sample::nonzero_rational(&mut r, 9);
        let b = sample::nonzero_rational(&mut r, 9) * GaussianRational::i();
        let zero = GaussianRational::from(0);
        let f = RationalMap::new(
            ComplexPoly::new(vec![b, zero.clone(), a]),
            ComplexPoly::new(vec![zero, GaussianRational::from(1)]),
        ).unwrap();
        let minus = MobiusTransform::from_ints(-1, 0, 0, 1).unwrap().to_map();
        let g = if r.gen_bool(0.5) { minus.compose(&f) } else { sample::mobius(&mut r).to_map().compose(&f) };
        let rep = shared_iterate_analysis(&f, &g, 4).unwrap();
        if rep.minimal_k.is_some() && f != g {
            prop_assert!(rep.cv_cp_agree);
        }
        if g == minus.compose(&f) {
            prop_assert_eq!(rep.minimal_k, Some(2));
        }
    }
}

#[test]
fn closures_of_power_map_rotations_are_cyclic() {
    for d in 2..=5 {
        let g = deck_group(&power(d), 1, 53).unwrap().group;
        let closed = group_closure_mixed(g.elements.clone(), d, ELEMENT_TOL).unwrap();
        assert_eq!(closed.iso_type, IsoType::Cyclic(d));
        assert!(lagrange(&closed));
        assert!(cyclic_axis_shared(&closed));
    }
}

#[test]
fn odd_degree_pair_agrees_on_critical_data() {
    let f = RationalMap::from_ints(&[-1, 0, 0, 1], &[1, 0, 0, 1]).unwrap();
    let g = RationalMap::from_ints(&[1, 0, 0, -1], &[1, 0, 0, 1]).unwrap();
    let rep = shared_iterate_analysis(&f, &g, 4).unwrap();
    assert_eq!(rep.minimal_k, Some(4));
    assert!(rep.cv_cp_agree);
}

#[test]
fn factor_carries_critical_values() {
    let f = RationalMap::from_ints(&[-2, 0, 2], &[-1, 0, 16]).unwrap();
    let g = RationalMap::from_ints(&[-16, 0, 1], &[-8, 0, 8]).unwrap();
    let mu = mobius_factor(&f, &g).unwrap();
    assert_eq!(mu.to_map().compose(&f), g);
    let vf = critical_data(&f, Mode::Exact).unwrap().value_set();
    let vg = critical_data(&g, Mode::Exact).unwrap().value_set();
    let image: Vec<Point> = vf.iter().map(|v| mu.apply_point(v)).collect();
    assert!(same_set(&image, &vg, 0.0));
}
