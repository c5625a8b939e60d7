//! Property tests. Random spaces and pseudometrics are built from a
//! proptest-chosen seed; scalars and sizes come from proptest directly.

mod common;

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmcone::cone::{cone_report, maximizer_doubletons};
use pmcone::document::Document;
use pmcone::extend::{extend_lip_preserving, PartialPseudometric};
use pmcone::operator::{
    check_norm_preserving, check_pp_preserving, check_round_trip, check_scalar_preserving, compose,
    ConeFamily, Probes,
};
use pmcone::peaking::build_peaking;
use pmcone::pseudometric::{d_of_functions, Pseudometric};
use pmcone::random::{
    isometric_copy, random_bijection, random_pair, random_pseudometric, random_space, random_subset,
};
use pmcone::rational::{frac, int, Rational};
use pmcone::reconstruct::{random_probes, recover_doubleton_map, recover_point_map};
use pmcone::space::Space;

use common::{argmax_pairs, is_pseudometric, lip, norm, rows};

fn instance(seed: u64, n: usize) -> (Arc<Space>, Pseudometric, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = random_space(&mut rng, "z", n, 16);
    let d = random_pseudometric(&mut rng, &z, 16);
    (z, d, rng)
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=40, 1i64..=12).prop_map(|(p, q)| frac(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_and_lip_are_homogeneous(seed: u64, n in 2usize..=7, t in positive()) {
        let (z, d, _) = instance(seed, n);
        let scaled = d.scale(&t);
        prop_assert_eq!(scaled.sup_norm(), d.sup_norm() * &t);
        prop_assert_eq!(scaled.lip_constant().unwrap(), d.lip_constant().unwrap() * &t);
        prop_assert_eq!(d.sup_norm(), norm(&rows(&d)));
        prop_assert_eq!(d.lip_constant().unwrap(), lip(&rows(&d), &z));
    }

    #[test]
    fn cone_operations_stay_pseudometrics(seed: u64, n in 1usize..=7, c in positive()) {
        let (z, d, mut rng) = instance(seed, n);
        let e = random_pseudometric(&mut rng, &z, 16);
        let sum = d.add(&e).unwrap();
        let max = d.max(&e).unwrap();
        prop_assert!(is_pseudometric(&rows(&sum)));
        prop_assert!(is_pseudometric(&rows(&max)));
        prop_assert!(is_pseudometric(&rows(&d.truncate(&c))));
        prop_assert!(d.truncate(&c).sup_norm() <= c);
    }

    #[test]
    fn maximizers_ignore_positive_scaling(seed: u64, n in 2usize..=7, t in positive()) {
        let (_, d, _) = instance(seed, n);
        let reference: Vec<(usize, usize)> = argmax_pairs(&rows(&d));
        let found: Vec<(usize, usize)> = maximizer_doubletons(&d)
            .unwrap_or_default()
            .into_iter()
            .map(|p| (p.first(), p.second()))
            .collect();
        if !d.is_zero() {
            prop_assert_eq!(&found, &reference);
        }
        let scaled: Vec<(usize, usize)> = maximizer_doubletons(&d.scale(&t))
            .unwrap_or_default()
            .into_iter()
            .map(|p| (p.first(), p.second()))
            .collect();
        prop_assert_eq!(found, scaled);
    }

    #[test]
    fn function_families_give_pseudometrics(
        n in 1usize..=6,
        values in prop::collection::vec(prop::collection::vec(-20i64..=20, 6), 1..=4),
    ) {
        let z = Space::discrete((0..n).map(|i| format!("p{i}")).collect());
        let functions: Vec<Vec<Rational>> = values
            .iter()
            .map(|f| f[..n].iter().map(|&v| int(v)).collect())
            .collect();
        let d = d_of_functions(&z, &functions).unwrap();
        prop_assert!(is_pseudometric(&rows(&d)));
        for i in 0..n {
            for j in 0..n {
                let expected = functions.iter().map(|f| (&f[i] - &f[j]).abs()).max().unwrap();
                prop_assert_eq!(d.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn lpmk_membership_matches_a_full_scan(seed: u64, n in 2usize..=7, k in positive()) {
        let (z, d, _) = instance(seed, n);
        let report = cone_report(&d, &k).unwrap();
        let dm = rows(&d);
        let below = (0..n).all(|i| (0..n).all(|j| i == j || dm[i][j] < &k * z.dist(i, j)));
        let at_most = (0..n).all(|i| (0..n).all(|j| dm[i][j] <= &k * z.dist(i, j)));
        prop_assert_eq!(report.in_lpmk, below);
        prop_assert_eq!(report.in_lpmk_closure, at_most);
        prop_assert_eq!(report.in_pp, argmax_pairs(&dm).len() == 1 && !d.is_zero());
    }

    #[test]
    fn extension_is_deterministic_and_dominated(seed: u64, n in 1usize..=8) {
        let (z, d, mut rng) = instance(seed, n);
        let subset = random_subset(&mut rng, n);
        let pd = PartialPseudometric::restrict(&d, &subset).unwrap();
        let ext = extend_lip_preserving(&pd);
        prop_assert_eq!(&ext, &extend_lip_preserving(&pd));
        let (bound_norm, bound_lip) = (pd.sup_norm(), pd.lip_constant());
        for i in 0..n {
            for j in 0..n {
                let cap = (&bound_lip * z.dist(i, j)).min(bound_norm.clone());
                prop_assert!(*ext.get(i, j) <= cap);
            }
        }
    }

    #[test]
    fn extension_is_monotone_in_the_data(seed: u64, n in 2usize..=7, t in 1i64..=4) {
        let (_, d, mut rng) = instance(seed, n);
        let subset = random_subset(&mut rng, n);
        let small = extend_lip_preserving(&PartialPseudometric::restrict(&d, &subset).unwrap());
        let scaled = d.scale(&frac(t + 1, t));
        let large = extend_lip_preserving(&PartialPseudometric::restrict(&scaled, &subset).unwrap());
        for i in 0..n {
            for j in 0..n {
                prop_assert!(small.get(i, j) <= large.get(i, j));
            }
        }
    }

    #[test]
    fn peaking_series_tail_is_geometric(seed: u64, n in 2usize..=7) {
        let (_, d, mut rng) = instance(seed, n);
        let (x, y) = random_pair(&mut rng, n);
        let t = build_peaking(&d, x, y).unwrap();
        let n0 = t.n0;
        let big = n0 + 10;
        let tail = rows(&t.partial_series(big));
        let head = rows(&t.partial_series(n0));
        let level = rows(t.level(n0));
        let factor = Rational::one() / Rational::from_integer(2.into()).pow(n0 as i32)
            - Rational::one() / Rational::from_integer(2.into()).pow(big as i32);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(&tail[i][j] - &head[i][j], &level[i][j] * &factor);
            }
        }
        // ρ = e + S_{n0} + ρ_{n0} / 2^{n0}
        let e = rows(&t.e);
        let rho = rows(&t.rho);
        let last = Rational::one() / Rational::from_integer(2.into()).pow(n0 as i32);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(&rho[i][j], &(&e[i][j] + &head[i][j] + &level[i][j] * &last));
            }
        }
    }

    #[test]
    fn documents_round_trip(seed: u64, n in 1usize..=6) {
        let (z, d, _) = instance(seed, n);
        let doc = Document::from_space(&z).with_pseudometric("d", &d);
        let parsed = Document::parse(&doc.to_json()).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let z2 = parsed.space().unwrap();
        prop_assert_eq!(&z2, &z);
        prop_assert_eq!(parsed.pseudometric(&z2, "d").unwrap(), d);
    }

    #[test]
    fn recovery_does_not_depend_on_the_seeds(seed: u64, n in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_space(&mut rng, "x", n, 16);
        let y = random_space(&mut rng, "y", n, 16);
        let phi = random_bijection(&mut rng, n);
        let extra = random_pseudometric(&mut rng, &y, 16);
        let seed_sets = [
            vec![Pseudometric::zero(&y)],
            vec![Pseudometric::zero(&y), Pseudometric::base(&y)],
            vec![Pseudometric::zero(&y), Pseudometric::base(&y), extra],
        ];
        let mut tables = Vec::new();
        for seeds in &seed_sets {
            let mut oracle = compose(phi.clone(), &x, &y, ConeFamily::Pm).unwrap();
            let map = recover_doubleton_map(&mut oracle, seeds, 3).unwrap();
            let result = recover_point_map(&map, &x, &y).unwrap();
            prop_assert_eq!(&result.phi, &phi);
            tables.push(map.table);
        }
        prop_assert_eq!(&tables[0], &tables[1]);
        prop_assert_eq!(&tables[1], &tables[2]);
    }

    #[test]
    fn recovered_map_is_unique_for_three_or_more_points(seed: u64, n in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_space(&mut rng, "x", n, 16);
        let y = random_space(&mut rng, "y", n, 16);
        let phi = random_bijection(&mut rng, n);
        let mut oracle = compose(phi.clone(), &x, &y, ConeFamily::Pm).unwrap();
        let seeds = [Pseudometric::zero(&y), Pseudometric::base(&y)];
        let map = recover_doubleton_map(&mut oracle, &seeds, 3).unwrap();
        let result = recover_point_map(&map, &x, &y).unwrap();
        prop_assert!(!result.ambiguity);
        // the only point map inducing the doubleton table is phi
        let fitting: Vec<_> = pmcone::space::Bijection::all(n)
            .into_iter()
            .filter(|psi| map.table.iter().all(|(pair, image)| psi.image(*pair) == *image))
            .collect();
        prop_assert_eq!(fitting, vec![phi]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn composition_oracles_pass_every_check(seed: u64, n in 2usize..=6, family_pick in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_space(&mut rng, "x", n, 16);
        let phi = random_bijection(&mut rng, n);
        let family = match family_pick {
            0 => ConeFamily::Pm,
            1 => ConeFamily::Lpm,
            _ => ConeFamily::Lpmk(frac(rng.gen_range(1..=8), 2)),
        };
        // LPM_k is preserved only when phi is an isometry
        let y = match family {
            ConeFamily::Lpmk(_) => isometric_copy(&x, "y", &phi),
            _ => random_space(&mut rng, "y", n, 16),
        };
        let mut oracle = compose(phi.clone(), &x, &y, family.clone()).unwrap();
        let probes = Probes {
            forward: random_probes(&mut rng, &x, 250, &family),
            inverse: random_probes(&mut rng, &y, 250, &family),
        };
        let scalars = [Rational::zero(), frac(1, 2), frac(3, 7), Rational::one()];
        prop_assert!(check_norm_preserving(&mut oracle, &probes).passed());
        prop_assert!(check_scalar_preserving(&mut oracle, &probes, &scalars).passed());
        prop_assert!(check_pp_preserving(&mut oracle, &probes).passed());
        prop_assert!(check_round_trip(&mut oracle, &probes).passed());
        for d in &probes.forward {
            let image = oracle.forward(d).unwrap();
            prop_assert_eq!(&oracle.inverse(&image).unwrap(), d);
            let (dm, im) = (rows(d), rows(&image));
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(&im[i][j], &dm[phi.apply(i)][phi.apply(j)]);
                }
            }
        }
    }
}
