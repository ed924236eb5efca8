use std::sync::OnceLock;

use proptest::prelude::*;

use groupdens::catalog::small_groups;
use groupdens::density::{
    certificate_from_witness, combine_certificates, density_closed_form, verify_certificate, DensityKind, Witness,
};
use groupdens::games::{intersection_number, sigma_r_via_game};
use groupdens::group::{difference_set, translate, Group, GroupSubset};
use groupdens::measure::{convolve, haar_uniform, measure_of, sup_translates, Carrier, FinSuppMeasure, TranslatePattern};
use groupdens::partitions::{cov, pack};
use groupdens::rational::{self, Rational};
use groupdens::search::{min_set_cover, Bits};
use groupdens::simplex::{solve_game, MatrixGame};

fn groups() -> &'static [Group] {
    static GROUPS: OnceLock<Vec<Group>> = OnceLock::new();
    GROUPS.get_or_init(|| small_groups(8))
}

fn group_and_mask() -> impl Strategy<Value = (usize, u64)> {
    (0..groups().len()).prop_flat_map(|i| (Just(i), 0..1u64 << groups()[i].order()))
}

fn measure_on(g: &Group, raw: &[u8]) -> FinSuppMeasure {
    let w: Vec<i64> = (0..g.order()).map(|i| i64::from(raw[i % raw.len()])).collect();
    let total: i64 = w.iter().sum::<i64>().max(1);
    let entries: Vec<(usize, Rational)> = if w.iter().all(|&x| x == 0) {
        vec![(0, rational::one())]
    } else {
        w.iter().enumerate().map(|(p, &x)| (p, rational::ratio(x, total))).collect()
    };
    FinSuppMeasure::from_weights(Carrier::of(g), entries).unwrap()
}

fn weights() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..5, 1..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn convolution_is_associative(i in 0..groups().len(), a in weights(), b in weights(), c in weights()) {
        let g = &groups()[i];
        let (mu, nu, eta) = (measure_on(g, &a), measure_on(g, &b), measure_on(g, &c));
        let left = convolve(g, &convolve(g, &mu, &nu).unwrap(), &eta).unwrap();
        let right = convolve(g, &mu, &convolve(g, &nu, &eta).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn haar_absorbs(i in 0..groups().len(), a in weights()) {
        let g = &groups()[i];
        let (h, mu) = (haar_uniform(g), measure_on(g, &a));
        prop_assert_eq!(convolve(g, &h, &mu).unwrap(), h.clone());
        prop_assert_eq!(convolve(g, &mu, &h).unwrap(), h);
    }

    #[test]
    fn translate_supremum_dominates((i, m) in group_and_mask(), a in weights()) {
        let g = &groups()[i];
        let set = GroupSubset::from_mask(g.order(), m);
        let mu = measure_on(g, &a);
        for p in [TranslatePattern::TwoSided, TranslatePattern::Left, TranslatePattern::Right] {
            let (s, at) = sup_translates(g, &mu, &set, p).unwrap();
            prop_assert!(s >= measure_of(&mu, &set));
            prop_assert_eq!(measure_of(&mu, &translate(g, &set, at.x, at.y)), s);
        }
    }

    #[test]
    fn densities_are_translate_invariant((i, m) in group_and_mask(), x in 0..8usize, y in 0..8usize) {
        let g = &groups()[i];
        let set = GroupSubset::from_mask(g.order(), m);
        let t = translate(g, &set, x % g.order(), y % g.order());
        for k in DensityKind::ALL {
            prop_assert_eq!(density_closed_form(g, &t, k), density_closed_form(g, &set, k));
        }
    }

    #[test]
    fn sigma_r_game_matches_intersection_number((i, m) in group_and_mask()) {
        let g = &groups()[i];
        let set = GroupSubset::from_mask(g.order(), m);
        let game = sigma_r_via_game(g, &set).unwrap();
        let family: Vec<Vec<usize>> = g.elements().map(|x| translate(g, &set, x, 0).to_indices()).collect();
        let (v, _) = intersection_number(&family, g.order()).unwrap();
        prop_assert_eq!(&game.value, &v);
        prop_assert_eq!(game.value, density_closed_form(g, &set, DensityKind::SigmaR));
    }

    #[test]
    fn combined_certificates_are_subadditive(
        (i, ma) in group_and_mask(),
        mb in any::<u64>(),
        wa in any::<u64>(),
        wb in any::<u64>(),
    ) {
        let g = &groups()[i];
        let n = g.order();
        let full = (1u64 << n) - 1;
        let (a, b) = (GroupSubset::from_mask(n, ma), GroupSubset::from_mask(n, mb & full));
        let witness = |w: u64| {
            let s = GroupSubset::from_mask(n, (w & full).max(1));
            Witness::Set(s.to_indices())
        };
        let ca = certificate_from_witness(g, &a, witness(wa), DensityKind::Sigma).unwrap();
        let cb = certificate_from_witness(g, &b, witness(wb), DensityKind::Sigma).unwrap();
        let c = combine_certificates(g, &a, &ca, &b, &cb).unwrap();
        prop_assert!(c.bound <= &ca.bound + &cb.bound);
        prop_assert!(verify_certificate(g, &a.union(&b), &c).is_ok());
        prop_assert!(density_closed_form(g, &a.union(&b), DensityKind::Sigma) <= c.bound);
    }

    #[test]
    fn covering_and_packing_bounds((i, m) in group_and_mask()) {
        let g = &groups()[i];
        let set = GroupSubset::from_mask(g.order(), m);
        prop_assume!(!set.is_empty());
        let (c, f) = cov(g, &difference_set(g, &set)).unwrap();
        let (p, _) = pack(g, &set).unwrap();
        prop_assert_eq!(c, f.len());
        prop_assert!(c <= p && p <= g.order() / set.len());
    }

    #[test]
    fn game_value_scales_and_shifts(
        payoff in prop::collection::vec(prop::collection::vec(-4i64..6, 3), 1..4),
        num in 1i64..6,
        den in 1i64..5,
        shift in -5i64..6,
    ) {
        let rows: Vec<Vec<Rational>> = payoff.iter().map(|r| r.iter().map(|&x| rational::int(x)).collect()).collect();
        let game = MatrixGame::new(rows).unwrap();
        let (s, t) = (rational::ratio(num, den), rational::int(shift));
        let base = solve_game(&game);
        let moved_game = game.map(|x| x * &s + &t);
        let moved = solve_game(&moved_game);
        prop_assert!(base.verify(&game).is_ok() && moved.verify(&moved_game).is_ok());
        prop_assert_eq!(moved.value, &base.value * &s + &t);
        // the transposed negated game swaps the players
        let dual = solve_game(&game.transpose().map(|x| -x));
        prop_assert_eq!(dual.value, -base.value);
    }

    #[test]
    fn set_cover_is_a_minimal_cover(
        universe in 1usize..10,
        raw in prop::collection::vec(any::<u16>(), 1..8),
    ) {
        let sets: Vec<Bits> = raw
            .iter()
            .map(|&m| Bits::from_iter(universe, (0..universe).filter(|i| m >> i & 1 == 1)))
            .collect();
        if let Some(chosen) = min_set_cover(&sets, universe) {
            let union = chosen.iter().fold(Bits::new(universe), |acc, &i| acc.union(&sets[i]));
            prop_assert_eq!(union.count(), universe);
            // no cover of the next size down exists
            let k = chosen.len();
            for mask in 0u32..1 << sets.len() {
                if (mask.count_ones() as usize) < k {
                    let u = (0..sets.len()).filter(|i| mask >> i & 1 == 1).fold(Bits::new(universe), |acc, i| acc.union(&sets[i]));
                    prop_assert!(u.count() < universe);
                }
            }
        } else {
            let union = sets.iter().fold(Bits::new(universe), |acc, s| acc.union(s));
            prop_assert!(union.count() < universe);
        }
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = rational::ratio(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }
}
