use proptest::prelude::*;

use groupdens::perms::{conjugation_witness, perm_compose, perm_conjugate, FinSuppPermutation, TargetDomain};
use groupdens::words::{word_invert, word_multiply, Letter, ReducedWord};
use groupdens::zline::{difference_set, dstar, sumset, ZSet};

const LO: i64 = -40;
const HI: i64 = 40;

fn zset() -> impl Strategy<Value = ZSet> {
    (1u64..=12, any::<u16>(), prop::collection::vec(-20i64..=20, 0..4), prop::collection::vec(-20i64..=20, 0..4))
        .prop_map(|(m, mask, add, remove)| {
            let residues = (0..m).filter(|r| mask >> r & 1 == 1);
            let remove: Vec<i64> = remove.into_iter().filter(|x| !add.contains(x)).collect();
            ZSet::new(m, residues, add, remove).unwrap()
        })
}

fn word() -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec(0usize..4, 0..10).prop_map(|ls| {
        ls.into_iter()
            .fold(ReducedWord::identity(), |w, i| word_multiply(&w, &ReducedWord::letter(Letter::ALL[i])).unwrap())
    })
}

fn perm() -> impl Strategy<Value = FinSuppPermutation> {
    (1u64..10)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<u64>>()).prop_shuffle())
        .prop_map(|image| FinSuppPermutation::from_map((1..).zip(image)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn set_algebra_is_pointwise(a in zset(), b in zset()) {
        let (u, i, d, c) = (a.union(&b).unwrap(), a.intersect(&b).unwrap(), a.minus(&b).unwrap(), a.complement());
        for x in LO..=HI {
            let (p, q) = (a.contains(x), b.contains(x));
            prop_assert_eq!(u.contains(x), p || q);
            prop_assert_eq!(i.contains(x), p && q);
            prop_assert_eq!(d.contains(x), p && !q);
            prop_assert_eq!(c.contains(x), !p);
            prop_assert_eq!(a.shift(7).contains(x + 7), p);
            prop_assert_eq!(a.negate().contains(-x), p);
        }
    }

    #[test]
    fn normal_form_is_canonical(a in zset(), k in 1u64..4) {
        // the same set presented with a multiple of its period
        let m = a.modulus() * k;
        let residues: Vec<u64> = (0..m).filter(|&r| a.contains(r as i64 + 1000 * m as i64)).collect();
        let h = a.patch_horizon();
        let add: Vec<i64> = (-h..=h).filter(|&x| a.contains(x) && !residues.contains(&(x.rem_euclid(m as i64) as u64))).collect();
        let remove: Vec<i64> = (-h..=h).filter(|&x| !a.contains(x) && residues.contains(&(x.rem_euclid(m as i64) as u64))).collect();
        prop_assert_eq!(ZSet::new(m, residues, add, remove).unwrap(), a);
    }

    #[test]
    fn sumset_matches_window_oracle(a in zset(), b in zset()) {
        // every representation can be moved to a summand in [-200, 200]
        let s = sumset(&a, &b).unwrap();
        for x in -30i64..=30 {
            let brute = (-200..=200).any(|p| a.contains(p) && b.contains(x - p));
            prop_assert_eq!(s.contains(x), brute, "x = {}", x);
        }
    }

    #[test]
    fn zset_text_and_json_round_trip(a in zset()) {
        prop_assert_eq!(a.to_string().parse::<ZSet>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(json.parse::<ZSet>().unwrap(), a.clone());
        prop_assert_eq!(serde_json::from_str::<ZSet>(&json).unwrap(), a);
    }

    #[test]
    fn difference_set_is_dense(a in zset()) {
        let d = difference_set(&a).unwrap();
        prop_assert!(dstar(&d) >= dstar(&a));
        if !a.is_empty() {
            prop_assert!(d.contains(0));
        }
    }

    #[test]
    fn words_form_a_group(u in word(), v in word(), w in word()) {
        let uv_w = word_multiply(&word_multiply(&u, &v).unwrap(), &w).unwrap();
        let u_vw = word_multiply(&u, &word_multiply(&v, &w).unwrap()).unwrap();
        prop_assert_eq!(uv_w, u_vw);
        prop_assert_eq!(word_multiply(&u, &word_invert(&u)).unwrap(), ReducedWord::identity());
        prop_assert_eq!(u.to_string().parse::<ReducedWord>().unwrap(), u.clone());
        let json = serde_json::to_string(&u).unwrap();
        prop_assert_eq!(serde_json::from_str::<ReducedWord>(&json).unwrap(), u);
    }

    #[test]
    fn permutations_form_a_group(f in perm(), g in perm(), h in perm()) {
        prop_assert_eq!(perm_compose(&perm_compose(&f, &g), &h), perm_compose(&f, &perm_compose(&g, &h)));
        prop_assert!(perm_compose(&f, &f.inverse()).is_identity());
        for x in 1..12 {
            prop_assert_eq!(perm_compose(&f, &g).apply(x), f.apply(g.apply(x)));
        }
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<FinSuppPermutation>(&json).unwrap(), f);
    }

    #[test]
    fn conjugation_moves_support(f in perm(), g in perm()) {
        let c = perm_conjugate(&f, &g);
        let moved: std::collections::BTreeSet<u64> = g.support().into_iter().map(|x| f.apply(x)).collect();
        prop_assert_eq!(c.support(), moved);
    }

    #[test]
    fn conjugation_witness_lands_in_residue_class(s in prop::collection::vec(perm(), 1..4), m in 2u64..5, r in 0u64..5) {
        let e = TargetDomain::residue(m, r % m).unwrap();
        let w = conjugation_witness(&s, &e).unwrap();
        for c in &w.conjugates {
            prop_assert!(c.support().into_iter().all(|x| e.contains(x)));
        }
    }
}
