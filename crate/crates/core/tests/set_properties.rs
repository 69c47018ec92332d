use proptest::prelude::*;

use svcalc_core::set_core::{
    hausdorff_direct, hausdorff_via_pairs, metric_chains, metric_pairs, read_text, write_text,
};
use svcalc_core::{CompactSet, Tolerances};

fn rows(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), 1..=20)
}

fn triple() -> impl Strategy<Value = [CompactSet; 3]> {
    (1usize..=3).prop_flat_map(|n| {
        (rows(n), rows(n), rows(n)).prop_map(|(a, b, c)| [set(&a), set(&b), set(&c)])
    })
}

fn set(rows: &[Vec<f64>]) -> CompactSet {
    CompactSet::from_rows(rows).unwrap()
}

fn haus(a: &CompactSet, b: &CompactSet) -> f64 {
    hausdorff_via_pairs(a, b, &Tolerances::default()).unwrap()
}

proptest! {
    #[test]
    fn metric_axioms([a, b, c] in triple()) {
        prop_assert_eq!(haus(&a, &a), 0.0);
        prop_assert_eq!(haus(&a, &b), haus(&b, &a));
        prop_assert!(haus(&a, &c) <= haus(&a, &b) + haus(&b, &c) + 1e-12);
        if haus(&a, &b) == 0.0 {
            prop_assert_eq!(&a, &b);
        }
    }

    #[test]
    fn zero_distance_only_for_equal_sets(r in rows(2), extra in prop::collection::vec(-10.0f64..10.0, 2)) {
        let a = set(&r);
        let reordered: Vec<Vec<f64>> = r.iter().rev().cloned().collect();
        prop_assert_eq!(haus(&a, &set(&reordered)), 0.0);
        let mut grown = r.clone();
        grown.push(extra);
        let b = set(&grown);
        prop_assert_eq!(haus(&a, &b) == 0.0, a == b);
    }

    #[test]
    fn pairs_cover_both_sets([a, b, _c] in triple()) {
        let pairs = metric_pairs(&a, &b, &Tolerances::default()).unwrap();
        for p in a.iter() {
            prop_assert!(pairs.iter().any(|(x, _)| x.coords() == p));
        }
        for q in b.iter() {
            prop_assert!(pairs.iter().any(|(_, y)| y.coords() == q));
        }
        prop_assert!((pairs.max_length() - hausdorff_direct(&a, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn two_set_chains_are_the_pairs([a, b, _c] in triple()) {
        let tol = Tolerances::default();
        let chains = metric_chains(&[a.clone(), b.clone()], &tol).unwrap();
        let pairs = metric_pairs(&a, &b, &tol).unwrap();
        prop_assert_eq!(chains.len(), pairs.len());
        for (chain, (x, y)) in chains.iter().zip(pairs.iter()) {
            prop_assert_eq!(&chain[0], x);
            prop_assert_eq!(&chain[1], y);
        }
    }

    #[test]
    fn three_set_chains_link_through_pairs([a, b, c] in triple()) {
        let tol = Tolerances::default();
        let ab = metric_pairs(&a, &b, &tol).unwrap();
        let bc = metric_pairs(&b, &c, &tol).unwrap();
        for chain in metric_chains(&[a, b, c], &tol).unwrap() {
            prop_assert!(ab.iter().any(|(x, y)| *x == chain[0] && *y == chain[1]));
            prop_assert!(bc.iter().any(|(x, y)| *x == chain[1] && *y == chain[2]));
        }
    }

    #[test]
    fn text_and_json_round_trip(r in rows(3)) {
        let a = set(&r);
        prop_assert_eq!(read_text(&write_text(&a)).unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<CompactSet>(&json).unwrap(), a);
    }
}
