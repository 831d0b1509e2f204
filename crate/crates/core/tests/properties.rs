use std::collections::BTreeSet;

use noet::noether::{height, is_noetherian, is_seed, limit_image, minima, LimitMode, DEFAULT_FUEL};
use noet::{Interval, Relation, Space, Value};
use proptest::prelude::*;

type Edges = Vec<(i64, i64)>;

fn space(n: i64) -> Space {
    Space::int_range(0, n - 1)
}

fn rel(n: i64, edges: &[(i64, i64)]) -> Relation {
    Relation::from_pairs(&space(n), edges.iter().map(|&(a, b)| (Value::Int(a), Value::Int(b)))).unwrap()
}

fn pairs(r: &Relation) -> BTreeSet<(i64, i64)> {
    r.pairs().unwrap().iter().map(|(a, b)| (a.as_int().unwrap(), b.as_int().unwrap())).collect()
}

fn relation() -> impl Strategy<Value = (i64, Edges)> {
    (1i64..=6).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=12)))
}

fn two_relations() -> impl Strategy<Value = (i64, Edges, Edges)> {
    (1i64..=6).prop_flat_map(|n| {
        let edges = prop::collection::vec((0..n, 0..n), 0..=12);
        (Just(n), edges.clone(), edges)
    })
}

/// Edges that only go down, so the relation is Noetherian.
fn descending() -> impl Strategy<Value = (i64, Edges)> {
    relation().prop_map(|(n, e)| (n, e.into_iter().filter(|(a, b)| a > b).collect()))
}

fn compose_naive(r: &BTreeSet<(i64, i64)>, s: &BTreeSet<(i64, i64)>) -> BTreeSet<(i64, i64)> {
    r.iter().flat_map(|&(a, b)| s.iter().filter(move |p| p.0 == b).map(move |&(_, c)| (a, c))).collect()
}

/// Length of the shortest cycle, by breadth-first search from every element.
fn shortest_cycle(n: i64, edges: &[(i64, i64)]) -> Option<usize> {
    let mut best = None;
    for start in 0..n {
        let mut dist = vec![usize::MAX; n as usize];
        let mut queue = std::collections::VecDeque::from([start]);
        dist[start as usize] = 0;
        while let Some(u) = queue.pop_front() {
            for &(_, v) in edges.iter().filter(|e| e.0 == u) {
                if v == start {
                    let len = dist[u as usize] + 1;
                    best = Some(best.map_or(len, |b: usize| b.min(len)));
                } else if dist[v as usize] == usize::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    best
}

fn value() -> impl Strategy<Value = Value> {
    let interval = (-5i64..10, 0i64..5).prop_map(|(lo, len)| Interval::new(lo, lo + len - 1).unwrap());
    let leaf = prop_oneof![
        (-50i64..50).prop_map(Value::Int),
        interval.clone().prop_map(Value::Interval),
        prop::collection::btree_set(interval, 0..4).prop_map(Value::IntervalSet),
        prop::collection::vec(-9i64..9, 0..5).prop_map(Value::Seq),
        "[a-z][a-z0-9_]{0,5}".prop_map(Value::Node),
    ];
    leaf.prop_recursive(3, 16, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Value::pair(a, b)),
            prop::collection::vec(inner, 0..4).prop_map(Value::Tuple),
        ]
    })
}

proptest! {
    #[test]
    fn membership_matches_images((n, e) in relation()) {
        let r = rel(n, &e);
        for a in 0..n {
            let image = r.image(&Value::Int(a)).unwrap();
            for b in 0..n {
                prop_assert_eq!(r.contains(&Value::Int(a), &Value::Int(b)).unwrap(), image.contains(&Value::Int(b)));
            }
        }
    }

    #[test]
    fn powers_add((n, e) in relation(), m in 0usize..4, k in 0usize..4) {
        let r = rel(n, &e);
        let sum = r.power(m + k).unwrap();
        prop_assert!(sum.equals(&r.power(m).unwrap().compose(&r.power(k).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn closures_are_idempotent((n, e) in relation()) {
        let r = rel(n, &e);
        let (plus, star) = r.closures().unwrap();
        let (plus2, star2) = plus.closures().unwrap();
        prop_assert!(plus2.equals(&plus).unwrap());
        prop_assert!(star2.equals(&star).unwrap());
    }

    #[test]
    fn order_flags_are_consistent((n, e) in relation()) {
        let flags = rel(n, &e).classify().unwrap();
        prop_assert!(!flags.order || flags.acyclic);
        prop_assert!(!(flags.irreflexive && flags.transitive) || flags.asymmetric);
    }

    #[test]
    fn refutations_are_shortest_cycles((n, e) in relation()) {
        let verdict = is_noetherian(&rel(n, &e), DEFAULT_FUEL);
        let shortest = shortest_cycle(n, &e);
        prop_assert_eq!(verdict.is_noetherian(), shortest.is_none());
        if let Some(len) = shortest {
            prop_assert_eq!(verdict.witness.map(|w| w.length()), Some(len));
        }
    }

    #[test]
    fn inverse_is_an_involution((n, e) in relation()) {
        let r = rel(n, &e);
        prop_assert!(r.inverse().unwrap().inverse().unwrap().equals(&r).unwrap());
        let flipped: BTreeSet<_> = pairs(&r).into_iter().map(|(a, b)| (b, a)).collect();
        prop_assert_eq!(pairs(&r.inverse().unwrap()), flipped);
    }

    #[test]
    fn composition_matches_its_definition((n, e, f) in two_relations()) {
        let (r, s) = (rel(n, &e), rel(n, &f));
        prop_assert_eq!(pairs(&r.compose(&s).unwrap()), compose_naive(&pairs(&r), &pairs(&s)));
    }

    #[test]
    fn composition_is_associative((n, e, f) in two_relations(), g in prop::collection::vec((0i64..6, 0i64..6), 0..8)) {
        let g: Edges = g.into_iter().filter(|&(a, b)| a < n && b < n).collect();
        let (r, s, t) = (rel(n, &e), rel(n, &f), rel(n, &g));
        let left = r.compose(&s).unwrap().compose(&t).unwrap();
        let right = r.compose(&s.compose(&t).unwrap()).unwrap();
        prop_assert!(left.equals(&right).unwrap());
    }

    #[test]
    fn inverse_reverses_composition((n, e, f) in two_relations()) {
        let (r, s) = (rel(n, &e), rel(n, &f));
        let left = r.compose(&s).unwrap().inverse().unwrap();
        let right = s.inverse().unwrap().compose(&r.inverse().unwrap()).unwrap();
        prop_assert!(left.equals(&right).unwrap());
    }

    #[test]
    fn plus_is_the_union_of_powers((n, e) in relation()) {
        let r = rel(n, &e);
        let (plus, star) = r.closures().unwrap();
        let mut union = BTreeSet::new();
        for k in 1..=n as usize {
            union.extend(pairs(&r.power(k).unwrap()));
        }
        prop_assert_eq!(pairs(&plus), union.clone());
        let p = pairs(&plus);
        prop_assert!(compose_naive(&p, &p).is_subset(&p));
        union.extend((0..n).map(|a| (a, a)));
        prop_assert_eq!(pairs(&star), union);
    }

    #[test]
    fn noetherian_iff_plus_is_irreflexive((n, e) in relation()) {
        let r = rel(n, &e);
        let (plus, _) = r.closures().unwrap();
        let irreflexive = pairs(&plus).iter().all(|(a, b)| a != b);
        let verdict = is_noetherian(&r, DEFAULT_FUEL);
        prop_assert_eq!(verdict.is_noetherian(), irreflexive);
        if let Some(chain) = verdict.witness.filter(|_| !irreflexive) {
            prop_assert_eq!(chain.first(), chain.last());
            for w in chain.0.windows(2) {
                prop_assert!(r.contains(&w[0], &w[1]).unwrap());
            }
        }
    }

    #[test]
    fn height_is_one_more_than_the_highest_successor((n, e) in descending()) {
        let r = rel(n, &e);
        for a in 0..n {
            let a = Value::Int(a);
            let below = r.image(&a).unwrap().iter().map(|b| height(&r, b).unwrap() + 1).max().unwrap_or(0);
            prop_assert_eq!(height(&r, &a).unwrap(), below);
        }
    }

    #[test]
    fn limits_land_in_reachable_minima((n, e) in descending()) {
        let r = rel(n, &e);
        let lows = minima(&r).unwrap();
        let (_, star) = r.closures().unwrap();
        for a in 0..n {
            let a = Value::Int(a);
            let reachable: BTreeSet<Value> = star.image(&a).unwrap().intersection(&lows).cloned().collect();
            prop_assert_eq!(limit_image(&r, &a, LimitMode::ReachableMinima).unwrap(), reachable.clone());
            let deepest = limit_image(&r, &a, LimitMode::Maxdepth).unwrap();
            prop_assert!(!deepest.is_empty() && deepest.is_subset(&reachable));
            if lows.contains(&a) {
                prop_assert_eq!(deepest, BTreeSet::from([a]));
            }
        }
    }

    #[test]
    fn seeds_keep_minima((n, e) in descending(), keep in prop::collection::vec(any::<bool>(), 12)) {
        let s = rel(n, &e);
        let mut kept: Edges = Vec::new();
        for (i, &(a, b)) in e.iter().enumerate() {
            let first_from_a = e.iter().position(|p| p.0 == a) == Some(i);
            if first_from_a || keep[i % keep.len()] {
                kept.push((a, b));
            }
        }
        let r = rel(n, &kept);
        prop_assert!(is_seed(&r, &s).unwrap());
        prop_assert_eq!(minima(&r).unwrap(), minima(&s).unwrap());
    }

    #[test]
    fn values_round_trip_through_text(v in value()) {
        let text = v.to_string();
        let parsed: Value = text.parse().unwrap();
        prop_assert_eq!(parsed, v);
    }

    #[test]
    fn values_round_trip_through_json(v in value()) {
        let json = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<Value>(&json).unwrap(), v);
    }
}

proptest! {
    #[test]
    fn supinterval_is_a_special_case_of_interval(lo in 0i64..=6, width in 0i64..=6) {
        use noet::catalog::{named_relation, NamedRelation};
        let hi = (lo + width).min(6);
        let sup = named_relation(&NamedRelation::SupInterval { lo, hi }).unwrap();
        let by_length = named_relation(&NamedRelation::Interval { lo, hi }).unwrap();
        prop_assert_eq!(sup.first_pair_outside(&by_length).unwrap(), None);
    }
}
