//! Property tests for the structural invariants.

mod common;

use proptest::prelude::*;
use std::cmp::Ordering;

use ldpc_peg::alist::{read_alist, write_alist};
use ldpc_peg::analysis::{AceSpectrum, GirthBin, SpectrumEntry, Vnlgd};
use ldpc_peg::metric::bfs_metrics;
use ldpc_peg::{DegreeSequence, MetricKind, MetricValue, TannerGraph};

fn arb_metric(kind: MetricKind) -> impl Strategy<Value = MetricValue> {
    prop_oneof![
        1 => Just(MetricValue::NegInfinity),
        1 => Just(MetricValue::Infinity),
        6 => (0u64..40, -4i64..40).prop_map(move |(d, a)| MetricValue::finite(kind, d, a)),
    ]
}

/// A random insert script over a small graph: (m, n, degrees, edge attempts).
fn arb_insert_script() -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<(usize, usize)>)> {
    (1usize..8, 1usize..8).prop_flat_map(|(m, n)| {
        let degrees = proptest::collection::vec(1usize..=m, n);
        let edges = proptest::collection::vec((0usize..m, 0usize..n), 0..30);
        (Just(m), Just(n), degrees, edges)
    })
}

proptest! {
    #[test]
    fn adjacency_stays_symmetric_under_random_inserts(
        (m, n, degrees, attempts) in arb_insert_script()
    ) {
        let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees).unwrap()).unwrap();
        for (c, v) in attempts {
            let _ = g.add_edge(c, v);
        }
        let mut count = 0;
        for c in 0..m {
            for &v in g.cn_neighbors(c) {
                prop_assert!(g.vn_neighbors(v).contains(&c));
                prop_assert!(g.has_edge(c, v));
                count += 1;
            }
        }
        prop_assert_eq!(count, g.edge_count());
        for v in 0..n {
            for &c in g.vn_neighbors(v) {
                prop_assert!(g.cn_neighbors(c).contains(&v));
            }
            prop_assert!(g.vn_degree(v) <= g.target_degree(v));
        }
    }

    #[test]
    fn edge_set_equals_fold_of_single_inserts(
        (m, n, degrees, attempts) in arb_insert_script()
    ) {
        // Deduplicate attempts into a set that individually succeeds.
        let mut probe = TannerGraph::new(m, n, DegreeSequence::new(degrees.clone()).unwrap()).unwrap();
        let mut accepted = Vec::new();
        for (c, v) in attempts {
            if probe.add_edge(c, v).is_ok() {
                accepted.push((c, v));
            }
        }
        let mut bulk = TannerGraph::new(m, n, DegreeSequence::new(degrees).unwrap()).unwrap();
        bulk.add_edge_set(&accepted).unwrap();
        prop_assert_eq!(bulk, probe);
    }

    #[test]
    fn metric_compare_is_a_total_order(
        a in arb_metric(MetricKind::DistanceAce),
        b in arb_metric(MetricKind::DistanceAce),
        c in arb_metric(MetricKind::DistanceAce),
    ) {
        let ab = a.compare(&b).unwrap();
        let ba = b.compare(&a).unwrap();
        prop_assert_eq!(ab, ba.reverse());
        prop_assert_eq!(a.compare(&a).unwrap(), Ordering::Equal);
        // Transitivity: a <= b <= c implies a <= c.
        let bc = b.compare(&c).unwrap();
        if ab != Ordering::Greater && bc != Ordering::Greater {
            prop_assert_ne!(a.compare(&c).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn spectrum_compare_is_a_total_order(
        xs in proptest::collection::vec(prop_oneof![
            Just(SpectrumEntry::Infinite),
            (0i64..30).prop_map(SpectrumEntry::Finite)
        ], 5),
        ys in proptest::collection::vec(prop_oneof![
            Just(SpectrumEntry::Infinite),
            (0i64..30).prop_map(SpectrumEntry::Finite)
        ], 5),
    ) {
        let a = AceSpectrum::from_entries(xs);
        let b = AceSpectrum::from_entries(ys);
        prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
        prop_assert_eq!(a.compare(&a), Ordering::Equal);
        if a.compare(&b) == Ordering::Equal {
            prop_assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn vnlgd_compare_is_a_total_order(
        xs in proptest::collection::vec(prop_oneof![
            Just(GirthBin::Infinite),
            (2u64..8).prop_map(|g| GirthBin::Finite(2 * g))
        ], 1..12),
        ys in proptest::collection::vec(prop_oneof![
            Just(GirthBin::Infinite),
            (2u64..8).prop_map(|g| GirthBin::Finite(2 * g))
        ], 1..12),
    ) {
        let a = Vnlgd::from_local_girths(xs);
        let b = Vnlgd::from_local_girths(ys);
        prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
        prop_assert_eq!(a.compare(&a), Ordering::Equal);
    }

    #[test]
    fn fresh_edge_measures_distance_one(
        (m, n, degrees, attempts) in arb_insert_script()
    ) {
        let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees).unwrap()).unwrap();
        for (c, v) in attempts {
            let _ = g.add_edge(c, v);
        }
        for v in 0..n {
            let metrics = bfs_metrics(&g, v, MetricKind::DistanceAce);
            for &c in g.vn_neighbors(v) {
                prop_assert_eq!(
                    metrics[c],
                    MetricValue::one_for_vn(MetricKind::DistanceAce, g.target_degree(v))
                );
            }
        }
    }

    #[test]
    fn alist_round_trips(
        (m, n, degrees, attempts) in arb_insert_script()
    ) {
        let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees).unwrap()).unwrap();
        for (c, v) in attempts {
            let _ = g.add_edge(c, v);
        }
        // Written targets are realized degrees; align the source graph so the
        // round trip is an identity.
        let realized: Vec<usize> = (0..n).map(|v| g.vn_degree(v).max(1)).collect();
        let mut canonical =
            TannerGraph::new(m, n, DegreeSequence::new(realized).unwrap()).unwrap();
        for c in 0..m {
            for &v in g.cn_neighbors(c) {
                canonical.add_edge(c, v).unwrap();
            }
        }
        let back = read_alist(&write_alist(&canonical)).unwrap();
        prop_assert_eq!(back, canonical);
    }
}
