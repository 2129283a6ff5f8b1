//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here recomputes results from first principles (exhaustive path
//! and cycle walks, subset enumeration) without touching the library's sweep
//! or lookahead code paths, so agreement is meaningful.

#![allow(dead_code)]

use std::collections::HashSet;

use ldpc_peg::analysis::{local_girth_edge, local_girth_vn};
use ldpc_peg::metric::bfs_metrics;
use ldpc_peg::rng::{rng_from_seed, uniform_index, ConstructionRng};
use ldpc_peg::{DegreeSequence, MetricKind, MetricValue, TannerGraph};

/// Seeded random bipartite graph: m, n in the given ranges, degree targets
/// small, a random number of edges actually inserted (possibly below target).
pub fn random_graph(
    rng: &mut ConstructionRng,
    m_range: (usize, usize),
    n_range: (usize, usize),
    max_degree: usize,
) -> TannerGraph {
    let m = m_range.0 + uniform_index(rng, m_range.1 - m_range.0 + 1);
    let n = n_range.0 + uniform_index(rng, n_range.1 - n_range.0 + 1);
    let cap = max_degree.min(m);
    let degrees: Vec<usize> = (0..n).map(|_| 1 + uniform_index(rng, cap)).collect();
    let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees.clone()).unwrap()).unwrap();
    for v in 0..n {
        let edges = uniform_index(rng, degrees[v] + 1);
        for _ in 0..edges {
            let cn = uniform_index(rng, m);
            let _ = g.add_edge(cn, v);
        }
    }
    g
}

/// Builds a graph over an explicit edge list with given target degrees.
pub fn graph_from_edges(
    m: usize,
    n: usize,
    degrees: &[usize],
    edges: &[(usize, usize)],
) -> TannerGraph {
    let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees.to_vec()).unwrap()).unwrap();
    for &(c, v) in edges {
        g.add_edge(c, v).unwrap();
    }
    g
}

/// Exhaustive shortest-path oracle: walks every simple path from variable
/// node `v`, keeping per check node the shortest length and the minimum ACE
/// among paths of that length.
pub fn oracle_metrics(g: &TannerGraph, v: usize, kind: MetricKind) -> Vec<MetricValue> {
    let m = g.cn_count();
    let mut best: Vec<Option<(u64, i64)>> = vec![None; m];
    let mut on_path = vec![false; g.cn_count() + g.vn_count()];
    let origin_ace = g.target_degree(v) as i64 - 2;
    on_path[m + v] = true;
    walk_paths(g, m + v, 0, origin_ace, &mut on_path, &mut best);
    on_path[m + v] = false;
    best.into_iter()
        .map(|entry| match entry {
            None => MetricValue::Infinity,
            Some((d, a)) => MetricValue::finite(kind, d, a),
        })
        .collect()
}

fn walk_paths(
    g: &TannerGraph,
    node: usize,
    len: u64,
    ace: i64,
    on_path: &mut [bool],
    best: &mut [Option<(u64, i64)>],
) {
    let m = g.cn_count();
    if node < m {
        let entry = &mut best[node];
        *entry = match *entry {
            None => Some((len, ace)),
            Some(cur) => Some(cur.min((len, ace))),
        };
    }
    let neighbours: Vec<usize> = if node < m {
        g.cn_neighbors(node).iter().map(|&u| m + u).collect()
    } else {
        g.vn_neighbors(node - m).to_vec()
    };
    for next in neighbours {
        if on_path[next] {
            continue;
        }
        let next_ace = if next >= m {
            ace + g.target_degree(next - m) as i64 - 2
        } else {
            ace
        };
        on_path[next] = true;
        walk_paths(g, next, len + 1, next_ace, on_path, best);
        on_path[next] = false;
    }
}

/// One simple cycle with its explicit edge set.
#[derive(Debug, Clone)]
pub struct OracleCycle {
    pub length: usize,
    pub ace: i64,
    /// Edges as (cn, vn) pairs, sorted.
    pub edges: Vec<(usize, usize)>,
}

/// Exhaustive cycle oracle recording edge sets, written independently of the
/// library's enumerator (different canonicalization: a global set of sorted
/// edge lists deduplicates).
pub fn oracle_cycles(g: &TannerGraph, max_len: usize) -> Vec<OracleCycle> {
    let nodes = g.cn_count() + g.vn_count();
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; nodes];

    fn neighbours(g: &TannerGraph, node: usize) -> Vec<usize> {
        let m = g.cn_count();
        if node < m {
            g.cn_neighbors(node).iter().map(|&u| m + u).collect()
        } else {
            g.vn_neighbors(node - m).to_vec()
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        g: &TannerGraph,
        start: usize,
        node: usize,
        max_len: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        seen: &mut HashSet<Vec<(usize, usize)>>,
        cycles: &mut Vec<OracleCycle>,
    ) {
        for next in neighbours(g, node) {
            if next == start && path.len() >= 4 {
                record(g, path, seen, cycles);
                continue;
            }
            if on_path[next] || path.len() >= max_len {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            walk(g, start, next, max_len, path, on_path, seen, cycles);
            on_path[next] = false;
            path.pop();
        }
    }

    fn record(
        g: &TannerGraph,
        path: &[usize],
        seen: &mut HashSet<Vec<(usize, usize)>>,
        cycles: &mut Vec<OracleCycle>,
    ) {
        let m = g.cn_count();
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(path.len());
        for i in 0..path.len() {
            let a = path[i];
            let b = path[(i + 1) % path.len()];
            let (cn, vn) = if a < m { (a, b - m) } else { (b, a - m) };
            edges.push((cn, vn));
        }
        edges.sort_unstable();
        if seen.insert(edges.clone()) {
            let ace = path
                .iter()
                .filter(|&&x| x >= m)
                .map(|&x| g.target_degree(x - m) as i64 - 2)
                .sum();
            cycles.push(OracleCycle {
                length: path.len(),
                ace,
                edges,
            });
        }
    }

    for start in 0..nodes {
        path.clear();
        path.push(start);
        on_path[start] = true;
        walk(
            g,
            start,
            start,
            max_len,
            &mut path,
            &mut on_path,
            &mut seen,
            &mut cycles,
        );
        on_path[start] = false;
    }
    cycles
}

/// Minimum (length, ace) over a set of cycles under the requested metric;
/// infinity if the set is empty.
pub fn min_cycle_metric(cycles: &[OracleCycle], kind: MetricKind) -> MetricValue {
    cycles
        .iter()
        .map(|c| (c.length as u64, c.ace))
        .min()
        .map_or(MetricValue::Infinity, |(len, _)| {
            let best_ace = cycles
                .iter()
                .filter(|c| c.length as u64 == len)
                .map(|c| c.ace)
                .min()
                .unwrap();
            MetricValue::finite(kind, len, best_ace)
        })
}

/// Exhaustive multi-edge-girth oracle: evaluates every r-subset of
/// unconnected check nodes by materializing its graphs edge by edge and
/// measuring each new edge's local girth through the analysis route
/// (remove-edge sweeps), entirely apart from the lookahead search.
///
/// Returns the max-min value (the lookahead girth) and the per-check-node
/// maxima over subsets containing that check node.
pub fn oracle_multi_edge(
    g: &TannerGraph,
    v: usize,
    r: usize,
    kind: MetricKind,
) -> (MetricValue, Vec<MetricValue>) {
    let m = g.cn_count();
    let candidates: Vec<usize> = (0..m).filter(|&cn| !g.has_edge(cn, v)).collect();
    let mut vn_girth = MetricValue::NegInfinity;
    let mut cn_girths = vec![MetricValue::NegInfinity; m];

    let mut subset = Vec::with_capacity(r);
    enumerate_subsets(&candidates, r, 0, &mut subset, &mut |s: &[usize]| {
        let mut work = g.clone();
        let mut seq_min = MetricValue::Infinity;
        for &cn in s {
            work.add_edge(cn, v).unwrap();
            let girth = local_girth_edge(&work, cn, v, kind).unwrap();
            seq_min = min_metric(seq_min, girth);
        }
        vn_girth = max_metric(vn_girth, seq_min);
        for &cn in s {
            cn_girths[cn] = max_metric(cn_girths[cn], seq_min);
        }
    });
    (vn_girth, cn_girths)
}

/// Direct evaluation of the lookahead girth as "the best local girth of `v`
/// over all r-edge completions", including cycles through v's existing edges.
pub fn oracle_multi_edge_direct(
    g: &TannerGraph,
    v: usize,
    r: usize,
    kind: MetricKind,
) -> MetricValue {
    let m = g.cn_count();
    let candidates: Vec<usize> = (0..m).filter(|&cn| !g.has_edge(cn, v)).collect();
    let mut best = MetricValue::NegInfinity;
    let mut subset = Vec::with_capacity(r);
    enumerate_subsets(&candidates, r, 0, &mut subset, &mut |s: &[usize]| {
        let mut work = g.clone();
        for &cn in s {
            work.add_edge(cn, v).unwrap();
        }
        best = max_metric(best, local_girth_vn(&work, v, kind));
    });
    best
}

fn enumerate_subsets(
    items: &[usize],
    r: usize,
    from: usize,
    acc: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if acc.len() == r {
        visit(acc);
        return;
    }
    for i in from..items.len() {
        acc.push(items[i]);
        enumerate_subsets(items, r, i + 1, acc, visit);
        acc.pop();
    }
}

pub fn min_metric(a: MetricValue, b: MetricValue) -> MetricValue {
    if a.compare(&b).unwrap() == std::cmp::Ordering::Greater {
        b
    } else {
        a
    }
}

pub fn max_metric(a: MetricValue, b: MetricValue) -> MetricValue {
    if a.compare(&b).unwrap() == std::cmp::Ordering::Less {
        b
    } else {
        a
    }
}

/// The path fixture: check nodes along a path of total length `l` (even,
/// divisible by 12), a fresh degree-4 variable node `vc` on the side, and
/// seven labelled check nodes at positions 0, l/4, l/3, l/2, 2l/3, 3l/4, l.
///
/// Returns (graph, labelled check-node indices c0..c6, vc index).
pub fn path_fixture(l: usize) -> (TannerGraph, [usize; 7], usize) {
    assert!(
        l % 24 == 0,
        "all labelled positions must land on even offsets"
    );
    let m = l / 2 + 1; // check nodes at even positions
    let path_vns = l / 2; // variable nodes at odd positions
    let n = path_vns + 1;
    let vc = path_vns;
    let mut degrees = vec![2usize; path_vns];
    degrees.push(4);
    let mut g = TannerGraph::new(m, n, DegreeSequence::new(degrees).unwrap()).unwrap();
    // Edge between the node at position 2k (check k) and 2k+1 (variable k),
    // and between 2k+1 and 2k+2 (check k+1).
    for k in 0..path_vns {
        g.add_edge(k, k).unwrap();
        g.add_edge(k + 1, k).unwrap();
    }
    let labels = [0, l / 4, l / 3, l / 2, 2 * l / 3, 3 * l / 4, l].map(|p| p / 2);
    (g, labels, vc)
}

/// All codewords of the code with check matrix given by `g`, by enumerating
/// the GF(2) null space. Usable for tiny codes only.
pub fn all_codewords(g: &TannerGraph) -> Vec<Vec<u8>> {
    let n = g.vn_count();
    let m = g.cn_count();
    // Row-reduce H over GF(2).
    let mut rows: Vec<Vec<u8>> = (0..m)
        .map(|c| {
            let mut row = vec![0u8; n];
            for &v in g.cn_neighbors(c) {
                row[v] = 1;
            }
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        if let Some(pivot) = (rank..m).find(|&r| rows[r][col] == 1) {
            rows.swap(rank, pivot);
            for r in 0..m {
                if r != rank && rows[r][col] == 1 {
                    let (a, b) = if r < rank {
                        let (lo, hi) = rows.split_at_mut(rank);
                        (&mut lo[r], &hi[0])
                    } else {
                        let (lo, hi) = rows.split_at_mut(r);
                        (&mut hi[0], &lo[rank])
                    };
                    for k in 0..n {
                        a[k] ^= b[k];
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let k = free_cols.len();
    assert!(k <= 20, "codeword enumeration needs a tiny code");
    let mut words = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let mut word = vec![0u8; n];
        for (bit, &col) in free_cols.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                word[col] = 1;
            }
        }
        for (r, &pc) in pivot_cols.iter().enumerate() {
            let mut parity = 0u8;
            for &fc in &free_cols {
                parity ^= rows[r][fc] & word[fc];
            }
            word[pc] = parity;
        }
        words.push(word);
    }
    words
}

/// Convenience: fresh seeded generator.
pub fn seeded(seed: u64) -> ConstructionRng {
    rng_from_seed(seed)
}

/// Convenience wrapper asserting two metric vectors match.
pub fn assert_metrics_eq(actual: &[MetricValue], expected: &[MetricValue], context: &str) {
    assert_eq!(actual.len(), expected.len(), "{context}: length");
    for (i, (a, e)) in actual.iter().zip(expected.iter()).enumerate() {
        assert_eq!(a, e, "{context}: check node {i}");
    }
}

/// Canonical check that the library sweep agrees with the path oracle on one
/// graph, for both metrics and every variable node.
pub fn check_metric_oracle(g: &TannerGraph, context: &str) {
    for v in 0..g.vn_count() {
        for kind in [MetricKind::Distance, MetricKind::DistanceAce] {
            let fast = bfs_metrics(g, v, kind);
            let slow = oracle_metrics(g, v, kind);
            assert_metrics_eq(&fast, &slow, &format!("{context}, v{v}, {kind:?}"));
        }
    }
}
