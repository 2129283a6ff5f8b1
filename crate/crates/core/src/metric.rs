//! Node-to-node metrics over a Tanner graph.
//!
//! Two metrics are supported. The plain metric is the graph distance (edge
//! count of a shortest path). The paired metric is (distance, ACE), where the
//! ACE of a path is the sum of `degree - 2` over the path's variable nodes,
//! and the value kept is the minimum ACE among all shortest paths. ACE terms
//! use the target degrees from the degree sequence, not realtime degrees.
//!
//! Values carry two sentinels. Plus infinity is the metric between
//! disconnected nodes (both components infinite under the paired metric).
//! Minus infinity marks check nodes that are already adjacent to the variable
//! node of interest; it never takes part in arithmetic.
//!
//! Comparison is lexicographic (distance first, then ACE) and total within
//! one metric kind. Addition is componentwise with plus infinity absorbing.

use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::TannerGraph;

/// Which metric a construction run works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Graph distance only.
    Distance,
    /// (distance, minimum path ACE) pairs.
    DistanceAce,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricError {
    #[error("metric values of different kinds cannot be combined")]
    KindMismatch,
    #[error("arithmetic with a minus-infinity sentinel")]
    NegInfinityArithmetic,
}

/// A metric value: a sentinel or a finite (distance, optional ACE) pair.
///
/// The ACE component is present exactly under [`MetricKind::DistanceAce`]. It
/// is signed because degree-one variable nodes contribute `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricValue {
    NegInfinity,
    Finite { distance: u64, ace: Option<i64> },
    Infinity,
}

impl MetricValue {
    pub fn finite(kind: MetricKind, distance: u64, ace: i64) -> Self {
        match kind {
            MetricKind::Distance => MetricValue::Finite {
                distance,
                ace: None,
            },
            MetricKind::DistanceAce => MetricValue::Finite {
                distance,
                ace: Some(ace),
            },
        }
    }

    /// The constant 0: zero distance, zero ACE.
    pub fn zero(kind: MetricKind) -> Self {
        Self::finite(kind, 0, 0)
    }

    /// The constant 1: one edge, zero ACE. Adding it converts a path metric
    /// into the metric of the cycle closed by one more edge.
    pub fn one(kind: MetricKind) -> Self {
        Self::finite(kind, 1, 0)
    }

    /// The constant attached to variable node `v`: a zero-length path sitting
    /// on `v` already carries `degree(v) - 2` of ACE.
    pub fn zero_for_vn(kind: MetricKind, target_degree: usize) -> Self {
        Self::finite(kind, 0, target_degree as i64 - 2)
    }

    /// One edge ending at variable node `v`: distance 1, ACE `degree(v) - 2`.
    pub fn one_for_vn(kind: MetricKind, target_degree: usize) -> Self {
        Self::finite(kind, 1, target_degree as i64 - 2)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, MetricValue::Finite { .. })
    }

    /// Distance component of a finite value.
    pub fn distance(&self) -> Option<u64> {
        match self {
            MetricValue::Finite { distance, .. } => Some(*distance),
            _ => None,
        }
    }

    /// ACE component of a finite paired value.
    pub fn ace(&self) -> Option<i64> {
        match self {
            MetricValue::Finite { ace, .. } => *ace,
            _ => None,
        }
    }

    /// Total order: minus infinity below everything, plus infinity above
    /// everything, finite values lexicographic. Mixing finite values of the
    /// two kinds is an error.
    pub fn compare(&self, other: &MetricValue) -> Result<Ordering, MetricError> {
        use MetricValue::*;
        match (self, other) {
            (NegInfinity, NegInfinity) => Ok(Ordering::Equal),
            (NegInfinity, _) => Ok(Ordering::Less),
            (_, NegInfinity) => Ok(Ordering::Greater),
            (Infinity, Infinity) => Ok(Ordering::Equal),
            (Infinity, _) => Ok(Ordering::Greater),
            (_, Infinity) => Ok(Ordering::Less),
            (
                Finite {
                    distance: d0,
                    ace: a0,
                },
                Finite {
                    distance: d1,
                    ace: a1,
                },
            ) => {
                if a0.is_some() != a1.is_some() {
                    return Err(MetricError::KindMismatch);
                }
                Ok(d0.cmp(d1).then_with(|| a0.cmp(a1)))
            }
        }
    }

    /// Componentwise addition. Plus infinity absorbs; minus infinity is
    /// rejected because no algorithm here ever needs it.
    pub fn add(&self, other: &MetricValue) -> Result<MetricValue, MetricError> {
        use MetricValue::*;
        match (self, other) {
            (NegInfinity, _) | (_, NegInfinity) => Err(MetricError::NegInfinityArithmetic),
            (Infinity, _) | (_, Infinity) => Ok(Infinity),
            (
                Finite {
                    distance: d0,
                    ace: a0,
                },
                Finite {
                    distance: d1,
                    ace: a1,
                },
            ) => {
                if a0.is_some() != a1.is_some() {
                    return Err(MetricError::KindMismatch);
                }
                Ok(Finite {
                    distance: d0 + d1,
                    ace: a0.and_then(|x| a1.map(|y| x + y)),
                })
            }
        }
    }
}

impl std::fmt::Display for MetricValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricValue::NegInfinity => write!(f, "-inf"),
            MetricValue::Infinity => write!(f, "inf"),
            MetricValue::Finite {
                distance,
                ace: None,
            } => write!(f, "{distance}"),
            MetricValue::Finite {
                distance,
                ace: Some(a),
            } => write!(f, "({distance}, {a})"),
        }
    }
}

/// Comparison helper for code paths where both values are known to share a
/// kind (everything produced inside one construction run does).
pub(crate) fn cmp_same_kind(a: &MetricValue, b: &MetricValue) -> Ordering {
    a.compare(b).expect("metric values of one run share a kind")
}

pub(crate) fn min_same_kind(a: MetricValue, b: MetricValue) -> MetricValue {
    if cmp_same_kind(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

pub(crate) fn max_same_kind(a: MetricValue, b: MetricValue) -> MetricValue {
    if cmp_same_kind(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Reusable buffers for the breadth-first sweep. Visited state is tracked
/// with an epoch stamp so repeated sweeps skip the O(nodes) clear.
#[derive(Debug, Clone)]
pub(crate) struct BfsScratch {
    stamp: Vec<u32>,
    epoch: u32,
    dist: Vec<u32>,
    ace: Vec<i64>,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub(crate) fn new(node_count: usize) -> Self {
        BfsScratch {
            stamp: vec![0; node_count],
            epoch: 0,
            dist: vec![0; node_count],
            ace: vec![0; node_count],
            queue: Vec::with_capacity(node_count),
        }
    }

    fn begin(&mut self, node_count: usize) {
        if self.stamp.len() < node_count {
            self.stamp.resize(node_count, 0);
            self.dist.resize(node_count, 0);
            self.ace.resize(node_count, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.queue.clear();
    }

    #[inline]
    fn is_visited(&self, node: usize) -> bool {
        self.stamp[node] == self.epoch
    }

    #[inline]
    fn visit(&mut self, node: usize, dist: u32, ace: i64) {
        self.stamp[node] = self.epoch;
        self.dist[node] = dist;
        self.ace[node] = ace;
    }

    /// Distance from the sweep origin, if reached.
    pub(crate) fn distance_of(&self, node: usize) -> Option<u32> {
        self.is_visited(node).then(|| self.dist[node])
    }
}

/// Runs the sweep from variable node `v` and leaves per-node labels in
/// `scratch`. Node indexing is combined: check node `i` is node `i`, variable
/// node `j` is node `m + j`. `skip_edge` hides one edge from traversal, which
/// is how shortest cycles through an existing edge are measured.
///
/// Labels are exact: a first-in-first-out queue visits nodes level by level,
/// and a node re-reached at its own distance keeps the smaller accumulated
/// ACE. All predecessors of a node sit one level earlier, so every node's ACE
/// is final before the node itself is expanded.
pub(crate) fn bfs_sweep(
    g: &TannerGraph,
    v: usize,
    skip_edge: Option<(usize, usize)>,
    scratch: &mut BfsScratch,
) {
    let m = g.cn_count();
    scratch.begin(g.node_count());
    let origin = m + v;
    scratch.visit(origin, 0, g.target_degree(v) as i64 - 2);
    scratch.queue.push(origin as u32);

    let mut head = 0;
    while head < scratch.queue.len() {
        let node = scratch.queue[head] as usize;
        head += 1;
        let (ndist, nace) = (scratch.dist[node], scratch.ace[node]);
        if node >= m {
            // Variable node: step to its check nodes, ACE unchanged.
            let vn = node - m;
            for &cn in g.vn_neighbors(vn) {
                if skip_edge == Some((cn, vn)) {
                    continue;
                }
                relax(scratch, cn, ndist + 1, nace);
            }
        } else {
            // Check node: step to its variable nodes, each adds degree - 2.
            let cn = node;
            for &vn in g.cn_neighbors(cn) {
                if skip_edge == Some((cn, vn)) {
                    continue;
                }
                let ace = nace + g.target_degree(vn) as i64 - 2;
                relax(scratch, m + vn, ndist + 1, ace);
            }
        }
    }
}

#[inline]
fn relax(scratch: &mut BfsScratch, node: usize, dist: u32, ace: i64) {
    if !scratch.is_visited(node) {
        scratch.visit(node, dist, ace);
        scratch.queue.push(node as u32);
    } else if scratch.dist[node] == dist && ace < scratch.ace[node] {
        scratch.ace[node] = ace;
    }
}

/// Reads the metric from check node `cn` to the sweep origin out of a
/// finished sweep.
pub(crate) fn metric_from_scratch(
    scratch: &BfsScratch,
    cn: usize,
    kind: MetricKind,
) -> MetricValue {
    match scratch.distance_of(cn) {
        None => MetricValue::Infinity,
        Some(d) => MetricValue::finite(kind, u64::from(d), scratch.ace[cn]),
    }
}

/// One entry of a check-node-to-check-node distance row: shortest distance
/// and minimum path ACE over the interior variable nodes. `dist == u32::MAX`
/// means unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RowEntry {
    pub dist: u32,
    pub ace: i64,
}

pub(crate) const ROW_UNREACHED: RowEntry = RowEntry {
    dist: u32::MAX,
    ace: i64::MAX,
};

impl RowEntry {
    /// Lexicographic minimum; unreachable sorts last.
    #[inline]
    pub fn min(self, other: RowEntry) -> RowEntry {
        if (self.dist, self.ace) <= (other.dist, other.ace) {
            self
        } else {
            other
        }
    }
}

/// Shortest distances (and minimum interior path ACE) from check node
/// `source` to every check node, measured with variable node `skip_vn`
/// deleted from the graph. Paths between check nodes never legitimately pass
/// through the variable node whose edges are being hypothesized, so these
/// rows compose exactly: the metric from that variable node to `c_k` under
/// any set of hypothetical edges is `1 + min` over its (real plus
/// hypothetical) neighbours' row entries at `k`.
pub(crate) fn cn_row_excluding_vn(
    g: &TannerGraph,
    source: usize,
    skip_vn: usize,
    scratch: &mut BfsScratch,
    out: &mut [RowEntry],
) {
    let m = g.cn_count();
    scratch.begin(g.node_count());
    scratch.visit(source, 0, 0);
    scratch.queue.push(source as u32);
    let mut head = 0;
    while head < scratch.queue.len() {
        let node = scratch.queue[head] as usize;
        head += 1;
        let (ndist, nace) = (scratch.dist[node], scratch.ace[node]);
        if node >= m {
            let vn = node - m;
            for &cn in g.vn_neighbors(vn) {
                relax(scratch, cn, ndist + 1, nace);
            }
        } else {
            for &vn in g.cn_neighbors(node) {
                if vn == skip_vn {
                    continue;
                }
                let ace = nace + g.target_degree(vn) as i64 - 2;
                relax(scratch, m + vn, ndist + 1, ace);
            }
        }
    }
    for (cn, slot) in out.iter_mut().enumerate().take(m) {
        *slot = match scratch.distance_of(cn) {
            Some(d) => RowEntry {
                dist: d,
                ace: scratch.ace[cn],
            },
            None => ROW_UNREACHED,
        };
    }
}

/// Metrics from every check node to variable node `v`: entry `i` is the
/// metric between `c_i` and `v` under the current graph, plus infinity for
/// unreachable check nodes. Runs in O(nodes + edges).
pub fn bfs_metrics(g: &TannerGraph, v: usize, kind: MetricKind) -> Vec<MetricValue> {
    let mut scratch = BfsScratch::new(g.node_count());
    bfs_metrics_with(g, v, kind, None, &mut scratch)
}

pub(crate) fn bfs_metrics_with(
    g: &TannerGraph,
    v: usize,
    kind: MetricKind,
    skip_edge: Option<(usize, usize)>,
    scratch: &mut BfsScratch,
) -> Vec<MetricValue> {
    bfs_sweep(g, v, skip_edge, scratch);
    (0..g.cn_count())
        .map(|cn| metric_from_scratch(scratch, cn, kind))
        .collect()
}
