//! Post-hoc cycle-structure analysis.
//!
//! Everything here treats a finished graph as read-only: local girths of
//! nodes and edges, the graph girth, the ACE spectrum, the distribution of
//! variable-node local girths, and an exhaustive cycle enumerator that the
//! test suites use as an independent oracle.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::TannerGraph;
use crate::metric::{bfs_metrics_with, min_same_kind, BfsScratch, MetricKind, MetricValue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("edge (c{cn}, v{vn}) is not in the graph")]
    MissingEdge { cn: usize, vn: usize },
    #[error(
        "graph too large for exhaustive cycle enumeration ({nodes} nodes, max length {max_len})"
    )]
    InstanceTooLarge { nodes: usize, max_len: usize },
    #[error("spectrum depth must be at least 1")]
    ZeroDepth,
}

/// Metric of the shortest cycle through variable node `v`; plus infinity when
/// no cycle passes through it. Under the paired metric the ACE component is
/// the smallest ACE among those shortest cycles.
pub fn local_girth_vn(g: &TannerGraph, v: usize, kind: MetricKind) -> MetricValue {
    let mut scratch = BfsScratch::new(g.node_count());
    local_girth_vn_with(g, v, kind, &mut scratch)
}

pub(crate) fn local_girth_vn_with(
    g: &TannerGraph,
    v: usize,
    kind: MetricKind,
    scratch: &mut BfsScratch,
) -> MetricValue {
    // Every cycle through v uses two of its incident edges, so the minimum
    // over per-edge shortest cycles is exactly the shortest cycle through v.
    let mut best = MetricValue::Infinity;
    for &cn in g.vn_neighbors(v) {
        let girth = edge_girth_unchecked(g, cn, v, kind, scratch);
        best = min_same_kind(best, girth);
    }
    best
}

/// Metric of the shortest cycle through the edge `(cn, v)`.
pub fn local_girth_edge(
    g: &TannerGraph,
    cn: usize,
    v: usize,
    kind: MetricKind,
) -> Result<MetricValue, AnalysisError> {
    if !g.has_edge(cn, v) {
        return Err(AnalysisError::MissingEdge { cn, vn: v });
    }
    let mut scratch = BfsScratch::new(g.node_count());
    Ok(edge_girth_unchecked(g, cn, v, kind, &mut scratch))
}

/// Shortest cycle through an edge = shortest path between its endpoints that
/// avoids the edge, closed by the edge itself.
fn edge_girth_unchecked(
    g: &TannerGraph,
    cn: usize,
    v: usize,
    kind: MetricKind,
    scratch: &mut BfsScratch,
) -> MetricValue {
    let metrics = bfs_metrics_with(g, v, kind, Some((cn, v)), scratch);
    metrics[cn]
        .add(&MetricValue::one(kind))
        .expect("path metric is never minus infinity")
}

/// Metric of the shortest cycle anywhere in the graph.
pub fn girth(g: &TannerGraph, kind: MetricKind) -> MetricValue {
    (0..g.vn_count())
        .into_par_iter()
        .map(|v| local_girth_vn(g, v, kind))
        .reduce(|| MetricValue::Infinity, min_same_kind)
}

/// One slot of an ACE spectrum: the minimum cycle ACE at one cycle length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumEntry {
    Finite(i64),
    Infinite,
}

impl SpectrumEntry {
    fn cmp_entry(&self, other: &SpectrumEntry) -> Ordering {
        use SpectrumEntry::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            SpectrumEntry::Finite(a) => Some(*a),
            SpectrumEntry::Infinite => None,
        }
    }
}

impl std::fmt::Display for SpectrumEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumEntry::Finite(a) => write!(f, "{a}"),
            SpectrumEntry::Infinite => write!(f, "inf"),
        }
    }
}

/// ACE spectrum of depth `d`: entry `i` (0-based) is the minimum ACE over all
/// cycles of length `2(i + 1)`, or infinite when the graph has none.
///
/// Entry 0 (length-2 cycles) is always infinite in a graph without parallel
/// edges; the slot is kept so spectra line up with the usual presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AceSpectrum {
    entries: Vec<SpectrumEntry>,
}

impl AceSpectrum {
    pub fn from_entries(entries: Vec<SpectrumEntry>) -> Self {
        AceSpectrum { entries }
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// Entry for cycles of length `len` (even, between 2 and 2*depth).
    pub fn entry_for_length(&self, len: usize) -> SpectrumEntry {
        self.entries[len / 2 - 1]
    }

    /// Lexicographic comparison; a greater spectrum is the better one.
    pub fn compare(&self, other: &AceSpectrum) -> Ordering {
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let ord = a.cmp_entry(b);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.entries.len().cmp(&other.entries.len())
    }
}

impl std::fmt::Display for AceSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Minimum cycle ACE per even cycle length up to `2 * d_max`.
///
/// Cycles are enumerated by a depth-bounded search rooted at each check node:
/// a cycle is visited at its lowest-indexed check node only, walking in the
/// direction that leaves through the lower-indexed of the two adjacent
/// variable nodes. Branches that cannot return to the root within the length
/// budget are cut using exact distances from one sweep around the root.
pub fn ace_spectrum(g: &TannerGraph, d_max: usize) -> Result<AceSpectrum, AnalysisError> {
    if d_max == 0 {
        return Err(AnalysisError::ZeroDepth);
    }
    let max_len = 2 * d_max;
    let entries = (0..g.cn_count())
        .into_par_iter()
        .map(|root| {
            let mut walker = CycleWalker::new(g, max_len);
            walker.run(root);
            walker.best
        })
        .reduce(
            || vec![None; d_max],
            |mut acc, item| {
                for (slot, v) in acc.iter_mut().zip(item) {
                    *slot = match (*slot, v) {
                        (None, x) => x,
                        (x, None) => x,
                        (Some(a), Some(b)) => Some(a.min(b)),
                    };
                }
                acc
            },
        );
    Ok(AceSpectrum {
        entries: entries
            .into_iter()
            .map(|e| e.map_or(SpectrumEntry::Infinite, SpectrumEntry::Finite))
            .collect(),
    })
}

/// Depth-first enumeration state for `ace_spectrum`.
struct CycleWalker<'a> {
    g: &'a TannerGraph,
    max_len: usize,
    /// best[i] = min ACE seen for cycles of length 2(i+1)
    best: Vec<Option<i64>>,
    on_path: Vec<bool>,
    /// Distance of each combined node from the current root, capped search.
    dist_to_root: Vec<u32>,
}

const FAR: u32 = u32::MAX;

impl<'a> CycleWalker<'a> {
    fn new(g: &'a TannerGraph, max_len: usize) -> Self {
        CycleWalker {
            g,
            max_len,
            best: vec![None; max_len / 2],
            on_path: vec![false; g.node_count()],
            dist_to_root: vec![FAR; g.node_count()],
        }
    }

    fn run(&mut self, root: usize) {
        if self.g.cn_degree(root) < 2 {
            return;
        }
        self.fill_root_distances(root);
        let m = self.g.cn_count();
        self.on_path[root] = true;
        for idx in 0..self.g.cn_degree(root) {
            let vn = self.g.cn_neighbors(root)[idx];
            let ace0 = self.g.target_degree(vn) as i64 - 2;
            self.on_path[m + vn] = true;
            self.extend_from_vn(root, vn, 1, ace0, vn);
            self.on_path[m + vn] = false;
        }
        self.on_path[root] = false;
    }

    /// Exact edge distances from the root check node over the whole graph.
    fn fill_root_distances(&mut self, root: usize) {
        let m = self.g.cn_count();
        self.dist_to_root.fill(FAR);
        let mut queue = VecDeque::new();
        self.dist_to_root[root] = 0;
        queue.push_back(root);
        while let Some(node) = queue.pop_front() {
            let d = self.dist_to_root[node];
            if d as usize >= self.max_len {
                continue;
            }
            if node < m {
                for &vn in self.g.cn_neighbors(node) {
                    if self.dist_to_root[m + vn] == FAR {
                        self.dist_to_root[m + vn] = d + 1;
                        queue.push_back(m + vn);
                    }
                }
            } else {
                for &cn in self.g.vn_neighbors(node - m) {
                    if self.dist_to_root[cn] == FAR {
                        self.dist_to_root[cn] = d + 1;
                        queue.push_back(cn);
                    }
                }
            }
        }
    }

    /// Path so far: root -- ... -- variable node `vn`, `len` edges long with
    /// accumulated ACE `ace`. `first_vn` pins the travel direction: a cycle
    /// is recorded only when the closing variable node has a larger index.
    fn extend_from_vn(&mut self, root: usize, vn: usize, len: usize, ace: i64, first_vn: usize) {
        let m = self.g.cn_count();
        for idx in 0..self.g.vn_degree(vn) {
            let cn = self.g.vn_neighbors(vn)[idx];
            if cn == root {
                if len >= 3 && vn > first_vn {
                    let slot = (len + 1) / 2 - 1;
                    let entry = &mut self.best[slot];
                    *entry = Some(entry.map_or(ace, |b: i64| b.min(ace)));
                }
                continue;
            }
            if cn < root || self.on_path[cn] {
                continue;
            }
            // After stepping to cn the path has len + 1 edges and still needs
            // at least dist(cn, root) more to close.
            let cn_len = len + 1;
            let d = self.dist_to_root[cn];
            if d == FAR || cn_len + d as usize > self.max_len {
                continue;
            }
            self.on_path[cn] = true;
            for jdx in 0..self.g.cn_degree(cn) {
                let next_vn = self.g.cn_neighbors(cn)[jdx];
                if self.on_path[m + next_vn] {
                    continue;
                }
                let vn_len = cn_len + 1;
                let dv = self.dist_to_root[m + next_vn];
                if dv == FAR || vn_len + dv as usize > self.max_len {
                    continue;
                }
                let next_ace = ace + self.g.target_degree(next_vn) as i64 - 2;
                self.on_path[m + next_vn] = true;
                self.extend_from_vn(root, next_vn, vn_len, next_ace, first_vn);
                self.on_path[m + next_vn] = false;
            }
            self.on_path[cn] = false;
        }
    }
}

/// Key of one VNLGD term. `Finite` sorts before `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GirthBin {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for GirthBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GirthBin::Finite(v) => write!(f, "{v}"),
            GirthBin::Infinite => write!(f, "inf"),
        }
    }
}

/// Distribution of variable-node local girths under the distance metric.
///
/// Stored as exact counts; fractions are derived on demand. Acyclic variable
/// nodes land in an explicit infinite bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vnlgd {
    n_vns: usize,
    counts: BTreeMap<GirthBin, usize>,
}

impl Vnlgd {
    pub fn from_local_girths<I: IntoIterator<Item = GirthBin>>(girths: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut n_vns = 0;
        for bin in girths {
            *counts.entry(bin).or_insert(0) += 1;
            n_vns += 1;
        }
        Vnlgd { n_vns, counts }
    }

    pub fn vn_count(&self) -> usize {
        self.n_vns
    }

    /// Nonzero terms in ascending girth order, infinite bin last.
    pub fn terms(&self) -> impl Iterator<Item = (GirthBin, f64)> + '_ {
        self.counts
            .iter()
            .map(move |(&bin, &c)| (bin, c as f64 / self.n_vns as f64))
    }

    pub fn fraction(&self, bin: GirthBin) -> f64 {
        self.counts
            .get(&bin)
            .map_or(0.0, |&c| c as f64 / self.n_vns as f64)
    }

    /// Lexicographic comparison over ascending girth values, comparing the
    /// fraction at each value and treating absent terms as zero; the smaller
    /// distribution is the better one. Fractions are compared exactly via
    /// cross-multiplied counts, so distributions over different code lengths
    /// compare cleanly.
    pub fn compare(&self, other: &Vnlgd) -> Ordering {
        let mut keys: Vec<GirthBin> = self
            .counts
            .keys()
            .chain(other.counts.keys())
            .copied()
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            let a = *self.counts.get(&key).unwrap_or(&0) as u128;
            let b = *other.counts.get(&key).unwrap_or(&0) as u128;
            match (a * other.n_vns as u128).cmp(&(b * self.n_vns as u128)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl std::fmt::Display for Vnlgd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "0");
        }
        for (i, (bin, frac)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{frac:.4}x^{bin}")?;
        }
        Ok(())
    }
}

/// Local-girth distribution of all variable nodes (distance metric).
pub fn vnlgd(g: &TannerGraph) -> Vnlgd {
    let girths: Vec<GirthBin> = (0..g.vn_count())
        .into_par_iter()
        .map(|v| match local_girth_vn(g, v, MetricKind::Distance) {
            MetricValue::Finite { distance, .. } => GirthBin::Finite(distance),
            _ => GirthBin::Infinite,
        })
        .collect();
    Vnlgd::from_local_girths(girths)
}

/// One simple cycle found by the exhaustive enumerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRecord {
    /// Cycle length in edges (always even).
    pub length: usize,
    /// Sum of `degree - 2` over the cycle's variable nodes (target degrees).
    pub ace: i64,
    /// Check nodes on the cycle, ascending.
    pub cns: Vec<usize>,
    /// Variable nodes on the cycle, ascending.
    pub vns: Vec<usize>,
}

/// Every simple cycle of length at most `max_len`, each reported exactly once.
///
/// This is the independent oracle for the faster analyses above: a plain
/// exhaustive walk with no distance pruning, deduplicated by rooting each
/// cycle at its smallest combined node index and fixing the travel direction.
/// Guarded against instances too large to enumerate.
pub fn brute_force_cycles(
    g: &TannerGraph,
    max_len: usize,
) -> Result<Vec<CycleRecord>, AnalysisError> {
    let nodes = g.node_count();
    if nodes > 26 && max_len > 16 {
        return Err(AnalysisError::InstanceTooLarge { nodes, max_len });
    }
    let mut walker = ExhaustiveWalker {
        g,
        m: g.cn_count(),
        max_len,
        cycles: Vec::new(),
    };
    let mut path = Vec::with_capacity(max_len);
    let mut on_path = vec![false; nodes];
    for root in 0..nodes {
        path.clear();
        path.push(root);
        on_path[root] = true;
        walker.walk(root, root, &mut path, &mut on_path);
        on_path[root] = false;
    }
    Ok(walker.cycles)
}

struct ExhaustiveWalker<'a> {
    g: &'a TannerGraph,
    m: usize,
    max_len: usize,
    cycles: Vec<CycleRecord>,
}

impl<'a> ExhaustiveWalker<'a> {
    fn neighbours(&self, node: usize) -> Vec<usize> {
        if node < self.m {
            self.g
                .cn_neighbors(node)
                .iter()
                .map(|&vn| self.m + vn)
                .collect()
        } else {
            self.g.vn_neighbors(node - self.m).to_vec()
        }
    }

    fn walk(&mut self, root: usize, node: usize, path: &mut Vec<usize>, on_path: &mut [bool]) {
        for next in self.neighbours(node) {
            if next == root {
                // path[1] < last element pins one of the two directions.
                if path.len() >= 4 && path[1] < *path.last().unwrap() {
                    self.record(path);
                }
                continue;
            }
            if next < root || on_path[next] || path.len() >= self.max_len {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            self.walk(root, next, path, on_path);
            on_path[next] = false;
            path.pop();
        }
    }

    fn record(&mut self, path: &[usize]) {
        let mut cns: Vec<usize> = path.iter().copied().filter(|&x| x < self.m).collect();
        let mut vns: Vec<usize> = path
            .iter()
            .copied()
            .filter(|&x| x >= self.m)
            .map(|x| x - self.m)
            .collect();
        cns.sort_unstable();
        vns.sort_unstable();
        let ace = vns
            .iter()
            .map(|&v| self.g.target_degree(v) as i64 - 2)
            .sum();
        self.cycles.push(CycleRecord {
            length: path.len(),
            ace,
            cns,
            vns,
        });
    }
}
