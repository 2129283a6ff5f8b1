//! Progressive edge-growth construction.
//!
//! A code is built one edge at a time. Variable nodes are processed in index
//! order; `v_j` receives its `d_j` edges in `d_j` consecutive stages. Each
//! stage ranks the candidate check nodes and inserts the winning edge.
//!
//! Two selection rules are implemented:
//!
//! * [`Variant::MPega`] ranks candidates by their metric to the current
//!   variable node (largest first), i.e. each new edge closes the longest
//!   cycle currently possible.
//! * [`Variant::MmPega`] looks ahead: with edge-trials `r`, a candidate is
//!   ranked by the best local girth the variable node can still reach after
//!   `r` hypothetical future edges. These r-edge local girths are computed by
//!   a depth-first search over check-node sequences with strictly decreasing
//!   indices, so every candidate subset is visited once. A one-edge lookahead
//!   reduces to the plain rule.
//!
//! Ties fall through to the edge with the largest own local girth, then the
//! candidate with the smallest realtime degree, then one seeded random draw.
//!
//! The search exploits that hypothetical edges are all incident to the one
//! variable node under construction: the metric from that node to any check
//! node decomposes into `1 +` the minimum over its (real and hypothetical)
//! neighbours of check-to-check distances measured with the node deleted.
//! Those distance rows are independent of the node's own edges, so one row
//! per check node serves every lookahead layer of every stage of that
//! variable node. Quasi-cyclic lookahead cannot use the decomposition (orbit
//! copies land elsewhere in the graph) and measures candidates by sweeps on
//! the temporarily lifted graph instead.

use std::cmp::Ordering;
use thiserror::Error;

use crate::graph::{DegreeSequence, GraphError, TannerGraph};
use crate::metric::{
    bfs_sweep, cmp_same_kind, cn_row_excluding_vn, max_same_kind, metric_from_scratch,
    min_same_kind, BfsScratch, MetricKind, MetricValue, RowEntry, ROW_UNREACHED,
};
use crate::qc::{expand_edge_set, QcParams};
use crate::rng::{rng_from_seed, uniform_index, ConstructionRng, Rng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Qc(#[from] crate::qc::QcError),
    #[error("edge trials must be at least 1")]
    ZeroEdgeTrials,
    #[error(
        "lookahead over {needed} edges needs as many unconnected check nodes, found {available}"
    )]
    NotEnoughCandidates { needed: usize, available: usize },
    #[error("no admissible check node for v{vn} at stage {stage}: every circulant block of its column group is occupied")]
    CpmExhausted { vn: usize, stage: usize },
    #[error("internal error: selection produced no survivor")]
    EmptySurvivorSet,
}

/// Which selection rule drives the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Largest-metric selection, no lookahead.
    MPega,
    /// Multi-edge lookahead selection controlled by `edge_trials`.
    MmPega,
}

/// Everything a (non-QC) construction run depends on.
#[derive(Debug, Clone)]
pub struct ConstructionConfig {
    pub m: usize,
    pub n: usize,
    pub degrees: DegreeSequence,
    pub metric: MetricKind,
    /// Lookahead depth `r` for [`Variant::MmPega`]; fixed to 1 internally for
    /// [`Variant::MPega`].
    pub edge_trials: usize,
    pub seed: u64,
    pub variant: Variant,
}

/// Effective lookahead for stage `stage` (1-based) of a degree-`degree`
/// variable node: never look past the edges that remain to be placed.
pub fn effective_edge_trials(edge_trials: usize, degree: usize, stage: usize) -> usize {
    debug_assert!(stage >= 1 && stage <= degree);
    edge_trials.min(degree - stage + 1)
}

/// Output of the lookahead search for one stage.
#[derive(Debug, Clone)]
pub struct MultiEdgeGirths {
    /// Best reachable local girth of the variable node after `r` more edges.
    pub vn_girth: MetricValue,
    /// Per check node: best reachable local girth when that check node takes
    /// one of the `r` slots; minus infinity for already-connected ones.
    pub cn_girths: Vec<MetricValue>,
    /// Per check node: local girth of its own candidate edge measured on the
    /// current graph (lifted copies included in the quasi-cyclic case).
    pub edge_girths: Vec<MetricValue>,
}

/// How the lookahead search cuts branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneMode {
    /// No cuts; reference behaviour.
    Off,
    /// Cut a branch only when it can change neither the variable-node girth
    /// nor any per-check-node girth it can reach. Identical output to `Off`.
    Exact,
    /// Cut every branch that cannot improve the variable-node girth. The
    /// girth, the set of check nodes attaining it, and therefore every
    /// selection are identical to `Off`; per-check-node girths of losing
    /// candidates may come out lower. Used inside construction runs.
    Aggressive,
}

/// The r-edge local girths of all check nodes with respect to variable node
/// `v`, with `PruneMode::Exact` cuts (output identical to an uncut search).
pub fn multi_edge_local_girths(
    g: &TannerGraph,
    v: usize,
    edge_trials: usize,
    kind: MetricKind,
) -> Result<MultiEdgeGirths, ConstructionError> {
    multi_edge_local_girths_with_mode(g, v, edge_trials, kind, PruneMode::Exact)
}

/// As [`multi_edge_local_girths`] with an explicit prune mode.
pub fn multi_edge_local_girths_with_mode(
    g: &TannerGraph,
    v: usize,
    edge_trials: usize,
    kind: MetricKind,
    mode: PruneMode,
) -> Result<MultiEdgeGirths, ConstructionError> {
    let mut graph = g.clone();
    let mut scratch = BfsScratch::new(graph.node_count());
    let mut cache = RowCache::new(graph.cn_count());
    let mut search = LookaheadSearch::new(
        &mut graph,
        v,
        edge_trials,
        kind,
        mode,
        None,
        &mut scratch,
        Some(&mut cache),
    )?;
    Ok(search.run())
}

/// Same search against quasi-cyclic insertion semantics: a candidate's edge
/// girth is measured with its `N - 1` cyclic copies already in place, and a
/// chosen candidate inserts the whole cyclic orbit.
pub fn multi_edge_local_girths_qc(
    g: &TannerGraph,
    v: usize,
    edge_trials: usize,
    kind: MetricKind,
    qc: &QcParams,
    mode: PruneMode,
) -> Result<MultiEdgeGirths, ConstructionError> {
    let mut graph = g.clone();
    let mut scratch = BfsScratch::new(graph.node_count());
    let mut search = LookaheadSearch::new(
        &mut graph,
        v,
        edge_trials,
        kind,
        mode,
        Some(qc),
        &mut scratch,
        None,
    )?;
    Ok(search.run())
}

/// Check-to-check distance rows measured with the current variable node
/// deleted. Rows never depend on that node's own edges, so one cache serves
/// all of its stages.
pub(crate) struct RowCache {
    rows: Vec<Option<Box<[RowEntry]>>>,
}

impl RowCache {
    pub(crate) fn new(m: usize) -> Self {
        RowCache {
            rows: vec![None; m],
        }
    }

    fn ensure(
        &mut self,
        g: &TannerGraph,
        source: usize,
        skip_vn: usize,
        scratch: &mut BfsScratch,
    ) -> &[RowEntry] {
        let slot = &mut self.rows[source];
        if slot.is_none() {
            let mut row = vec![ROW_UNREACHED; g.cn_count()].into_boxed_slice();
            cn_row_excluding_vn(g, source, skip_vn, scratch, &mut row);
            *slot = Some(row);
        }
        slot.as_deref().unwrap()
    }
}

struct LookaheadSearch<'a> {
    graph: &'a mut TannerGraph,
    scratch: &'a mut BfsScratch,
    v: usize,
    r: usize,
    kind: MetricKind,
    mode: PruneMode,
    qc: Option<QcSearchState>,
    /// Row cache for the composed evaluation (non-QC only).
    rows: Option<&'a mut RowCache>,
    /// ACE carried by the variable node itself.
    vn_ace: i64,
    /// Candidate filter fixed for the whole search (adjacency of `v` plus the
    /// circulant-permutation restriction where requested).
    admissible: Vec<bool>,
    /// admissible_below[j] = number of admissible check nodes with index < j.
    admissible_below: Vec<usize>,
    vn_girth: MetricValue,
    cn_girths: Vec<MetricValue>,
    edge_girths: Vec<MetricValue>,
    /// Check nodes of the ancestors of the current search node.
    path: Vec<usize>,
    /// Composed minimum rows, level t = after t hypothetical edges.
    layer_min: Vec<Vec<RowEntry>>,
    /// Plain metric sweeps per layer (quasi-cyclic upper bounds).
    layer_metrics: Vec<Vec<MetricValue>>,
    /// Prefix minima of `cn_girths` over admissible indices; rebuilt after
    /// each completed recursion, used by the `Exact` cut.
    prefix_min: Vec<MetricValue>,
}

struct QcSearchState {
    circulant_size: usize,
    cpm_only: bool,
    /// With the CPM restriction: row groups whose block in the column group
    /// of `v` is occupied, updated as hypothetical orbits come and go.
    row_group_used: Vec<bool>,
}

#[allow(clippy::too_many_arguments)]
impl<'a> LookaheadSearch<'a> {
    fn new(
        graph: &'a mut TannerGraph,
        v: usize,
        edge_trials: usize,
        kind: MetricKind,
        mode: PruneMode,
        qc: Option<&QcParams>,
        scratch: &'a mut BfsScratch,
        rows: Option<&'a mut RowCache>,
    ) -> Result<Self, ConstructionError> {
        if edge_trials == 0 {
            return Err(ConstructionError::ZeroEdgeTrials);
        }
        let m = graph.cn_count();
        let qc_state = qc.map(|q| {
            let groups = m / q.circulant_size;
            let mut used = vec![false; groups];
            if q.cpm_only {
                let col_group = v / q.circulant_size;
                for cn in 0..m {
                    if used[cn / q.circulant_size] {
                        continue;
                    }
                    if graph
                        .cn_neighbors(cn)
                        .iter()
                        .any(|&u| u / q.circulant_size == col_group)
                    {
                        used[cn / q.circulant_size] = true;
                    }
                }
            }
            QcSearchState {
                circulant_size: q.circulant_size,
                cpm_only: q.cpm_only,
                row_group_used: used,
            }
        });

        let admissible: Vec<bool> = (0..m)
            .map(|cn| {
                if graph.has_edge(cn, v) {
                    return false;
                }
                match &qc_state {
                    Some(q) if q.cpm_only => !q.row_group_used[cn / q.circulant_size],
                    _ => true,
                }
            })
            .collect();
        let available = admissible.iter().filter(|&&a| a).count();
        if available < edge_trials {
            return Err(ConstructionError::NotEnoughCandidates {
                needed: edge_trials,
                available,
            });
        }
        let mut admissible_below = vec![0usize; m + 1];
        for j in 0..m {
            admissible_below[j + 1] = admissible_below[j] + usize::from(admissible[j]);
        }

        let composed = qc_state.is_none();
        let mut search = LookaheadSearch {
            vn_ace: graph.target_degree(v) as i64 - 2,
            graph,
            scratch,
            v,
            r: edge_trials,
            kind,
            mode,
            qc: qc_state,
            rows,
            admissible,
            admissible_below,
            vn_girth: MetricValue::NegInfinity,
            cn_girths: vec![MetricValue::NegInfinity; m],
            edge_girths: vec![MetricValue::NegInfinity; m],
            path: Vec::with_capacity(edge_trials),
            layer_min: if composed {
                vec![vec![ROW_UNREACHED; m]; edge_trials]
            } else {
                Vec::new()
            },
            layer_metrics: if composed {
                Vec::new()
            } else {
                vec![vec![MetricValue::Infinity; m]; edge_trials]
            },
            prefix_min: vec![MetricValue::Infinity; m + 1],
        };
        if composed {
            search.init_level_zero();
        }
        Ok(search)
    }

    /// Level 0 of the composed rows: minimum over the real neighbours of `v`.
    fn init_level_zero(&mut self) {
        let Self {
            graph,
            scratch,
            rows,
            layer_min,
            v,
            ..
        } = self;
        let cache = rows.as_mut().expect("composed mode has a row cache");
        let level0 = &mut layer_min[0];
        for idx in 0..graph.vn_degree(*v) {
            let x = graph.vn_neighbors(*v)[idx];
            let row = cache.ensure(graph, x, *v, scratch);
            for (slot, &entry) in level0.iter_mut().zip(row.iter()) {
                *slot = slot.min(entry);
            }
        }
    }

    fn run(&mut self) -> MultiEdgeGirths {
        self.rebuild_prefix_min();
        let m = self.graph.cn_count();
        self.layer(1, m, MetricValue::Infinity);
        debug_assert_eq!(
            self.cn_girths
                .iter()
                .copied()
                .fold(MetricValue::NegInfinity, max_same_kind),
            self.vn_girth,
        );
        MultiEdgeGirths {
            vn_girth: self.vn_girth,
            cn_girths: std::mem::take(&mut self.cn_girths),
            edge_girths: std::mem::take(&mut self.edge_girths),
        }
    }

    /// Metric sweep from `v` on the current working graph into the layer
    /// buffer `idx` (quasi-cyclic mode only).
    fn fill_metrics(&mut self, idx: usize) {
        bfs_sweep(self.graph, self.v, None, self.scratch);
        let m = self.graph.cn_count();
        for cn in 0..m {
            self.layer_metrics[idx][cn] = metric_from_scratch(self.scratch, cn, self.kind);
        }
    }

    fn rebuild_prefix_min(&mut self) {
        let m = self.graph.cn_count();
        let mut acc = MetricValue::Infinity;
        for j in 0..=m {
            self.prefix_min[j] = acc;
            if j < m && self.admissible[j] {
                acc = min_same_kind(acc, self.cn_girths[j]);
            }
        }
    }

    fn one(&self) -> MetricValue {
        MetricValue::one(self.kind)
    }

    /// Candidate edge girth out of a composed row entry: the variable node's
    /// metric to the check node is one more than the row value, and closing
    /// the candidate edge adds one more.
    fn girth_from_entry(&self, entry: RowEntry) -> MetricValue {
        if entry.dist == u32::MAX {
            MetricValue::Infinity
        } else {
            MetricValue::finite(
                self.kind,
                u64::from(entry.dist) + 2,
                self.vn_ace + entry.ace,
            )
        }
    }

    /// Edge girth of candidate `j` against the live working graph with its
    /// cyclic copies inserted first, so in-orbit cycles are seen.
    fn exact_edge_girth_qc(&mut self, j: usize) -> MetricValue {
        let n_circ = self.qc.as_ref().unwrap().circulant_size;
        let set = expand_edge_set(j, self.v, n_circ);
        for &(c, u) in &set[1..] {
            self.graph.push_edge_unchecked(c, u);
        }
        bfs_sweep(self.graph, self.v, None, self.scratch);
        let f = metric_from_scratch(self.scratch, j, self.kind);
        for &(c, u) in set[1..].iter().rev() {
            self.graph.pop_edge_unchecked(c, u);
        }
        f.add(&self.one()).expect("metric is never minus infinity")
    }

    /// Can results bounded by `cap` still change any state this search node
    /// may write? Ancestors, the candidate itself, every admissible smaller
    /// index, and the lookahead girth are the reachable targets.
    fn improvable(&self, j: usize, cap: MetricValue) -> bool {
        if cmp_same_kind(&self.vn_girth, &cap) == Ordering::Less {
            return true;
        }
        if cmp_same_kind(&self.cn_girths[j], &cap) == Ordering::Less {
            return true;
        }
        if self
            .path
            .iter()
            .any(|&x| cmp_same_kind(&self.cn_girths[x], &cap) == Ordering::Less)
        {
            return true;
        }
        cmp_same_kind(&self.prefix_min[j], &cap) == Ordering::Less
    }

    fn gate(&self, j: usize, value: MetricValue) -> bool {
        match self.mode {
            PruneMode::Off => true,
            PruneMode::Exact => self.improvable(j, value),
            PruneMode::Aggressive => cmp_same_kind(&value, &self.vn_girth) != Ordering::Less,
        }
    }

    /// Deepest-layer variant of the improvability test: a value bounded by
    /// `cap` can only matter if it beats the girth, the candidate's own
    /// entry, or an ancestor's entry.
    fn update_would_matter(&self, j: usize, cap: MetricValue) -> bool {
        match self.mode {
            PruneMode::Off => true,
            PruneMode::Exact => {
                cmp_same_kind(&self.vn_girth, &cap) == Ordering::Less
                    || cmp_same_kind(&self.cn_girths[j], &cap) == Ordering::Less
                    || self
                        .path
                        .iter()
                        .any(|&x| cmp_same_kind(&self.cn_girths[x], &cap) == Ordering::Less)
            }
            PruneMode::Aggressive => cmp_same_kind(&cap, &self.vn_girth) != Ordering::Less,
        }
    }

    /// One search layer: enumerate admissible candidates below `bound`.
    /// `running_min` is the minimum edge girth along the path so far. Returns
    /// the best completed value found in this subtree.
    ///
    /// Candidates recurse in descending-girth order: the first full chain
    /// then behaves like a greedy pick and settles the lookahead girth early,
    /// which lets the girth gate cut the remaining branches cheaply.
    fn layer(&mut self, t: usize, bound: usize, running_min: MetricValue) -> MetricValue {
        let mut best_completed = MetricValue::NegInfinity;
        let deepest = t == self.r;
        let composed = self.qc.is_none();

        // (candidate, girth or upper bound, bound is exact)
        let mut candidates: Vec<(usize, MetricValue, bool)> = Vec::with_capacity(bound);
        for j in 0..bound {
            if !self.admissible[j] {
                continue;
            }
            if let Some(q) = &self.qc {
                if q.cpm_only && q.row_group_used[j / q.circulant_size] {
                    continue;
                }
            }
            let (girth_j, exact) = if composed {
                (self.girth_from_entry(self.layer_min[t - 1][j]), true)
            } else if t == 1 {
                (self.exact_edge_girth_qc(j), true)
            } else {
                let ub = self.layer_metrics[t - 1][j]
                    .add(&self.one())
                    .expect("metric is never minus infinity");
                (ub, false)
            };
            if t == 1 {
                self.edge_girths[j] = girth_j;
            }
            candidates.push((j, girth_j, exact));
        }

        if deepest {
            for (j, girth_j, exact) in candidates {
                let mut g_next = min_same_kind(running_min, girth_j);
                if !exact {
                    if !self.update_would_matter(j, g_next) {
                        continue;
                    }
                    let exact_girth = self.exact_edge_girth_qc(j);
                    g_next = min_same_kind(running_min, exact_girth);
                }
                self.vn_girth = max_same_kind(self.vn_girth, g_next);
                self.cn_girths[j] = max_same_kind(self.cn_girths[j], g_next);
                best_completed = max_same_kind(best_completed, g_next);
            }
            return best_completed;
        }

        candidates.sort_by(|a, b| cmp_same_kind(&b.1, &a.1).then(a.0.cmp(&b.0)));
        for (j, girth_j, exact) in candidates {
            if self.admissible_below[j] < self.r - t {
                continue;
            }
            let mut g_next = min_same_kind(running_min, girth_j);
            if !self.gate(j, g_next) {
                continue;
            }
            if !exact {
                let exact_girth = self.exact_edge_girth_qc(j);
                g_next = min_same_kind(running_min, exact_girth);
                if !self.gate(j, g_next) {
                    continue;
                }
            }

            self.descend(j, t);
            self.path.push(j);
            let completed = self.layer(t + 1, j, g_next);
            self.path.pop();
            self.ascend(j);

            self.cn_girths[j] = max_same_kind(self.cn_girths[j], completed);
            best_completed = max_same_kind(best_completed, completed);
            if self.mode == PruneMode::Exact {
                self.rebuild_prefix_min();
            }
        }
        best_completed
    }

    /// Materializes candidate `j` for the next layer: composes the next
    /// minimum row, or (quasi-cyclic) inserts the orbit and sweeps.
    fn descend(&mut self, j: usize, t: usize) {
        if self.qc.is_none() {
            let Self {
                graph,
                scratch,
                rows,
                layer_min,
                v,
                ..
            } = self;
            let cache = rows.as_mut().expect("composed mode has a row cache");
            let row = cache.ensure(graph, j, *v, scratch);
            let (before, after) = layer_min.split_at_mut(t);
            let prev = &before[t - 1];
            let next = &mut after[0];
            for ((slot, &p), &r) in next.iter_mut().zip(prev.iter()).zip(row.iter()) {
                *slot = p.min(r);
            }
        } else {
            let (n_circ, cpm) = {
                let q = self.qc.as_ref().unwrap();
                (q.circulant_size, q.cpm_only)
            };
            for &(c, u) in &expand_edge_set(j, self.v, n_circ) {
                self.graph.push_edge_unchecked(c, u);
            }
            if cpm {
                self.qc.as_mut().unwrap().row_group_used[j / n_circ] = true;
            }
            self.fill_metrics(t);
        }
    }

    fn ascend(&mut self, j: usize) {
        if let Some(q) = &mut self.qc {
            let n_circ = q.circulant_size;
            if q.cpm_only {
                q.row_group_used[j / n_circ] = false;
            }
            for &(c, u) in expand_edge_set(j, self.v, n_circ).iter().rev() {
                self.graph.pop_edge_unchecked(c, u);
            }
        }
    }
}

/// Survivor sets recorded while a stage's selection narrows down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionOutcome {
    pub selected: usize,
    /// Survivors of the girth criterion (lookahead girth, or plain metric
    /// under [`Variant::MPega`]).
    pub after_girth: Vec<usize>,
    /// Survivors after the own-edge-girth tie-break.
    pub after_edge_girth: Vec<usize>,
    /// Survivors after the smallest-degree tie-break; a final random draw
    /// picks among these.
    pub after_degree: Vec<usize>,
}

fn argmax_metric<I: Iterator<Item = (usize, MetricValue)>>(items: I) -> Vec<usize> {
    let mut best = MetricValue::NegInfinity;
    let mut winners = Vec::new();
    for (idx, value) in items {
        match cmp_same_kind(&value, &best) {
            Ordering::Greater => {
                best = value;
                winners.clear();
                winners.push(idx);
            }
            Ordering::Equal => winners.push(idx),
            Ordering::Less => {}
        }
    }
    winners
}

fn filter_min_degree(g: &TannerGraph, survivors: &[usize]) -> Vec<usize> {
    let best = survivors
        .iter()
        .map(|&cn| g.cn_degree(cn))
        .min()
        .expect("survivor set never empty");
    survivors
        .iter()
        .copied()
        .filter(|&cn| g.cn_degree(cn) == best)
        .collect()
}

fn pick(rng: &mut impl Rng, survivors: &[usize]) -> usize {
    if survivors.len() == 1 {
        survivors[0]
    } else {
        survivors[uniform_index(rng, survivors.len())]
    }
}

/// Largest-metric selection: among check nodes not yet connected to `v` (and
/// passing `admissible` where given), keep those with the largest metric,
/// then the smallest realtime degree, then draw one at random.
pub fn select_cn_single_edge(
    g: &TannerGraph,
    v: usize,
    metrics: &[MetricValue],
    rng: &mut impl Rng,
) -> Result<usize, ConstructionError> {
    select_cn_single_edge_filtered(g, v, metrics, None, rng).map(|o| o.selected)
}

pub(crate) fn select_cn_single_edge_filtered(
    g: &TannerGraph,
    v: usize,
    metrics: &[MetricValue],
    admissible: Option<&[bool]>,
    rng: &mut impl Rng,
) -> Result<SelectionOutcome, ConstructionError> {
    let candidates =
        (0..g.cn_count()).filter(|&cn| !g.has_edge(cn, v) && admissible.map_or(true, |a| a[cn]));
    let after_girth = argmax_metric(candidates.map(|cn| (cn, metrics[cn])));
    if after_girth.is_empty() {
        return Err(ConstructionError::EmptySurvivorSet);
    }
    let after_degree = filter_min_degree(g, &after_girth);
    let selected = pick(rng, &after_degree);
    Ok(SelectionOutcome {
        selected,
        after_edge_girth: after_girth.clone(),
        after_girth,
        after_degree,
    })
}

/// Multi-edge selection: keep the check nodes whose lookahead girth attains
/// the variable node's, break ties by the candidate edge's own girth, then by
/// smallest realtime degree, then by one random draw.
pub fn select_cn_multi_edge(
    girths: &MultiEdgeGirths,
    g: &TannerGraph,
    rng: &mut impl Rng,
) -> Result<usize, ConstructionError> {
    select_cn_multi_edge_full(girths, g, rng).map(|o| o.selected)
}

pub(crate) fn select_cn_multi_edge_full(
    girths: &MultiEdgeGirths,
    g: &TannerGraph,
    rng: &mut impl Rng,
) -> Result<SelectionOutcome, ConstructionError> {
    if girths.vn_girth == MetricValue::NegInfinity {
        return Err(ConstructionError::EmptySurvivorSet);
    }
    let after_girth: Vec<usize> = (0..girths.cn_girths.len())
        .filter(|&cn| cmp_same_kind(&girths.cn_girths[cn], &girths.vn_girth) == Ordering::Equal)
        .collect();
    if after_girth.is_empty() {
        return Err(ConstructionError::EmptySurvivorSet);
    }
    let after_edge_girth =
        argmax_metric(after_girth.iter().map(|&cn| (cn, girths.edge_girths[cn])));
    let after_degree = filter_min_degree(g, &after_edge_girth);
    let selected = pick(rng, &after_degree);
    Ok(SelectionOutcome {
        selected,
        after_girth,
        after_edge_girth,
        after_degree,
    })
}

/// One construction stage as recorded in the trace.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub vn: usize,
    /// 1-based stage index within this variable node.
    pub stage: usize,
    pub effective_trials: usize,
    pub selected_cn: usize,
    /// Local girth of the inserted edge as the stage's selection rule
    /// measured it (the lifted measurement under the multi-edge rule; the
    /// plain metric plus one under the legacy rule, which is blind to
    /// in-orbit cycles).
    pub edge_local_girth: MetricValue,
    /// The stage's lookahead girth of the variable node.
    pub vn_girth: MetricValue,
    pub survivors: SelectionOutcome,
}

/// Full per-stage record of a construction run. Stage `k` of variable node
/// `v` appears before stage `k + 1`; quasi-cyclic runs record one stage per
/// inserted cyclic orbit, attributed to the group-leading variable node.
#[derive(Debug, Clone, Default)]
pub struct ConstructionTrace {
    pub stages: Vec<StageRecord>,
}

impl ConstructionTrace {
    /// The inserted edges in order, one per stage (the representative edge in
    /// the quasi-cyclic case).
    pub fn edge_sequence(&self) -> Vec<(usize, usize)> {
        self.stages.iter().map(|s| (s.selected_cn, s.vn)).collect()
    }
}

/// Runs a non-QC construction. Never fails for a valid configuration: as
/// long as a variable node is below its target degree some check node is
/// still unconnected to it.
pub fn run_construction(
    cfg: &ConstructionConfig,
) -> Result<(TannerGraph, ConstructionTrace), ConstructionError> {
    run_engine(cfg, None)
}

pub(crate) fn run_engine(
    cfg: &ConstructionConfig,
    qc: Option<&QcParams>,
) -> Result<(TannerGraph, ConstructionTrace), ConstructionError> {
    if cfg.edge_trials == 0 {
        return Err(ConstructionError::ZeroEdgeTrials);
    }
    let mut graph = TannerGraph::new(cfg.m, cfg.n, cfg.degrees.clone())?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut scratch = BfsScratch::new(graph.node_count());
    let mut trace = ConstructionTrace::default();

    let stride = qc.map_or(1, |q| q.circulant_size);
    let mut v = 0;
    while v < cfg.n {
        let degree = cfg.degrees.get(v);
        // Rows are measured with v deleted, so they survive v's own stages.
        let mut cache =
            (qc.is_none() && cfg.variant == Variant::MmPega).then(|| RowCache::new(cfg.m));
        for stage in 1..=degree {
            let record = run_stage(
                &mut graph,
                cfg,
                qc,
                v,
                stage,
                &mut rng,
                &mut scratch,
                cache.as_mut(),
            )?;
            match qc {
                None => graph.add_edge(record.selected_cn, v)?,
                Some(q) => {
                    let set = expand_edge_set(record.selected_cn, v, q.circulant_size);
                    graph.add_edge_set(&set)?;
                }
            }
            trace.stages.push(record);
        }
        v += stride;
    }
    Ok((graph, trace))
}

#[allow(clippy::too_many_arguments)]
fn run_stage(
    graph: &mut TannerGraph,
    cfg: &ConstructionConfig,
    qc: Option<&QcParams>,
    v: usize,
    stage: usize,
    rng: &mut ConstructionRng,
    scratch: &mut BfsScratch,
    cache: Option<&mut RowCache>,
) -> Result<StageRecord, ConstructionError> {
    let degree = cfg.degrees.get(v);
    match cfg.variant {
        Variant::MPega => {
            bfs_sweep(graph, v, None, scratch);
            let metrics: Vec<MetricValue> = (0..graph.cn_count())
                .map(|cn| metric_from_scratch(scratch, cn, cfg.metric))
                .collect();
            let admissible = match qc {
                Some(q) if q.cpm_only => {
                    let filter = crate::qc::cpm_admissible_flags(graph, v, q.circulant_size);
                    if !filter.iter().any(|&ok| ok) {
                        return Err(ConstructionError::CpmExhausted { vn: v, stage });
                    }
                    Some(filter)
                }
                _ => None,
            };
            let outcome =
                select_cn_single_edge_filtered(graph, v, &metrics, admissible.as_deref(), rng)?;
            let edge_girth = metrics[outcome.selected]
                .add(&MetricValue::one(cfg.metric))
                .expect("metric is never minus infinity");
            Ok(StageRecord {
                vn: v,
                stage,
                effective_trials: 1,
                selected_cn: outcome.selected,
                edge_local_girth: edge_girth,
                vn_girth: edge_girth,
                survivors: outcome,
            })
        }
        Variant::MmPega => {
            let r_eff = effective_edge_trials(cfg.edge_trials, degree, stage);
            let mut search = LookaheadSearch::new(
                graph,
                v,
                r_eff,
                cfg.metric,
                PruneMode::Aggressive,
                qc,
                scratch,
                cache,
            )
            .map_err(|e| match e {
                ConstructionError::NotEnoughCandidates { .. }
                    if qc.map_or(false, |q| q.cpm_only) =>
                {
                    ConstructionError::CpmExhausted { vn: v, stage }
                }
                other => other,
            })?;
            let girths = search.run();
            let outcome = select_cn_multi_edge_full(&girths, graph, rng)?;
            Ok(StageRecord {
                vn: v,
                stage,
                effective_trials: r_eff,
                selected_cn: outcome.selected,
                edge_local_girth: girths.edge_girths[outcome.selected],
                vn_girth: girths.vn_girth,
                survivors: outcome,
            })
        }
    }
}
