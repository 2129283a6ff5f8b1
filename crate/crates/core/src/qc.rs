//! Quasi-cyclic construction semantics.
//!
//! A quasi-cyclic code's check matrix is a J x K array of N x N circulants.
//! On the graph side one edge determines its whole cyclic orbit: inserting
//! `(c_i, v_j)` inserts the N edges obtained by shifting both indices inside
//! their size-N groups. Construction therefore strides over variable-node
//! groups and places one orbit per stage.
//!
//! The plain metric cannot see cycles that close through two or more edges of
//! one orbit (they are all inserted at once). The lifted measurement used
//! here inserts the `N - 1` cyclic copies of a candidate first and only then
//! measures the metric of the candidate edge itself, which makes those
//! in-orbit cycles visible to the selection rules.

use thiserror::Error;

use crate::construct::{run_engine, ConstructionConfig, ConstructionError, ConstructionTrace};
use crate::graph::{DegreeSequence, TannerGraph};
use crate::metric::{bfs_metrics_with, BfsScratch, MetricKind, MetricValue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QcError {
    #[error("circulant size must be at least 1")]
    ZeroCirculant,
    #[error("{what} = {value} is not a multiple of the circulant size {circulant}")]
    NotAMultiple {
        what: &'static str,
        value: usize,
        circulant: usize,
    },
    #[error("degrees differ inside the variable-node group starting at v{group_start}")]
    UnevenGroupDegrees { group_start: usize },
    #[error("cyclic orbit of (c{cn}, v{vn}) is partially present in the graph")]
    PartialOrbit { cn: usize, vn: usize },
    #[error(
        "no admissible check node for v{vn}: every circulant block of its column group is occupied"
    )]
    NoAdmissibleCn { vn: usize },
}

/// Quasi-cyclic shape of a construction: circulant size and, optionally, the
/// restriction of every nonzero circulant to a permutation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcParams {
    pub circulant_size: usize,
    pub cpm_only: bool,
}

impl QcParams {
    pub fn new(circulant_size: usize) -> Self {
        QcParams {
            circulant_size,
            cpm_only: false,
        }
    }

    pub fn with_cpm_only(circulant_size: usize) -> Self {
        QcParams {
            circulant_size,
            cpm_only: true,
        }
    }

    /// (row groups, column groups) of an m x n matrix under this lifting.
    pub fn dims(&self, m: usize, n: usize) -> (usize, usize) {
        (m / self.circulant_size, n / self.circulant_size)
    }
}

/// Index of `x` after a cyclic shift by `t` inside its size-`n_circ` group.
pub fn cyclic_shift_index(x: usize, n_circ: usize, t: usize) -> usize {
    (x / n_circ) * n_circ + (x + t) % n_circ
}

/// The cyclic orbit of edge `(cn, vn)`: N edges, pairwise distinct, shifting
/// both endpoints together. The orbit of any of its members is the same set.
pub fn expand_edge_set(cn: usize, vn: usize, n_circ: usize) -> Vec<(usize, usize)> {
    (0..n_circ)
        .map(|t| {
            (
                cyclic_shift_index(cn, n_circ, t),
                cyclic_shift_index(vn, n_circ, t),
            )
        })
        .collect()
}

/// Checks that (m, n, circulant size, degrees) describe a valid quasi-cyclic
/// construction: sizes divide evenly and degrees are constant within each
/// variable-node group.
pub fn validate_qc_params(
    m: usize,
    n: usize,
    circulant_size: usize,
    degrees: &DegreeSequence,
) -> Result<(), QcError> {
    if circulant_size == 0 {
        return Err(QcError::ZeroCirculant);
    }
    if m % circulant_size != 0 {
        return Err(QcError::NotAMultiple {
            what: "check-node count",
            value: m,
            circulant: circulant_size,
        });
    }
    if n % circulant_size != 0 {
        return Err(QcError::NotAMultiple {
            what: "variable-node count",
            value: n,
            circulant: circulant_size,
        });
    }
    for group_start in (0..n).step_by(circulant_size) {
        let d = degrees.get(group_start);
        for j in group_start..group_start + circulant_size {
            if degrees.get(j) != d {
                return Err(QcError::UnevenGroupDegrees { group_start });
            }
        }
    }
    Ok(())
}

/// Local girth of the candidate edge `(cn, vn)` under quasi-cyclic insertion:
/// the metric of `(cn, vn)` measured with the other `N - 1` orbit edges
/// already inserted, plus one. Cycles living inside the orbit are seen; the
/// plain metric on the unmodified graph would report them as invisible.
///
/// The whole orbit must be absent from the graph.
pub fn qc_edge_local_girth(
    g: &TannerGraph,
    cn: usize,
    vn: usize,
    n_circ: usize,
    kind: MetricKind,
) -> Result<MetricValue, QcError> {
    let orbit = expand_edge_set(cn, vn, n_circ);
    let present = orbit.iter().filter(|&&(c, u)| g.has_edge(c, u)).count();
    if present != 0 {
        return Err(QcError::PartialOrbit { cn, vn });
    }
    let mut scratch_graph = g.clone();
    for &(c, u) in &orbit[1..] {
        scratch_graph.push_edge_unchecked(c, u);
    }
    let mut scratch = BfsScratch::new(scratch_graph.node_count());
    let metrics = bfs_metrics_with(&scratch_graph, vn, kind, None, &mut scratch);
    Ok(metrics[cn]
        .add(&MetricValue::one(kind))
        .expect("metric is never minus infinity"))
}

/// Admissibility of each check node for variable node `v` under the
/// circulant-permutation restriction: a check node is out as soon as the
/// circulant block (its row group x v's column group) holds any edge.
pub(crate) fn cpm_admissible_flags(g: &TannerGraph, v: usize, n_circ: usize) -> Vec<bool> {
    let m = g.cn_count();
    let col_group = v / n_circ;
    let row_groups = m / n_circ;
    let mut blocked = vec![false; row_groups];
    for cn in 0..m {
        if blocked[cn / n_circ] {
            continue;
        }
        if g.cn_neighbors(cn).iter().any(|&u| u / n_circ == col_group) {
            blocked[cn / n_circ] = true;
        }
    }
    (0..m).map(|cn| !blocked[cn / n_circ]).collect()
}

/// Check nodes admissible for `v` under the circulant-permutation
/// restriction. Errors when the set is empty, which is how a construction
/// with that restriction fails.
pub fn cpm_candidate_filter(
    g: &TannerGraph,
    v: usize,
    n_circ: usize,
) -> Result<Vec<usize>, QcError> {
    let flags = cpm_admissible_flags(g, v, n_circ);
    let admissible: Vec<usize> = (0..g.cn_count()).filter(|&cn| flags[cn]).collect();
    if admissible.is_empty() {
        return Err(QcError::NoAdmissibleCn { vn: v });
    }
    Ok(admissible)
}

/// Runs a quasi-cyclic construction: variable nodes advance group by group,
/// each stage selects one check node (by the configured variant) and inserts
/// the full cyclic orbit of the chosen edge.
pub fn run_qc_construction(
    cfg: &ConstructionConfig,
    qc: &QcParams,
) -> Result<(TannerGraph, ConstructionTrace), ConstructionError> {
    validate_qc_params(cfg.m, cfg.n, qc.circulant_size, &cfg.degrees)?;
    run_engine(cfg, Some(qc))
}

/// Scans every circulant block of a finished graph and verifies the
/// quasi-cyclic structure: each block is a circulant (the orbit of any edge
/// it holds lies fully inside the edge set). Returns the weight of each block
/// on success. With `cpm_only`, also checks that every nonzero block has
/// weight one per row and column.
pub fn verify_qc_structure(g: &TannerGraph, qc: &QcParams) -> Result<Vec<Vec<usize>>, QcError> {
    let n_circ = qc.circulant_size;
    let (rows, cols) = qc.dims(g.cn_count(), g.vn_count());
    let mut weights = vec![vec![0usize; cols]; rows];
    for (cn, vn) in g.edges() {
        for (c, u) in expand_edge_set(cn, vn, n_circ) {
            if !g.has_edge(c, u) {
                return Err(QcError::PartialOrbit { cn, vn });
            }
        }
        weights[cn / n_circ][vn / n_circ] += 1;
    }
    // Block weight counts every edge; a weight-w circulant block holds w*N
    // edges, and a CPM block exactly N.
    for row in &mut weights {
        for w in row.iter_mut() {
            debug_assert_eq!(*w % n_circ, 0);
            *w /= n_circ;
        }
    }
    Ok(weights)
}
