//! Tanner-graph data model.
//!
//! A binary LDPC code with check matrix `H = [h_ij]` (m rows, n columns) is
//! represented as a bipartite graph: check node `c_i` for row `i`, variable
//! node `v_j` for column `j`, and an edge `(c_i, v_j)` iff `h_ij = 1`.
//!
//! Graphs here grow edge by edge. Adjacency is stored in both directions so
//! that breadth-first metric sweeps are linear in the number of edges, and a
//! hash set backs O(1) edge-existence queries. Insertion order is preserved in
//! the adjacency lists, which keeps seeded constructions bit-reproducible.

use std::collections::HashSet;
use thiserror::Error;

/// Target degree of every variable node, fixed before construction starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    /// Builds a degree sequence. Every degree must be positive; the upper
    /// bound (degree at most the check-node count) is enforced when the
    /// sequence is attached to a graph.
    pub fn new(degrees: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(j) = degrees.iter().position(|&d| d == 0) {
            return Err(GraphError::ZeroDegree { vn: j });
        }
        Ok(DegreeSequence(degrees))
    }

    /// Constant-degree sequence, the regular-code case.
    pub fn regular(n: usize, degree: usize) -> Result<Self, GraphError> {
        Self::new(vec![degree; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, vn: usize) -> usize {
        self.0[vn]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Total edge count implied by the sequence.
    pub fn edge_total(&self) -> usize {
        self.0.iter().sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one check node and one variable node")]
    EmptyDimensions,
    #[error("degree sequence has {got} entries, expected {expected}")]
    DegreeCountMismatch { expected: usize, got: usize },
    #[error("variable node {vn} has zero target degree")]
    ZeroDegree { vn: usize },
    #[error("variable node {vn} has target degree {degree}, larger than the {m} check nodes")]
    DegreeTooLarge { vn: usize, degree: usize, m: usize },
    #[error("node index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("edge (c{cn}, v{vn}) already present")]
    DuplicateEdge { cn: usize, vn: usize },
    #[error("variable node {vn} is already at its target degree {target}")]
    DegreeOverflow { vn: usize, target: usize },
}

/// Bipartite graph of check nodes and variable nodes with no parallel edges.
///
/// Mutation is single-threaded; a finished graph is immutable and can be
/// shared freely across threads for analysis.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    m: usize,
    n: usize,
    cn_adjacency: Vec<Vec<usize>>,
    vn_adjacency: Vec<Vec<usize>>,
    target_degrees: DegreeSequence,
    edge_set: HashSet<(usize, usize)>,
}

impl TannerGraph {
    /// Edgeless graph over `m` check nodes and `n` variable nodes.
    pub fn new(m: usize, n: usize, degrees: DegreeSequence) -> Result<Self, GraphError> {
        if m == 0 || n == 0 {
            return Err(GraphError::EmptyDimensions);
        }
        if degrees.len() != n {
            return Err(GraphError::DegreeCountMismatch {
                expected: n,
                got: degrees.len(),
            });
        }
        for (vn, &d) in degrees.as_slice().iter().enumerate() {
            if d > m {
                return Err(GraphError::DegreeTooLarge { vn, degree: d, m });
            }
        }
        Ok(TannerGraph {
            m,
            n,
            cn_adjacency: vec![Vec::new(); m],
            vn_adjacency: vec![Vec::new(); n],
            target_degrees: degrees,
            edge_set: HashSet::new(),
        })
    }

    pub fn cn_count(&self) -> usize {
        self.m
    }

    pub fn vn_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_set.len()
    }

    pub fn target_degrees(&self) -> &DegreeSequence {
        &self.target_degrees
    }

    pub fn target_degree(&self, vn: usize) -> usize {
        self.target_degrees.get(vn)
    }

    /// Variable nodes currently connected to check node `cn`, in insertion order.
    pub fn cn_neighbors(&self, cn: usize) -> &[usize] {
        &self.cn_adjacency[cn]
    }

    /// Check nodes currently connected to variable node `vn`, in insertion order.
    pub fn vn_neighbors(&self, vn: usize) -> &[usize] {
        &self.vn_adjacency[vn]
    }

    /// Realtime degree of a check node.
    pub fn cn_degree(&self, cn: usize) -> usize {
        self.cn_adjacency[cn].len()
    }

    /// Realtime degree of a variable node.
    pub fn vn_degree(&self, vn: usize) -> usize {
        self.vn_adjacency[vn].len()
    }

    pub fn has_edge(&self, cn: usize, vn: usize) -> bool {
        self.edge_set.contains(&(cn, vn))
    }

    /// All edges as (check node, variable node) pairs, ordered by variable
    /// node and insertion order within one variable node.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vn_adjacency
            .iter()
            .enumerate()
            .flat_map(|(vn, cns)| cns.iter().map(move |&cn| (cn, vn)))
    }

    fn check_edge_insertable(&self, cn: usize, vn: usize) -> Result<(), GraphError> {
        if cn >= self.m {
            return Err(GraphError::IndexOutOfRange {
                what: "check node",
                index: cn,
                limit: self.m,
            });
        }
        if vn >= self.n {
            return Err(GraphError::IndexOutOfRange {
                what: "variable node",
                index: vn,
                limit: self.n,
            });
        }
        if self.has_edge(cn, vn) {
            return Err(GraphError::DuplicateEdge { cn, vn });
        }
        if self.vn_degree(vn) >= self.target_degree(vn) {
            return Err(GraphError::DegreeOverflow {
                vn,
                target: self.target_degree(vn),
            });
        }
        Ok(())
    }

    /// Inserts one edge, updating both adjacency directions.
    pub fn add_edge(&mut self, cn: usize, vn: usize) -> Result<(), GraphError> {
        self.check_edge_insertable(cn, vn)?;
        self.push_edge_unchecked(cn, vn);
        Ok(())
    }

    /// Inserts a set of edges atomically: if any edge is rejected the graph is
    /// left unchanged.
    pub fn add_edge_set(&mut self, edges: &[(usize, usize)]) -> Result<(), GraphError> {
        // Validate against the current graph plus the pending part of the set.
        let mut pending: HashSet<(usize, usize)> = HashSet::with_capacity(edges.len());
        let mut added_degree = vec![0usize; self.n];
        for &(cn, vn) in edges {
            self.check_edge_insertable(cn, vn)?;
            if !pending.insert((cn, vn)) {
                return Err(GraphError::DuplicateEdge { cn, vn });
            }
            added_degree[vn] += 1;
            if self.vn_degree(vn) + added_degree[vn] > self.target_degree(vn) {
                return Err(GraphError::DegreeOverflow {
                    vn,
                    target: self.target_degree(vn),
                });
            }
        }
        for &(cn, vn) in edges {
            self.push_edge_unchecked(cn, vn);
        }
        Ok(())
    }

    /// Appends an edge without validation. Callers must have checked bounds,
    /// absence, and degree headroom.
    pub(crate) fn push_edge_unchecked(&mut self, cn: usize, vn: usize) {
        self.cn_adjacency[cn].push(vn);
        self.vn_adjacency[vn].push(cn);
        self.edge_set.insert((cn, vn));
    }

    /// Removes an edge that was the most recent insertion for both of its
    /// endpoints. Used to roll back hypothetical edges in last-in-first-out
    /// order during lookahead searches.
    pub(crate) fn pop_edge_unchecked(&mut self, cn: usize, vn: usize) {
        let popped_vn = self.cn_adjacency[cn].pop();
        let popped_cn = self.vn_adjacency[vn].pop();
        debug_assert_eq!(popped_vn, Some(vn));
        debug_assert_eq!(popped_cn, Some(cn));
        self.edge_set.remove(&(cn, vn));
    }

    /// Combined node count (check nodes first, then variable nodes); the
    /// indexing scheme shared by the breadth-first scratch buffers.
    pub(crate) fn node_count(&self) -> usize {
        self.m + self.n
    }
}

/// Structural equality: same dimensions, same target degrees, same edge set.
/// Insertion order is deliberately ignored so that a graph read back from a
/// file compares equal to the one that was written.
impl PartialEq for TannerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.n == other.n
            && self.target_degrees == other.target_degrees
            && self.edge_set == other.edge_set
    }
}

impl Eq for TannerGraph {}
