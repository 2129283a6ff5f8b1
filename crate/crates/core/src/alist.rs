//! The alist interchange format for sparse parity-check matrices.
//!
//! Layout (all values space-separated, newline-terminated lines):
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! col weights (n values)
//! row weights (m values)
//! n lines: 1-based check indices of each column, zero-padded to max_col_weight
//! m lines: 1-based variable indices of each row, zero-padded to max_row_weight
//! ```
//!
//! Writing is canonical: indices ascend within each line. A graph read back
//! carries the realized column weights as its target degrees, so writing a
//! finished construction and reading it again yields an equal graph.

use thiserror::Error;

use crate::graph::{DegreeSequence, GraphError, TannerGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlistError {
    #[error("line {line}: {problem}")]
    Parse { line: usize, problem: String },
    #[error("line {line}: index {index} out of range 1..={limit}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        limit: usize,
    },
    #[error("column {column} lists check {cn} but row {cn} does not list column {column}")]
    Inconsistent { column: usize, cn: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Serializes a graph in canonical alist form.
pub fn write_alist(g: &TannerGraph) -> String {
    let n = g.vn_count();
    let m = g.cn_count();
    let col_weights: Vec<usize> = (0..n).map(|v| g.vn_degree(v)).collect();
    let row_weights: Vec<usize> = (0..m).map(|c| g.cn_degree(c)).collect();
    let max_col = col_weights.iter().copied().max().unwrap_or(0);
    let max_row = row_weights.iter().copied().max().unwrap_or(0);

    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n"));
    out.push_str(&format!("{max_col} {max_row}\n"));
    out.push_str(&join(&col_weights));
    out.push('\n');
    out.push_str(&join(&row_weights));
    out.push('\n');
    for v in 0..n {
        let mut cns: Vec<usize> = g.vn_neighbors(v).iter().map(|&c| c + 1).collect();
        cns.sort_unstable();
        cns.resize(max_col.max(1), 0);
        out.push_str(&join(&cns));
        out.push('\n');
    }
    for c in 0..m {
        let mut vns: Vec<usize> = g.cn_neighbors(c).iter().map(|&v| v + 1).collect();
        vns.sort_unstable();
        vns.resize(max_row.max(1), 0);
        out.push_str(&join(&vns));
        out.push('\n');
    }
    out
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, expect: &str) -> Result<Vec<usize>, AlistError> {
        loop {
            let line = self.iter.next().ok_or(AlistError::Parse {
                line: self.number + 1,
                problem: format!("file ends before {expect}"),
            })?;
            self.number += 1;
            if line.trim().is_empty() {
                continue;
            }
            return line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError::Parse {
                        line: self.number,
                        problem: format!("expected {expect}, found {tok:?}"),
                    })
                })
                .collect();
        }
    }
}

/// Parses an alist document into a graph. Target degrees are the realized
/// column weights.
pub fn read_alist(text: &str) -> Result<TannerGraph, AlistError> {
    let mut lines = Lines {
        iter: text.lines(),
        number: 0,
    };

    let header = lines.next_numbers("the size header \"n m\"")?;
    if header.len() != 2 {
        return Err(AlistError::Parse {
            line: lines.number,
            problem: format!("size header must hold two values, found {}", header.len()),
        });
    }
    let (n, m) = (header[0], header[1]);
    let weights_header = lines.next_numbers("the maximum weights line")?;
    if weights_header.len() != 2 {
        return Err(AlistError::Parse {
            line: lines.number,
            problem: "maximum-weights line must hold two values".into(),
        });
    }
    let (max_col, max_row) = (weights_header[0], weights_header[1]);

    let col_weights = lines.next_numbers("the column weights")?;
    if col_weights.len() != n {
        return Err(AlistError::Parse {
            line: lines.number,
            problem: format!("expected {n} column weights, found {}", col_weights.len()),
        });
    }
    let row_weights = lines.next_numbers("the row weights")?;
    if row_weights.len() != m {
        return Err(AlistError::Parse {
            line: lines.number,
            problem: format!("expected {m} row weights, found {}", row_weights.len()),
        });
    }
    for (v, &w) in col_weights.iter().enumerate() {
        if w > max_col {
            return Err(AlistError::Parse {
                line: lines.number,
                problem: format!("column {v} weight {w} exceeds the declared maximum {max_col}"),
            });
        }
    }
    for (c, &w) in row_weights.iter().enumerate() {
        if w > max_row {
            return Err(AlistError::Parse {
                line: lines.number,
                problem: format!("row {c} weight {w} exceeds the declared maximum {max_row}"),
            });
        }
    }

    let mut column_lists: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let entries = lines.next_numbers(&format!("the neighbour list of column {v}"))?;
        let line = lines.number;
        let mut cns = Vec::with_capacity(col_weights[v]);
        for idx in entries.iter().copied().filter(|&idx| idx != 0) {
            if idx > m {
                return Err(AlistError::IndexOutOfRange {
                    line,
                    index: idx,
                    limit: m,
                });
            }
            cns.push(idx - 1);
        }
        if cns.len() != col_weights[v] {
            return Err(AlistError::Parse {
                line,
                problem: format!(
                    "column {v} declares weight {} but lists {} entries",
                    col_weights[v],
                    cns.len()
                ),
            });
        }
        column_lists.push(cns);
    }

    let mut row_lists: Vec<Vec<usize>> = Vec::with_capacity(m);
    for c in 0..m {
        let entries = lines.next_numbers(&format!("the neighbour list of row {c}"))?;
        let line = lines.number;
        let mut vns = Vec::with_capacity(row_weights[c]);
        for idx in entries.iter().copied().filter(|&idx| idx != 0) {
            if idx > n {
                return Err(AlistError::IndexOutOfRange {
                    line,
                    index: idx,
                    limit: n,
                });
            }
            vns.push(idx - 1);
        }
        if vns.len() != row_weights[c] {
            return Err(AlistError::Parse {
                line,
                problem: format!(
                    "row {c} declares weight {} but lists {} entries",
                    row_weights[c],
                    vns.len()
                ),
            });
        }
        row_lists.push(vns);
    }

    // Degree-1 floor: alist columns may be empty, the graph model wants a
    // positive target; an empty column gets target degree 1.
    let degrees = DegreeSequence::new(
        col_weights
            .iter()
            .map(|&w| w.max(1))
            .collect::<Vec<usize>>(),
    )?;
    let mut g = TannerGraph::new(m, n, degrees)?;
    for (v, cns) in column_lists.iter().enumerate() {
        for &cn in cns {
            g.add_edge(cn, v)?;
        }
    }
    // Cross-check the row lists against the columns.
    for (c, vns) in row_lists.iter().enumerate() {
        for &v in vns {
            if !g.has_edge(c, v) {
                return Err(AlistError::Inconsistent { column: v, cn: c });
            }
        }
        if vns.len() != g.cn_degree(c) {
            return Err(AlistError::Inconsistent {
                column: usize::MAX,
                cn: c,
            });
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_encoded_document() {
        // 2 x 3 matrix with edges (c0,v0), (c1,v0), (c1,v2).
        let mut g = TannerGraph::new(2, 3, DegreeSequence::new(vec![2, 1, 1]).unwrap()).unwrap();
        g.add_edge(0, 0).unwrap();
        g.add_edge(1, 0).unwrap();
        g.add_edge(1, 2).unwrap();
        let text = write_alist(&g);
        let expected = "\
3 2
2 2
2 0 1
1 2
1 2
0 0
2 0
1 0
1 3
";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_small() {
        let mut g = TannerGraph::new(3, 4, DegreeSequence::new(vec![2, 1, 2, 1]).unwrap()).unwrap();
        for (c, v) in [(0, 0), (2, 0), (1, 1), (0, 2), (1, 2), (2, 3)] {
            g.add_edge(c, v).unwrap();
        }
        let back = read_alist(&write_alist(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn truncated_file_names_the_line() {
        let text = "3 2\n2 2\n2 0 1\n1 2\n1 2\n";
        let err = read_alist(text).unwrap_err();
        assert_eq!(
            err,
            AlistError::Parse {
                line: 6,
                problem: "file ends before the neighbour list of column 1".into()
            }
        );
    }

    #[test]
    fn weight_mismatch_is_detected() {
        // Column 0 declares weight 2 but lists one entry.
        let text = "2 2\n2 2\n2 1\n1 2\n1 0\n2 0\n1 0\n1 2\n";
        let err = read_alist(text).unwrap_err();
        assert!(matches!(err, AlistError::Parse { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn out_of_range_index_is_detected() {
        let text = "2 2\n1 1\n1 1\n1 1\n3\n2\n1\n2\n";
        let err = read_alist(text).unwrap_err();
        assert_eq!(
            err,
            AlistError::IndexOutOfRange {
                line: 5,
                index: 3,
                limit: 2
            }
        );
    }

    #[test]
    fn inconsistent_row_list_is_detected() {
        // Row 0 claims v1 but column 1 does not claim c0.
        let text = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n";
        let err = read_alist(text).unwrap_err();
        assert!(matches!(err, AlistError::Inconsistent { .. }), "{err:?}");
    }
}
