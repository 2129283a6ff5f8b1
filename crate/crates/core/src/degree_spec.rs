//! Degree-distribution expansion.
//!
//! A node-perspective degree distribution is written as a polynomial,
//! `0.47532x^2 + 0.27953x^3 + ...`: coefficient p at exponent d means a
//! fraction p of the variable nodes has degree d. Expansion apportions n
//! variable nodes to the degrees by largest remainder, then emits the
//! degrees in nondecreasing order (low-degree nodes are constructed first).
//!
//! Under a quasi-cyclic lifting the degrees must be constant inside each
//! size-N group, so apportionment runs over the n/N groups instead; the
//! realized fractions then shift by up to N/n per degree.

use thiserror::Error;

use crate::graph::{DegreeSequence, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeSpecError {
    #[error("cannot parse term {term:?} (expected fraction x^degree, e.g. 0.5x^3)")]
    BadTerm { term: String },
    #[error("degree {degree} appears twice")]
    DuplicateDegree { degree: usize },
    #[error("fractions sum to {sum}, expected 1 within {tol}")]
    FractionsDoNotSumToOne { sum: f64, tol: f64 },
    #[error("distribution is empty")]
    Empty,
    #[error("{count} variable nodes cannot be split into groups of {circulant}")]
    GroupMismatch { count: usize, circulant: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A parsed degree distribution: (degree, fraction) terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    terms: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    /// Builds a distribution from (degree, fraction) pairs. Fractions must be
    /// positive and sum to 1 within 1e-3 (published distributions are often
    /// rounded to five digits).
    pub fn new(mut terms: Vec<(usize, f64)>) -> Result<Self, DegreeSpecError> {
        if terms.is_empty() {
            return Err(DegreeSpecError::Empty);
        }
        terms.sort_by_key(|&(d, _)| d);
        for pair in terms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(DegreeSpecError::DuplicateDegree { degree: pair[0].0 });
            }
        }
        let sum: f64 = terms.iter().map(|&(_, p)| p).sum();
        let tol = 1e-3;
        if (sum - 1.0).abs() > tol {
            return Err(DegreeSpecError::FractionsDoNotSumToOne { sum, tol });
        }
        Ok(DegreeDistribution { terms })
    }

    /// Parses `"0.47532x^2 + 0.27953x^3"`; the caret is optional (`x3`).
    pub fn parse(spec: &str) -> Result<Self, DegreeSpecError> {
        let mut terms = Vec::new();
        for raw in spec.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let (coeff, degree) = term
                .split_once('x')
                .ok_or_else(|| DegreeSpecError::BadTerm { term: term.into() })?;
            let fraction: f64 = coeff
                .trim()
                .parse()
                .map_err(|_| DegreeSpecError::BadTerm { term: term.into() })?;
            let degree: usize = degree
                .trim()
                .trim_start_matches('^')
                .trim()
                .parse()
                .map_err(|_| DegreeSpecError::BadTerm { term: term.into() })?;
            terms.push((degree, fraction));
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    /// Number of units (variable nodes or groups) assigned to each degree by
    /// largest-remainder apportionment of `units` items.
    fn apportion(&self, units: usize) -> Vec<(usize, usize)> {
        let mut assigned: Vec<(usize, usize, f64)> = self
            .terms
            .iter()
            .map(|&(d, p)| {
                let ideal = p * units as f64;
                (d, ideal.floor() as usize, ideal - ideal.floor())
            })
            .collect();
        let mut used: usize = assigned.iter().map(|&(_, c, _)| c).sum();
        // Hand out the leftovers to the largest remainders, ties to the
        // smaller degree (stable order after the sort below).
        let mut order: Vec<usize> = (0..assigned.len()).collect();
        order.sort_by(|&a, &b| {
            assigned[b]
                .2
                .partial_cmp(&assigned[a].2)
                .unwrap()
                .then(assigned[a].0.cmp(&assigned[b].0))
        });
        let mut i = 0;
        while used < units {
            assigned[order[i % order.len()]].1 += 1;
            used += 1;
            i += 1;
        }
        assigned.into_iter().map(|(d, c, _)| (d, c)).collect()
    }

    /// Expands to a degree sequence of `n` entries in nondecreasing order.
    /// With `circulant_size > 1`, apportionment runs over the n/N groups so
    /// each group is degree-constant.
    pub fn expand(
        &self,
        n: usize,
        circulant_size: usize,
    ) -> Result<DegreeSequence, DegreeSpecError> {
        let group = circulant_size.max(1);
        if n % group != 0 {
            return Err(DegreeSpecError::GroupMismatch {
                count: n,
                circulant: group,
            });
        }
        let counts = self.apportion(n / group);
        let mut degrees = Vec::with_capacity(n);
        for (degree, unit_count) in counts {
            for _ in 0..unit_count * group {
                degrees.push(degree);
            }
        }
        Ok(DegreeSequence::new(degrees)?)
    }
}
