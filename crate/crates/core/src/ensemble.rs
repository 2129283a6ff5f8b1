//! Batch construction and ensemble statistics.
//!
//! An ensemble is `count` independent constructions under one configuration,
//! seeded `base_seed .. base_seed + count`. Members run in parallel; results
//! are merged in seed order, so a report is a pure function of
//! (configuration, count, base seed) regardless of thread count.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{ace_spectrum, girth, vnlgd, AceSpectrum, SpectrumEntry, Vnlgd};
use crate::construct::{run_construction, ConstructionConfig, ConstructionError};
use crate::graph::TannerGraph;
use crate::metric::{MetricKind, MetricValue};
use crate::qc::{run_qc_construction, QcParams};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("ensemble must have at least one member")]
    EmptyEnsemble,
    #[error("construction with seed {seed} failed: {source}")]
    Construction {
        seed: u64,
        source: ConstructionError,
    },
    #[error("no spectrum meets the frequency threshold {threshold}")]
    NoCandidateMeetsThreshold { threshold: f64 },
}

/// Ensemble-wide knobs on top of a per-code construction configuration.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub construction: ConstructionConfig,
    pub qc: Option<QcParams>,
    /// Spectrum depth for the per-code analysis.
    pub d_max: usize,
}

/// Analysis of one ensemble member.
#[derive(Debug, Clone)]
pub struct CodeReport {
    pub seed: u64,
    pub girth: MetricValue,
    pub spectrum: AceSpectrum,
    pub vnlgd: Vnlgd,
}

/// Per-slot summary of an ensemble's spectra: how often the slot is infinite
/// (that cycle length absent), and the mean over the finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageSpectrumSlot {
    pub fraction_infinite: f64,
    pub finite_mean: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub codes: Vec<CodeReport>,
}

impl EnsembleReport {
    /// Largest spectrum in the ensemble and the fraction of members
    /// attaining it.
    pub fn max_spectrum(&self) -> (AceSpectrum, f64) {
        let best = self
            .codes
            .iter()
            .map(|c| &c.spectrum)
            .max_by(|a, b| a.compare(b))
            .expect("report never empty")
            .clone();
        let hits = self
            .codes
            .iter()
            .filter(|c| c.spectrum.compare(&best) == Ordering::Equal)
            .count();
        let freq = hits as f64 / self.codes.len() as f64;
        (best, freq)
    }

    /// Smallest (best) local-girth distribution and its frequency.
    pub fn min_vnlgd(&self) -> (Vnlgd, f64) {
        let best = self
            .codes
            .iter()
            .map(|c| &c.vnlgd)
            .min_by(|a, b| a.compare(b))
            .expect("report never empty")
            .clone();
        let hits = self
            .codes
            .iter()
            .filter(|c| c.vnlgd.compare(&best) == Ordering::Equal)
            .count();
        let freq = hits as f64 / self.codes.len() as f64;
        (best, freq)
    }

    pub fn average_spectrum(&self) -> Vec<AverageSpectrumSlot> {
        aggregate_average_spectrum(self.codes.iter().map(|c| &c.spectrum))
    }
}

fn build_one(cfg: &EnsembleConfig, seed: u64) -> Result<(TannerGraph, CodeReport), EnsembleError> {
    let construction = ConstructionConfig {
        seed,
        ..cfg.construction.clone()
    };
    let built = match &cfg.qc {
        None => run_construction(&construction),
        Some(qc) => run_qc_construction(&construction, qc),
    };
    let (graph, _trace) = built.map_err(|source| EnsembleError::Construction { seed, source })?;
    let spectrum = ace_spectrum(&graph, cfg.d_max).expect("d_max validated by caller");
    let report = CodeReport {
        seed,
        girth: girth(&graph, MetricKind::Distance),
        spectrum,
        vnlgd: vnlgd(&graph),
    };
    Ok((graph, report))
}

/// Runs `count` constructions with seeds `base_seed..base_seed + count` and
/// analyzes each. Failures carry the offending seed.
pub fn generate_ensemble(
    cfg: &EnsembleConfig,
    count: usize,
    base_seed: u64,
) -> Result<EnsembleReport, EnsembleError> {
    if count == 0 {
        return Err(EnsembleError::EmptyEnsemble);
    }
    let codes: Result<Vec<CodeReport>, EnsembleError> = (0..count)
        .into_par_iter()
        .map(|i| build_one(cfg, base_seed + i as u64).map(|(_, report)| report))
        .collect();
    Ok(EnsembleReport { codes: codes? })
}

/// As [`generate_ensemble`] but also keeps the graphs, for callers that go on
/// to simulate or serialize members.
pub fn generate_ensemble_with_graphs(
    cfg: &EnsembleConfig,
    count: usize,
    base_seed: u64,
) -> Result<(Vec<TannerGraph>, EnsembleReport), EnsembleError> {
    if count == 0 {
        return Err(EnsembleError::EmptyEnsemble);
    }
    let built: Result<Vec<(TannerGraph, CodeReport)>, EnsembleError> = (0..count)
        .into_par_iter()
        .map(|i| build_one(cfg, base_seed + i as u64))
        .collect();
    let (graphs, codes) = built?.into_iter().unzip();
    Ok((graphs, EnsembleReport { codes }))
}

/// Slotwise summary of a set of spectra. A slot where every spectrum is
/// infinite reports (1.0, None); a mixed slot reports both the infinite
/// fraction and the mean of the finite values.
pub fn aggregate_average_spectrum<'a, I>(spectra: I) -> Vec<AverageSpectrumSlot>
where
    I: IntoIterator<Item = &'a AceSpectrum>,
{
    let mut totals: Vec<(usize, i64, usize)> = Vec::new(); // (infinite, finite sum, finite count)
    let mut n = 0usize;
    for spectrum in spectra {
        n += 1;
        if totals.len() < spectrum.depth() {
            totals.resize(spectrum.depth(), (0, 0, 0));
        }
        for (slot, entry) in totals.iter_mut().zip(spectrum.entries()) {
            match entry {
                SpectrumEntry::Infinite => slot.0 += 1,
                SpectrumEntry::Finite(a) => {
                    slot.1 += a;
                    slot.2 += 1;
                }
            }
        }
    }
    totals
        .into_iter()
        .map(|(inf, sum, cnt)| AverageSpectrumSlot {
            fraction_infinite: inf as f64 / n as f64,
            finite_mean: (cnt > 0).then(|| sum as f64 / cnt as f64),
        })
        .collect()
}

/// Indices of codes whose spectrum should be offered as candidates: the
/// members at the largest spectrum whose frequency exceeds `min_frequency`,
/// scanning down from the maximum. A spectrum that is rare beyond the
/// threshold is skipped in favour of the next one.
pub fn select_candidates(
    report: &EnsembleReport,
    min_frequency: f64,
) -> Result<Vec<usize>, EnsembleError> {
    if report.codes.is_empty() {
        return Err(EnsembleError::EmptyEnsemble);
    }
    let n = report.codes.len();
    let mut distinct: Vec<&AceSpectrum> = report.codes.iter().map(|c| &c.spectrum).collect();
    distinct.sort_by(|a, b| b.compare(a));
    distinct.dedup_by(|a, b| a.compare(b) == Ordering::Equal);
    for spectrum in distinct {
        let members: Vec<usize> = report
            .codes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.spectrum.compare(spectrum) == Ordering::Equal)
            .map(|(i, _)| i)
            .collect();
        if members.len() as f64 / n as f64 > min_frequency {
            return Ok(members);
        }
    }
    Err(EnsembleError::NoCandidateMeetsThreshold {
        threshold: min_frequency,
    })
}
