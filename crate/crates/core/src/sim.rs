//! Desk-scale decoding sanity checks: BPSK over AWGN, sum-product decoding,
//! Monte-Carlo bit and frame error rates.
//!
//! Simulation transmits the all-zero codeword (valid for a linear code over a
//! symmetric channel with a symmetric decoder), maps bit 0 to +1.0, adds
//! Gaussian noise of variance sigma^2 = 1 / (2 R 10^(EbN0/10)), and feeds the
//! channel LLRs 2y/sigma^2 to a flooding-schedule sum-product decoder with
//! early exit on a zero syndrome.
//!
//! Frames are independent: frame `i` of SNR point `p` draws its noise from a
//! stream derived from (seed, p, i), so results do not depend on the number
//! of worker threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::TannerGraph;
use crate::rng::{derive_stream_seed, GaussianSource};

/// Messages are clamped to this magnitude; tanh saturates to exactly 1.0 in
/// f64 near 19, which would turn atanh into infinity.
const MESSAGE_CLIP: f64 = 30.0;
/// Channel LLRs are clamped here so a vanishing noise variance stays finite.
const CHANNEL_LLR_CLIP: f64 = 1.0e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("code rate (n - m) / n = {rate} is not positive")]
    NonPositiveRate { rate: f64 },
    #[error("decoder needs at least one iteration")]
    ZeroIterations,
    #[error("LLR slice has {got} entries, the code has {expected} variable nodes")]
    LlrLength { expected: usize, got: usize },
}

/// Monte-Carlo run parameters.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Eb/N0 points in dB.
    pub ebn0_db: Vec<f64>,
    /// Decoder iteration cap per frame.
    pub max_iterations: usize,
    /// Stop an SNR point once this many frame errors are in.
    pub min_frame_errors: u64,
    /// Hard cap on frames per SNR point.
    pub max_frames: u64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ebn0_db: vec![1.0, 2.0, 3.0],
            max_iterations: 100,
            min_frame_errors: 100,
            max_frames: 1_000_000,
            seed: 0,
        }
    }
}

/// Noise standard deviation for BPSK at a given Eb/N0 (dB) and code rate.
pub fn noise_sigma(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Channel LLRs for received BPSK symbols: 2y/sigma^2, clipped. Bit 0 maps to
/// +1.0, so a positive LLR votes for 0.
pub fn awgn_llr(ebn0_db: f64, rate: f64, received: &[f64]) -> Vec<f64> {
    let sigma2 = noise_sigma(ebn0_db, rate).powi(2);
    received
        .iter()
        .map(|y| (2.0 * y / sigma2).clamp(-CHANNEL_LLR_CLIP, CHANNEL_LLR_CLIP))
        .collect()
}

/// Decoder outcome for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Hard decisions, one bit per variable node.
    pub hard: Vec<u8>,
    /// Iterations actually run (1-based; at least 1).
    pub iterations: usize,
    /// True when the returned word satisfies every check.
    pub syndrome_ok: bool,
}

/// Edge-indexed view of a graph for message passing.
struct DecoderGraph {
    /// For each check node, the (vn, edge index) pairs of its sockets.
    cn_edges: Vec<Vec<(usize, usize)>>,
    /// For each variable node, the edge indices of its sockets.
    vn_edges: Vec<Vec<usize>>,
    n: usize,
}

impl DecoderGraph {
    fn new(g: &TannerGraph) -> Self {
        let mut cn_edges = vec![Vec::new(); g.cn_count()];
        let mut vn_edges = vec![Vec::new(); g.vn_count()];
        let mut next = 0usize;
        for cn in 0..g.cn_count() {
            for &vn in g.cn_neighbors(cn) {
                cn_edges[cn].push((vn, next));
                vn_edges[vn].push(next);
                next += 1;
            }
        }
        DecoderGraph {
            cn_edges,
            vn_edges,
            n: g.vn_count(),
        }
    }

    fn edge_count(&self) -> usize {
        self.vn_edges.iter().map(|e| e.len()).sum()
    }
}

/// Flooding-schedule sum-product decoding of one frame.
///
/// Check updates use the tanh product rule; variable updates sum the channel
/// LLR with the incoming check messages. Messages are clamped to keep atanh
/// finite. Exits early as soon as the hard decisions satisfy all checks.
pub fn spa_decode(
    g: &TannerGraph,
    llr: &[f64],
    max_iterations: usize,
) -> Result<DecodeOutcome, SimError> {
    if llr.len() != g.vn_count() {
        return Err(SimError::LlrLength {
            expected: g.vn_count(),
            got: llr.len(),
        });
    }
    if max_iterations == 0 {
        return Err(SimError::ZeroIterations);
    }
    let dg = DecoderGraph::new(g);
    let mut workspace = SpaWorkspace::new(&dg);
    Ok(workspace.decode(&dg, llr, max_iterations))
}

/// Message buffers, reusable across frames.
struct SpaWorkspace {
    var_to_check: Vec<f64>,
    check_to_var: Vec<f64>,
    posterior: Vec<f64>,
    hard: Vec<u8>,
}

impl SpaWorkspace {
    fn new(dg: &DecoderGraph) -> Self {
        let edges = dg.edge_count();
        SpaWorkspace {
            var_to_check: vec![0.0; edges],
            check_to_var: vec![0.0; edges],
            posterior: vec![0.0; dg.n],
            hard: vec![0; dg.n],
        }
    }

    fn decode(&mut self, dg: &DecoderGraph, llr: &[f64], max_iterations: usize) -> DecodeOutcome {
        let (iterations, syndrome_ok) = self.decode_in_place(dg, llr, max_iterations);
        DecodeOutcome {
            hard: self.hard.clone(),
            iterations,
            syndrome_ok,
        }
    }

    fn decode_in_place(
        &mut self,
        dg: &DecoderGraph,
        llr: &[f64],
        max_iterations: usize,
    ) -> (usize, bool) {
        for (vn, edges) in dg.vn_edges.iter().enumerate() {
            for &e in edges {
                self.var_to_check[e] = llr[vn];
            }
        }
        self.check_to_var.fill(0.0);

        for iteration in 1..=max_iterations {
            // Check-node update: product of tanh(m/2) over all sockets but
            // the receiving one (division form, guarded by the clip).
            for sockets in &dg.cn_edges {
                let mut product = 1.0f64;
                for &(_, e) in sockets {
                    product *= (0.5 * self.var_to_check[e]).tanh();
                }
                for &(_, e) in sockets {
                    let t = (0.5 * self.var_to_check[e]).tanh();
                    let rest = if t.abs() > 1e-12 {
                        product / t
                    } else {
                        // Recompute without the zero term.
                        sockets
                            .iter()
                            .filter(|&&(_, other)| other != e)
                            .map(|&(_, other)| (0.5 * self.var_to_check[other]).tanh())
                            .product()
                    };
                    let msg = 2.0 * rest.clamp(-0.999_999_999_999, 0.999_999_999_999).atanh();
                    self.check_to_var[e] = msg.clamp(-MESSAGE_CLIP, MESSAGE_CLIP);
                }
            }

            // Variable-node update and posterior.
            for (vn, edges) in dg.vn_edges.iter().enumerate() {
                let total: f64 = llr[vn] + edges.iter().map(|&e| self.check_to_var[e]).sum::<f64>();
                self.posterior[vn] = total;
                for &e in edges {
                    self.var_to_check[e] =
                        (total - self.check_to_var[e]).clamp(-MESSAGE_CLIP, MESSAGE_CLIP);
                }
                self.hard[vn] = u8::from(total < 0.0);
            }

            if self.syndrome_ok(dg) {
                return (iteration, true);
            }
        }
        (max_iterations, self.syndrome_ok(dg))
    }

    fn syndrome_ok(&self, dg: &DecoderGraph) -> bool {
        dg.cn_edges.iter().all(|sockets| {
            sockets
                .iter()
                .fold(0u8, |acc, &(vn, _)| acc ^ self.hard[vn])
                == 0
        })
    }

    /// Decode and return (bit errors against the all-zero word, iterations),
    /// without cloning the hard-decision buffer.
    fn decode_counts(
        &mut self,
        dg: &DecoderGraph,
        llr: &[f64],
        max_iterations: usize,
    ) -> (u64, usize) {
        let (iterations, _) = self.decode_in_place(dg, llr, max_iterations);
        let bit_errors = self.hard.iter().map(|&b| u64::from(b)).sum::<u64>();
        (bit_errors, iterations)
    }
}

/// Result row for one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
}

/// All-zero-codeword Monte-Carlo estimation of BER and FER per SNR point.
///
/// Frames run in deterministic batches; a point stops once it has at least
/// `min_frame_errors` frame errors or `max_frames` frames.
pub fn run_ber(g: &TannerGraph, cfg: &SimConfig) -> Result<Vec<SnrPoint>, SimError> {
    let n = g.vn_count();
    let m = g.cn_count();
    let rate = (n as f64 - m as f64) / n as f64;
    if rate <= 0.0 {
        return Err(SimError::NonPositiveRate { rate });
    }
    if cfg.max_iterations == 0 {
        return Err(SimError::ZeroIterations);
    }

    let dg = DecoderGraph::new(g);
    let mut points = Vec::with_capacity(cfg.ebn0_db.len());
    for (point_idx, &ebn0_db) in cfg.ebn0_db.iter().enumerate() {
        let sigma = noise_sigma(ebn0_db, rate);
        let sigma2 = sigma * sigma;
        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        let mut frame_errors = 0u64;
        let mut iteration_sum = 0u64;

        const BATCH: u64 = 2048;
        while frames < cfg.max_frames && frame_errors < cfg.min_frame_errors {
            let batch = BATCH.min(cfg.max_frames - frames);
            let (bits, errs, iters) = (0..batch)
                .into_par_iter()
                .map_init(
                    || (SpaWorkspace::new(&dg), vec![0.0f64; n]),
                    |(workspace, llr), offset| {
                        let frame = frames + offset;
                        let stream = derive_stream_seed(cfg.seed, point_idx as u64, frame);
                        simulate_frame(
                            &dg,
                            sigma,
                            sigma2,
                            stream,
                            cfg.max_iterations,
                            workspace,
                            llr,
                        )
                    },
                )
                .reduce(
                    || (0u64, 0u64, 0u64),
                    |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
                );
            bit_errors += bits;
            frame_errors += errs;
            iteration_sum += iters;
            frames += batch;
        }

        points.push(SnrPoint {
            ebn0_db,
            frames,
            bit_errors,
            frame_errors,
            ber: bit_errors as f64 / (frames as f64 * n as f64),
            fer: frame_errors as f64 / frames as f64,
            avg_iterations: iteration_sum as f64 / frames as f64,
        });
    }
    Ok(points)
}

/// One frame: all-zero codeword, fresh noise stream, decode, count errors.
/// Returns (bit errors, frame error flag, iterations used).
fn simulate_frame(
    dg: &DecoderGraph,
    sigma: f64,
    sigma2: f64,
    stream_seed: u64,
    max_iterations: usize,
    workspace: &mut SpaWorkspace,
    llr: &mut [f64],
) -> (u64, u64, u64) {
    let mut noise = GaussianSource::new(stream_seed);
    for value in llr.iter_mut() {
        let y = 1.0 + sigma * noise.next_normal();
        *value = (2.0 * y / sigma2).clamp(-CHANNEL_LLR_CLIP, CHANNEL_LLR_CLIP);
    }
    let (bit_errors, iterations) = workspace.decode_counts(dg, llr, max_iterations);
    (bit_errors, u64::from(bit_errors > 0), iterations as u64)
}
