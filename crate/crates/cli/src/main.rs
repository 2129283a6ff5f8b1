//! Command-line front end: construct codes, analyze cycle structure, batch
//! ensembles, and run Monte-Carlo decoding checks.
//!
//! All outputs are seed-deterministic. Files are written atomically (temp
//! file in the target directory, then rename). CSV schemas are documented in
//! the repository README.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ldpc_peg::alist::{read_alist, write_alist};
use ldpc_peg::analysis::{ace_spectrum, girth, vnlgd};
use ldpc_peg::construct::{run_construction, ConstructionConfig, Variant};
use ldpc_peg::ensemble::{generate_ensemble, EnsembleConfig};
use ldpc_peg::qc::{run_qc_construction, QcParams};
use ldpc_peg::sim::{run_ber, SimConfig};
use ldpc_peg::{DegreeDistribution, DegreeSequence, MetricKind, MetricValue, TannerGraph};

#[derive(Parser)]
#[command(
    name = "ldpc-peg",
    about = "Progressive edge-growth LDPC code construction and analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to the LDPC_PEG_THREADS variable, then to
    /// the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct one code and write it as an alist file.
    Construct(ConstructArgs),
    /// Analyze an alist file: girth, local-girth distribution, ACE spectrum.
    Analyze(AnalyzeArgs),
    /// Construct and analyze a seeded batch of codes.
    Ensemble(EnsembleArgs),
    /// Monte-Carlo BER/FER estimation over BPSK + AWGN with sum-product
    /// decoding.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone)]
struct CodeParams {
    /// Check-node count (rows).
    #[arg(long)]
    m: usize,
    /// Variable-node count (columns).
    #[arg(long)]
    n: usize,
    /// File with n whitespace-separated variable-node degrees.
    #[arg(long, conflicts_with = "gamma")]
    degrees: Option<PathBuf>,
    /// Degree distribution, e.g. "0.5x^2 + 0.5x^3" (expanded by largest
    /// remainder, nondecreasing order).
    #[arg(long)]
    gamma: Option<String>,
    /// Metric: "dist" or "dist-ace".
    #[arg(long, default_value = "dist")]
    metric: String,
    /// Lookahead depth r (>= 1). 0 selects the no-lookahead legacy rule.
    #[arg(long, default_value_t = 1)]
    edge_trials: usize,
    /// Circulant size N for quasi-cyclic construction; 1 = non-QC.
    #[arg(long, default_value_t = 1)]
    qc_n: usize,
    /// Restrict every nonzero circulant to a permutation matrix.
    #[arg(long, default_value_t = false)]
    cpm_only: bool,
}

#[derive(Args, Clone)]
struct ConstructArgs {
    #[command(flatten)]
    params: CodeParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output alist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input alist path.
    #[arg(long = "in")]
    input: PathBuf,
    /// ACE spectrum depth d, covering cycle lengths up to 2d.
    #[arg(long, default_value_t = 5)]
    ace_depth: usize,
    /// Output CSV path.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct EnsembleArgs {
    #[command(flatten)]
    params: CodeParams,
    /// Number of codes.
    #[arg(long)]
    count: usize,
    /// Seed of the first code; member i uses base_seed + i.
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// ACE spectrum depth for the per-code analysis.
    #[arg(long, default_value_t = 5)]
    ace_depth: usize,
    /// Output CSV path (one row per code).
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Input alist path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated Eb/N0 points in dB, e.g. "1.0,2.0,3.0".
    #[arg(long, value_delimiter = ',')]
    ebn0: Vec<f64>,
    /// Decoder iteration cap.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Stop an SNR point after this many frame errors.
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,
    /// Hard cap on frames per SNR point.
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (one row per SNR point).
    #[arg(long)]
    report: PathBuf,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("LDPC_PEG_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing the thread pool")?;
    }
    match cli.command {
        Command::Construct(args) => construct(&args),
        Command::Analyze(args) => analyze(&args),
        Command::Ensemble(args) => ensemble(&args),
        Command::Simulate(args) => simulate(&args),
    }
}

fn parse_metric(name: &str) -> Result<MetricKind> {
    match name {
        "dist" => Ok(MetricKind::Distance),
        "dist-ace" => Ok(MetricKind::DistanceAce),
        other => bail!("unknown metric {other:?}; use \"dist\" or \"dist-ace\""),
    }
}

fn load_degrees(args: &CodeParams) -> Result<DegreeSequence> {
    match (&args.degrees, &args.gamma) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading degree file {}", path.display()))?;
            let degrees: Vec<usize> = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .with_context(|| format!("degree file entry {tok:?}"))
                })
                .collect::<Result<_>>()?;
            if degrees.len() != args.n {
                bail!(
                    "degree file lists {} degrees, --n is {}",
                    degrees.len(),
                    args.n
                );
            }
            Ok(DegreeSequence::new(degrees)?)
        }
        (None, Some(spec)) => {
            let dist = DegreeDistribution::parse(spec)?;
            let degrees = dist.expand(args.n, args.qc_n)?;
            let mut realized: Vec<(usize, usize)> = Vec::new();
            for &d in degrees.as_slice() {
                match realized.last_mut() {
                    Some((deg, count)) if *deg == d => *count += 1,
                    _ => realized.push((d, 1)),
                }
            }
            let summary = realized
                .iter()
                .map(|(d, c)| format!("{c} nodes of degree {d}"))
                .collect::<Vec<_>>()
                .join(", ");
            println!("degree distribution expanded: {summary}");
            Ok(degrees)
        }
        _ => bail!("exactly one of --degrees FILE or --gamma SPEC is required"),
    }
}

/// --edge-trials 0 selects the no-lookahead legacy rule (plain metric
/// maximization); any positive value selects the multi-edge rule with that
/// lookahead depth.
fn build_config(args: &CodeParams, seed: u64) -> Result<(ConstructionConfig, Option<QcParams>)> {
    let degrees = load_degrees(args)?;
    let (variant, edge_trials) = if args.edge_trials == 0 {
        (Variant::MPega, 1)
    } else {
        (Variant::MmPega, args.edge_trials)
    };
    let cfg = ConstructionConfig {
        m: args.m,
        n: args.n,
        degrees,
        metric: parse_metric(&args.metric)?,
        edge_trials,
        seed,
        variant,
    };
    let qc = if args.qc_n > 1 || args.cpm_only {
        Some(QcParams {
            circulant_size: args.qc_n,
            cpm_only: args.cpm_only,
        })
    } else {
        None
    };
    Ok((cfg, qc))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(dir) => dir.join(format!(
            ".{}.tmp-{}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            std::process::id()
        )),
        None => PathBuf::from(format!(".tmp-{}", std::process::id())),
    };
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn construct(args: &ConstructArgs) -> Result<()> {
    let (cfg, qc) = build_config(&args.params, args.seed)?;
    let (graph, _trace) = match &qc {
        None => run_construction(&cfg)?,
        Some(q) => run_qc_construction(&cfg, q)?,
    };
    write_atomic(&args.out, &write_alist(&graph))?;
    println!(
        "constructed {}x{} code with {} edges -> {}",
        args.params.m,
        args.params.n,
        graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn metric_csv(v: &MetricValue) -> String {
    match v {
        MetricValue::Finite { distance, .. } => distance.to_string(),
        _ => "inf".into(),
    }
}

fn analyze_csv(g: &TannerGraph, ace_depth: usize) -> Result<String> {
    let spectrum = ace_spectrum(g, ace_depth)?;
    let g_dist = girth(g, MetricKind::Distance);
    let dist = vnlgd(g);
    let mut header = vec!["n".to_string(), "m".into(), "girth".into()];
    for i in 1..=ace_depth {
        header.push(format!("eta_{}", 2 * i));
    }
    header.push("vnlgd".into());
    let mut row = vec![
        g.vn_count().to_string(),
        g.cn_count().to_string(),
        metric_csv(&g_dist),
    ];
    for entry in spectrum.entries() {
        row.push(entry.to_string());
    }
    row.push(format!("\"{dist}\""));
    Ok(format!("{}\n{}\n", header.join(","), row.join(",")))
}

fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let graph = read_alist(&text)?;
    let csv = analyze_csv(&graph, args.ace_depth)?;
    write_atomic(&args.report, &csv)?;
    print!("{csv}");
    Ok(())
}

fn ensemble(args: &EnsembleArgs) -> Result<()> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    let (construction, qc) = build_config(&args.params, 0)?;
    let cfg = EnsembleConfig {
        construction,
        qc,
        d_max: args.ace_depth,
    };
    let report = generate_ensemble(&cfg, args.count, args.base_seed)?;

    let mut csv = String::new();
    let mut header = vec!["seed".to_string(), "girth".into()];
    for i in 1..=args.ace_depth {
        header.push(format!("eta_{}", 2 * i));
    }
    header.push("vnlgd".into());
    csv.push_str(&header.join(","));
    csv.push('\n');
    for code in &report.codes {
        let mut row = vec![code.seed.to_string(), metric_csv(&code.girth)];
        for entry in code.spectrum.entries() {
            row.push(entry.to_string());
        }
        row.push(format!("\"{}\"", code.vnlgd));
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_atomic(&args.report, &csv)?;

    let average = report.average_spectrum();
    let (max_spectrum, max_freq) = report.max_spectrum();
    let (min_vnlgd, vnlgd_freq) = report.min_vnlgd();
    let avg = average
        .iter()
        .map(|slot| match slot.finite_mean {
            None => "inf".to_string(),
            Some(mean) if slot.fraction_infinite == 0.0 => format!("{mean:.2}"),
            Some(mean) => format!("{mean:.2}[{:.0}% inf]", slot.fraction_infinite * 100.0),
        })
        .collect::<Vec<_>>()
        .join(", ");
    println!("codes:            {}", report.codes.len());
    println!("average spectrum: ({avg})");
    println!("maximum spectrum: {max_spectrum}  frequency {max_freq:.4}");
    println!("minimum vnlgd:    {min_vnlgd}  frequency {vnlgd_freq:.4}");
    println!("report -> {}", args.report.display());
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    if args.ebn0.is_empty() {
        bail!("--ebn0 needs at least one point");
    }
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let graph = read_alist(&text)?;
    let cfg = SimConfig {
        ebn0_db: args.ebn0.clone(),
        max_iterations: args.iters,
        min_frame_errors: args.min_frame_errors,
        max_frames: args.max_frames,
        seed: args.seed,
    };
    let points = run_ber(&graph, &cfg)?;
    let mut csv = String::from("ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iters\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e},{:.2}\n",
            p.ebn0_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer, p.avg_iterations
        ));
    }
    write_atomic(&args.report, &csv)?;
    print!("{csv}");
    Ok(())
}
