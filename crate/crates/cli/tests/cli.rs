//! End-to-end checks of the command-line surface: flags, file formats, exit
//! codes, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ldpc-peg"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ldpc-peg-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning the binary");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn construct_then_analyze_round_trip() {
    let dir = workdir("roundtrip");
    let alist = dir.join("code.alist");
    let report = dir.join("analysis.csv");

    run_ok(bin().args([
        "construct",
        "--m",
        "16",
        "--n",
        "32",
        "--gamma",
        "1.0x^3",
        "--metric",
        "dist",
        "--edge-trials",
        "2",
        "--seed",
        "11",
        "--out",
        alist.to_str().unwrap(),
    ]));
    assert!(alist.exists());

    let out = run_ok(bin().args([
        "analyze",
        "--in",
        alist.to_str().unwrap(),
        "--ace-depth",
        "5",
        "--report",
        report.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("n,m,girth,eta_2,eta_4,eta_6,eta_8,eta_10,vnlgd"));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert_eq!(csv, stdout);
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("32,16,"), "row: {row}");
}

#[test]
fn construct_is_seed_deterministic() {
    let dir = workdir("determinism");
    let a = dir.join("a.alist");
    let b = dir.join("b.alist");
    for path in [&a, &b] {
        run_ok(bin().args([
            "construct",
            "--m",
            "12",
            "--n",
            "24",
            "--gamma",
            "0.5x^2 + 0.5x^3",
            "--metric",
            "dist-ace",
            "--edge-trials",
            "2",
            "--seed",
            "77",
            "--out",
            path.to_str().unwrap(),
        ]));
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
}

#[test]
fn qc_construct_satisfies_orbit_structure() {
    let dir = workdir("qc");
    let alist = dir.join("qc.alist");
    run_ok(bin().args([
        "construct",
        "--m",
        "24",
        "--n",
        "48",
        "--gamma",
        "1.0x^3",
        "--edge-trials",
        "1",
        "--qc-n",
        "6",
        "--seed",
        "5",
        "--out",
        alist.to_str().unwrap(),
    ]));
    let g = ldpc_peg::alist::read_alist(&std::fs::read_to_string(&alist).unwrap()).unwrap();
    let weights = ldpc_peg::qc::verify_qc_structure(&g, &ldpc_peg::QcParams::new(6)).unwrap();
    let total: usize = weights.iter().flatten().sum();
    assert_eq!(total * 6, g.edge_count());
}

#[test]
fn ensemble_emits_one_row_per_code() {
    let dir = workdir("ensemble");
    let report = dir.join("ensemble.csv");
    let out = run_ok(bin().args([
        "ensemble",
        "--m",
        "12",
        "--n",
        "24",
        "--gamma",
        "1.0x^3",
        "--edge-trials",
        "2",
        "--count",
        "4",
        "--base-seed",
        "30",
        "--ace-depth",
        "4",
        "--report",
        report.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,girth,eta_2,eta_4,eta_6,eta_8,vnlgd"
    );
    assert_eq!(lines.count(), 4);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("maximum spectrum:"));
    assert!(stdout.contains("minimum vnlgd:"));
}

#[test]
fn simulate_emits_schema_stable_csv() {
    let dir = workdir("simulate");
    let alist = dir.join("code.alist");
    let report = dir.join("ber.csv");
    run_ok(bin().args([
        "construct",
        "--m",
        "16",
        "--n",
        "32",
        "--gamma",
        "1.0x^3",
        "--edge-trials",
        "2",
        "--seed",
        "3",
        "--out",
        alist.to_str().unwrap(),
    ]));
    run_ok(bin().args([
        "simulate",
        "--in",
        alist.to_str().unwrap(),
        "--ebn0",
        "2.0,6.0",
        "--iters",
        "30",
        "--min-frame-errors",
        "5",
        "--max-frames",
        "4000",
        "--seed",
        "2",
        "--report",
        report.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iters"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("2,"));
    assert!(rows[1].starts_with("6,"));
}

#[test]
fn errors_exit_nonzero_with_diagnostics() {
    // Unknown metric.
    let out = bin()
        .args([
            "construct",
            "--m",
            "4",
            "--n",
            "8",
            "--gamma",
            "1.0x^2",
            "--metric",
            "fancy",
            "--out",
            "/tmp/never.alist",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown metric"));

    // Missing degree source.
    let out = bin()
        .args([
            "construct",
            "--m",
            "4",
            "--n",
            "8",
            "--out",
            "/tmp/never.alist",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());

    // Unreadable input file.
    let out = bin()
        .args([
            "analyze",
            "--in",
            "/nonexistent/x.alist",
            "--report",
            "/tmp/never.csv",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());

    // Malformed alist names the offending line.
    let dir = workdir("badalist");
    let bad = dir.join("bad.alist");
    std::fs::write(&bad, "3 2\n2 2\n2 0 1\n1 2\n1 2\n").unwrap();
    let out = bin()
        .args([
            "analyze",
            "--in",
            bad.to_str().unwrap(),
            "--report",
            dir.join("never.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));
}

#[test]
fn degree_file_input_works() {
    let dir = workdir("degrees");
    let degrees = dir.join("degrees.txt");
    std::fs::write(&degrees, "2 2 3 3 3 2 2 2\n").unwrap();
    let alist = dir.join("code.alist");
    run_ok(bin().args([
        "construct",
        "--m",
        "6",
        "--n",
        "8",
        "--degrees",
        degrees.to_str().unwrap(),
        "--edge-trials",
        "1",
        "--seed",
        "9",
        "--out",
        alist.to_str().unwrap(),
    ]));
    let g = ldpc_peg::alist::read_alist(&std::fs::read_to_string(&alist).unwrap()).unwrap();
    assert_eq!(g.vn_degree(2), 3);
    assert_eq!(g.edge_count(), 2 + 2 + 3 + 3 + 3 + 2 + 2 + 2);
}

/// Full-size irregular construction: the distance+ACE build has no cycles of
/// length 2 or 4, and the quasi-cyclic variant keeps its orbit structure.
#[test]
fn full_scale_irregular_constructions() {
    let dir = workdir("fullscale");
    let alist = dir.join("irregular.alist");
    let report = dir.join("irregular.csv");
    run_ok(bin().args([
        "construct",
        "--m",
        "504",
        "--n",
        "1008",
        "--gamma",
        "0.47532x^2 + 0.27953x^3 + 0.03486x^4 + 0.10889x^5 + 0.10138x^15",
        "--metric",
        "dist-ace",
        "--edge-trials",
        "1",
        "--seed",
        "12",
        "--out",
        alist.to_str().unwrap(),
    ]));
    run_ok(bin().args([
        "analyze",
        "--in",
        alist.to_str().unwrap(),
        "--ace-depth",
        "5",
        "--report",
        report.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(&report).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "1008");
    assert_eq!(fields[1], "504");
    assert_eq!(fields[3], "inf", "length-2 slot");
    assert_eq!(fields[4], "inf", "length-4 slot");

    let qc_alist = dir.join("qc36.alist");
    run_ok(bin().args([
        "construct",
        "--m",
        "504",
        "--n",
        "1008",
        "--gamma",
        "0.46429x^2 + 0.28571x^3 + 0.03571x^4 + 0.10714x^5 + 0.10714x^15",
        "--metric",
        "dist-ace",
        "--edge-trials",
        "1",
        "--qc-n",
        "36",
        "--seed",
        "12",
        "--out",
        qc_alist.to_str().unwrap(),
    ]));
    let g = ldpc_peg::alist::read_alist(&std::fs::read_to_string(&qc_alist).unwrap()).unwrap();
    let weights = ldpc_peg::qc::verify_qc_structure(&g, &ldpc_peg::QcParams::new(36)).unwrap();
    let total: usize = weights.iter().flatten().sum();
    assert_eq!(total * 36, g.edge_count());
}
