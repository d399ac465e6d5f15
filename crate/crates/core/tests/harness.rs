use std::io::BufReader;
use std::process::Command;

use htester::harness::{
    parse_report, run_experiment, run_experiment_detailed, write_report, ExperimentConfig,
    ReportFormat, ReportRow,
};
use htester::testers::Decision;

const SIMPLE: &str = include_str!("../configs/simple.toml");
const CONFIG_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn rows(k: usize) -> Vec<ReportRow> {
    (0..k)
        .map(|i| ReportRow {
            scenario: "a,b \"quoted\"".into(),
            n: 10 + i,
            eps: 0.1 * (i + 1) as f64,
            delta: 1.0 / 3.0,
            trial: i,
            seed: u64::MAX - i as u64,
            verdict: if i % 2 == 0 {
                Decision::Accept
            } else {
                Decision::Reject
            },
            samples_used: 1 << 40,
            wall_ms: std::f64::consts::PI * i as f64,
            diag_digest: format!("{i:016x}"),
        })
        .collect()
}

fn emit(rows: &[ReportRow], format: ReportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    write_report(rows, format, &mut buf, "mem").unwrap();
    buf
}

#[test]
fn three_rows_four_lines() {
    let text = String::from_utf8(emit(&rows(3), ReportFormat::Csv)).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        text.lines().next().unwrap(),
        "scenario,n,eps,delta,trial,seed,verdict,samples_used,wall_ms,diag_digest"
    );
}

#[test]
fn reports_round_trip() {
    let r = rows(5);
    for format in [ReportFormat::Csv, ReportFormat::JsonLines] {
        let bytes = emit(&r, format);
        assert_eq!(
            parse_report(BufReader::new(&bytes[..]), format).unwrap(),
            r,
            "{format:?}"
        );
    }
    let text = String::from_utf8(emit(&r, ReportFormat::JsonLines)).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("\"delta\":3.3333333333333331e-1"));
}

#[test]
fn same_config_same_bytes() {
    let cfg = ExperimentConfig::from_toml(SIMPLE).unwrap();
    let a = emit(&run_experiment(&cfg, 1).unwrap(), ReportFormat::Csv);
    let b = emit(&run_experiment(&cfg, 3).unwrap(), ReportFormat::Csv);
    assert_eq!(a, b);
}

#[test]
fn samples_column_counts_oracle_calls() {
    let cfg = ExperimentConfig::from_toml(SIMPLE).unwrap();
    let tc = cfg.constants.tester_config(0.3, 0.2);
    for o in run_experiment_detailed(&cfg, 1).unwrap() {
        // The column is the oracle's counter; the verdict counts its own draws.
        assert_eq!(o.row.samples_used, o.verdict.samples_used);
        assert_eq!(o.row.samples_used as usize, tc.simple_total(16, 0.3, 0.2));
    }
}

fn htester() -> Command {
    Command::new(env!("CARGO_BIN_EXE_htester"))
}

#[test]
fn cli_test_prints_verdicts() {
    let out = htester()
        .args(["test", "--config", &format!("{CONFIG_DIR}/simple.toml")])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("\"schema\":1"));
}

#[test]
fn cli_sweep_writes_json_lines() {
    let dir = std::env::temp_dir().join(format!("htester-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.jsonl");
    let out = htester()
        .args([
            "sweep",
            "--config",
            &format!("{CONFIG_DIR}/simple.toml"),
            "--format",
            "json-lines",
            "--threads",
            "2",
        ])
        .args(["--override", "trials=3", "--seed", "99", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = parse_report(
        BufReader::new(std::fs::File::open(&path).unwrap()),
        ReportFormat::JsonLines,
    )
    .unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].seed, htester::rng::trial_seed(99, 0, 0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_config_errors_exit_one() {
    let out = htester()
        .args(["sweep", "--config", "/nonexistent.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = htester()
        .args([
            "sweep",
            "--config",
            &format!("{CONFIG_DIR}/simple.toml"),
            "--override",
            "trials=0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
    let out = htester().args(["sweep", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_verify_reports_failures_with_two() {
    // The ξ-slope bound of 1 fails on the 4-sphere, so the suite exits with 2.
    let out = htester().args(["verify", "--quick"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL xi_slope_le_1"));
    assert!(err.contains("PASS gap_theorem"));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().lines().count(),
        err.lines().count()
    );
}
