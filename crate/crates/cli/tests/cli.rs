use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use depcross::pipeline::{SentenceScope, TreebankSummary};
use depcross::report::AnalyzeReport;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn depcross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depcross"))
        .args(args)
        .env_remove("DEPCROSS_T_REPLICAS")
        .output()
        .expect("failed to run depcross")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows of a TSV table as maps from column name to value.
fn rows(tsv: &str) -> Vec<std::collections::BTreeMap<String, String>> {
    let mut lines = tsv.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split('\t').map(String::from)).collect())
        .collect()
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let clean = fixture("clean.conll");
    let planar = fixture("all_planar.conll");
    for out in [&a, &b] {
        let args = ["analyze", path(&clean), path(&planar), "--seed", "42", "--format", "json", "-o", path(out)];
        stdout(&depcross(&args));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let report = AnalyzeReport::from_json(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(report.seed, 42);
    assert_eq!(report.treebanks.len(), 2);
}

#[test]
fn all_planar_row() {
    let out = stdout(&depcross(&["analyze", path(&fixture("all_planar.conll")), "--t-replicas", "500"]));
    let r = &rows(&out)[0];
    assert_eq!(r["treebank"], "all_planar");
    assert_eq!(r["M"], "6");
    assert_eq!(r["p_tau_zero"], "1");
    assert_eq!(r["p_value"], "1");
    assert_eq!(r["p0"], "1");
}

#[test]
fn correlated_simulation_is_significant() {
    let dir = TempDir::new().unwrap();
    let mut corpus = String::new();
    for n in 8..=12 {
        let n = n.to_string();
        let seed = format!("{n}0");
        let args = ["simulate", "--kind", "uniform-random", "--n", &n, "--count", "150", "--seed", &seed];
        corpus.push_str(&stdout(&depcross(&args)));
    }
    let file = dir.path().join("random.conll");
    fs::write(&file, corpus).unwrap();
    let out = stdout(&depcross(&["analyze", path(&file), "--t-replicas", "2000"]));
    let r = &rows(&out)[0];
    assert_eq!(r["M"], "5");
    assert_eq!(r["S"], "750");
    assert!(r["p_value"] == "<1/2000" || r["p_value"].parse::<f64>().unwrap() < 0.05, "{r:?}");
}

#[test]
fn analyze_from_metrics_matches_direct_run() {
    let dir = TempDir::new().unwrap();
    let conll = dir.path().join("sim.conll");
    let metrics = dir.path().join("sim.tsv");
    let text = stdout(&depcross(&["simulate", "--kind", "uniform-random", "--n", "9", "--count", "200", "--seed", "3"]));
    fs::write(&conll, text).unwrap();
    stdout(&depcross(&["metrics", path(&conll), "-o", path(&metrics)]));
    let direct = stdout(&depcross(&["analyze", path(&conll), "--format", "json", "--t-replicas", "3000"]));
    let replay = stdout(&depcross(&[
        "analyze",
        "--from-metrics",
        path(&metrics),
        "--format",
        "json",
        "--t-replicas",
        "3000",
    ]));
    assert_eq!(direct, replay);
}

#[test]
fn metrics_rows() {
    let out = stdout(&depcross(&["metrics", path(&fixture("clean.conll"))]));
    let r = rows(&out);
    assert_eq!(r.len(), 4);
    assert_eq!(r[1]["source_id"], "clean#2");
    assert_eq!((r[1]["n"].as_str(), r[1]["D"].as_str(), r[1]["C"].as_str()), ("5", "8", "2"));

    let star = rows(&stdout(&depcross(&["metrics", path(&fixture("star.conll"))])));
    assert!(star.iter().all(|r| r["C"] == "0"));

    let out = depcross(&["metrics", path(&fixture("cycle.conll"))]);
    assert_eq!(rows(&stdout(&out)).len(), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 rejected"));
}

fn summary(name: &str, p_value: f64, p0: f64) -> TreebankSummary {
    TreebankSummary {
        name: name.into(),
        m: 20,
        tau_zero: 2,
        tau_pos: 10,
        all_planar: 1,
        p_tau_zero: Some(0.1),
        p_tau_pos: Some(0.5),
        p_value: Some(p_value),
        p0: Some(p0),
        replicas: 10_000,
        exceed: Some(0),
        s: 1000,
        mean_n: Some(12.0),
        excluded_lengths: 3,
    }
}

fn write_report(dir: &Path, file: &str, treebanks: Vec<TreebankSummary>) -> PathBuf {
    let path = dir.join(file);
    let report = AnalyzeReport::new(1, 10_000, SentenceScope::Accepted, treebanks);
    fs::write(&path, report.to_json().unwrap()).unwrap();
    path
}

#[test]
fn meta_right_tail_is_one_sixth() {
    let dir = TempDir::new().unwrap();
    let a = write_report(dir.path(), "a.json", vec![summary("a", 0.0, 1.0), summary("b", 0.01, 2.0)]);
    let b = write_report(dir.path(), "b.json", vec![summary("c", 0.2, 3.0), summary("d", 0.9, 4.0)]);
    let out = stdout(&depcross(&["meta", path(&a), path(&b), "--meta-replicas", "100000", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["subset"], serde_json::json!(["c", "d"]));
    let p0 = v["features"].as_array().unwrap().iter().find(|f| f["feature"] == "p0").unwrap();
    assert_eq!(p0["mean"].as_f64().unwrap(), 3.5);
    assert_eq!(p0["left_p"].as_f64().unwrap(), 1.0);
    let right = p0["right_p"].as_f64().unwrap();
    assert!((right - 1.0 / 6.0).abs() < 0.006, "{right}");

    let tsv = stdout(&depcross(&["meta", path(&a), path(&b), "--meta-replicas", "1000"]));
    assert!(tsv.starts_with("feature\tmean\tleft_p\tright_p\np0\t3.5\t1\t"));
}

#[test]
fn meta_with_every_treebank_rejected_fails() {
    let dir = TempDir::new().unwrap();
    let a = write_report(dir.path(), "a.json", vec![summary("a", 0.0, 1.0), summary("b", 0.01, 2.0)]);
    let out = depcross(&["meta", path(&a)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty non-rejected subset"));
}

#[test]
fn simulate_star_placements() {
    let out = stdout(&depcross(&["simulate", "--kind", "star", "--n", "4", "--all-placements", "--emit", "metrics"]));
    let d: Vec<String> = rows(&out).iter().map(|r| r["D"].clone()).collect();
    assert_eq!(d, ["6", "4", "4", "6"]);
    let linear = stdout(&depcross(&["simulate", "--kind", "linear", "--n", "5", "--emit", "metrics"]));
    assert_eq!(rows(&linear)[0]["D"], "4");
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--kind", "uniform-random", "--n", "10", "--count", "100", "--seed", "7", "--shuffle"];
    let a = stdout(&depcross(&args));
    assert_eq!(a, stdout(&depcross(&args)));
    assert_eq!(a.split("\n\n").filter(|b| !b.trim().is_empty()).count(), 100);
    let other = stdout(&depcross(&["simulate", "--kind", "uniform-random", "--n", "10", "--count", "100", "--seed", "8"]));
    assert_ne!(a, other);
}

#[test]
fn validate_reports_reasons() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("debug.tsv");
    let out = stdout(&depcross(&[
        "validate",
        path(&fixture("cycle.conll")),
        path(&fixture("clean.conll")),
        path(&fixture("all_punct.conll")),
        "--debug-dump",
        path(&dump),
    ]));
    let r = rows(&out);
    assert_eq!((r[0]["rejected"].as_str(), r[0]["cycle"].as_str(), r[0]["multi_root"].as_str()), ("2", "1", "1"));
    assert_eq!(r[1]["rejected"], "0");
    assert_eq!((r[2]["rejected"].as_str(), r[2]["empty"].as_str()), ("1", "1"));
    let trace = rows(&fs::read_to_string(&dump).unwrap());
    assert_eq!(trace.len(), 7);
    assert_eq!(trace[0]["status"], "cycle");
    assert_eq!(trace[6]["status"], "empty");
}

#[test]
fn exit_codes() {
    assert_eq!(depcross(&["--help"]).status.code(), Some(0));
    assert_eq!(depcross(&["--version"]).status.code(), Some(0));
    assert_eq!(depcross(&["analyze"]).status.code(), Some(1));
    assert_eq!(depcross(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(depcross(&["analyze", "x.conll", "--alpha", "1.5"]).status.code(), Some(1));
    assert_eq!(depcross(&["analyze", "/nonexistent/x.conll"]).status.code(), Some(2));
    assert_eq!(depcross(&["simulate", "--kind", "star", "--n", "4", "--hub", "9"]).status.code(), Some(1));
    assert_eq!(
        depcross(&["analyze", path(&fixture("clean.conll")), "--punct-rule", "pos"]).status.code(),
        Some(1)
    );
    let strict = depcross(&["metrics", path(&fixture("malformed.conll")), "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn environment_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_depcross"))
        .args(["analyze", path(&fixture("all_planar.conll"))])
        .env("DEPCROSS_T_REPLICAS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_depcross"))
        .args(["analyze", path(&fixture("all_planar.conll")), "--format", "json"])
        .env("DEPCROSS_T_REPLICAS", "321")
        .output()
        .unwrap();
    let report = AnalyzeReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.replicas, 321);
}
