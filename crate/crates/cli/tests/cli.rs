use std::io::Write;
use std::process::{Command, Output};

use paradiff::experiments::{GROWTH_COLUMNS, RATIO_COLUMNS, SUPPORT_COLUMNS};

fn paradiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paradiff")).args(args).output().expect("binary runs")
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_documents_columns_and_exit_codes() {
    let top = paradiff(&["--help"]);
    assert_eq!(top.status.code(), Some(0));
    let text = stdout(&top);
    for sub in ["boundedness", "sharpness", "negsmooth", "l2growth", "supportcheck", "partition-dump"] {
        assert!(text.contains(sub), "missing {sub}");
    }
    assert!(text.contains("Exit codes"));
    let columns = |sub: &str| stdout(&paradiff(&[sub, "--help"])).replace("  ", " ");
    for (sub, header) in [("boundedness", RATIO_COLUMNS), ("l2growth", GROWTH_COLUMNS), ("supportcheck", SUPPORT_COLUMNS)] {
        let help = columns(sub);
        for col in header.split(',') {
            assert!(help.contains(col), "{sub} help lacks column {col}");
        }
    }
}

#[test]
fn boundedness_run_writes_csv() {
    let cfg = config_file("experiment = boundedness\ndepths = 6..7\ntrials = 2\n");
    let o = paradiff(&["boundedness", "--config", cfg.path().to_str().unwrap(), "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == RATIO_COLUMNS));
    assert!(text.contains("# seed=5"));
    assert!(text.contains("# rng=chacha8"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn same_seed_same_output() {
    let args = ["negsmooth", "--depth", "6..7", "--seed", "9"];
    let a = paradiff(&args);
    let b = paradiff(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = paradiff(&["negsmooth", "--depth", "6..7", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_output() {
    let o = paradiff(&["sharpness", "--depth", "10", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"]["passed"], serde_json::Value::Bool(true));
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(paradiff(&["boundedness", "--bogus"]).status.code(), Some(1));
    assert_eq!(paradiff(&["boundedness", "--out", "xml"]).status.code(), Some(1));
    assert_eq!(paradiff(&["nothing"]).status.code(), Some(1));
    assert_eq!(paradiff(&[]).status.code(), Some(1));
    assert_eq!(paradiff(&["boundedness", "--config", "/nonexistent/file"]).status.code(), Some(1));
    let bad_key = config_file("colour = red\n");
    assert_eq!(paradiff(&["boundedness", "--config", bad_key.path().to_str().unwrap()]).status.code(), Some(1));
    let wrong_kind = config_file("experiment = sharpness\n");
    assert_eq!(paradiff(&["boundedness", "--config", wrong_kind.path().to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(paradiff(&["sharpness", "--depth", "4"]).status.code(), Some(1));
}

#[test]
fn failed_verdict_exits_with_two() {
    let cfg = config_file("symbol = identity\ndepths = 6..7\ntrials = 2\nexpect = growing\n");
    let o = paradiff(&["boundedness", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("verdict: fail"));
    assert!(stdout(&o).contains("# verdict=fail"));
}

#[test]
fn output_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("growth.csv");
    let cfg = config_file(&format!("depths = 7\nsweep = 1..3\ntrials = 2\noutput = {}\n", path.display()));
    let o = paradiff(&["l2growth", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.lines().any(|l| l == GROWTH_COLUMNS));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn supportcheck_passes() {
    let o = paradiff(&["supportcheck", "--depth", "8", "--config", config_file("trials = 3\n").path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().any(|l| l == SUPPORT_COLUMNS));
}

#[test]
fn partition_dump_formats() {
    let o = paradiff(&["partition-dump", "--depth", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,k1,value"));
    let total: f64 = lines
        .filter(|l| l.split(',').nth(1) == Some("3"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    let two = paradiff(&["partition-dump", "--dim", "2", "--depth", "4"]);
    assert!(stdout(&two).starts_with("j,k1,k2,value"));
    let json = paradiff(&["partition-dump", "--depth", "4", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|e| e["value"].as_f64().unwrap() > 0.0));
    assert_eq!(paradiff(&["partition-dump", "--dim", "3"]).status.code(), Some(1));
}
