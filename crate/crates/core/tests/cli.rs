//! Runs the `negmono` binary end to end.

use std::process::{Command, Output};

use negmono::search::SearchResult;

fn negmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negmono"))
        .args(args)
        .env_remove("NEGMONO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("negmono-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn selftest_exits_zero() {
    let o = negmono(&["selftest", "--seed", "0"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 10);
    assert!(lines.iter().all(|l| l["passed"] == true));
}

#[test]
fn verify_conjecture_is_byte_identical() {
    let args = [
        "verify-conjecture",
        "--dims",
        "2x2x2",
        "--trials",
        "100",
        "--seed",
        "7",
    ];
    let a = negmono(&args);
    let b = negmono(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 900);
    for line in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["slack"].is_f64() && v["name"].is_string());
    }
}

#[test]
fn special_case_from_file_prints_trace() {
    let path = tmp("b.json");
    // non-square input is zero-padded to 2x2: [[0, 1], [0, 0]]
    std::fs::write(&path, r#"{"rows":1,"cols":2,"data":[[0,0],[1,0]]}"#).unwrap();
    let o = negmono(&["special-case", "--file", path.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["z"]["rows"], 4);
    let reports = v["reports"].as_array().unwrap();
    let id2 = reports.iter().find(|r| r["name"] == "ineqid2").unwrap();
    assert!(id2["slack"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn search_writes_replayable_result() {
    let path = tmp("search.ndjson");
    let o = negmono(&[
        "search",
        "--target",
        "ineq4",
        "--dims",
        "2x3x3",
        "--trials",
        "200",
        "--seed",
        "42",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let res: SearchResult =
        serde_json::from_str(std::fs::read_to_string(&path).unwrap().trim()).unwrap();
    assert_eq!(res.seed, 42);
    assert_eq!(res.violations, 0);
    assert!((res.replay().unwrap() - res.min_slack).abs() <= 1e-12);
}

#[test]
fn seed_env_applies_only_without_flag() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_negmono"));
        cmd.args(["search", "--trials", "2"])
            .args(extra)
            .env_remove("NEGMONO_SEED");
        if let Some(e) = env {
            cmd.env("NEGMONO_SEED", e);
        }
        let res: SearchResult = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        res.seed
    };
    assert_eq!(run(None, &[]), 0);
    assert_eq!(run(Some("5"), &[]), 5);
    assert_eq!(run(Some("5"), &["--seed", "9"]), 9);
}

#[test]
fn im_approx_emits_csv_table() {
    let o = negmono(&["im-approx", "--s-list", "1,100", "--grid", "-10:10:2001"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,sup_error,argmax,ratio"));
    let ratio: f64 = lines
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio <= 0.125);
}

#[test]
fn flat_tables_switch_to_csv() {
    let o = negmono(&["--format", "csv", "perm-lemma", "--mu", "0.5,0.3,0.2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("trial,d,mu,count,violations,worst_slack,arg_worst\n"));
    let o = negmono(&[
        "--format",
        "csv",
        "drury-check",
        "--d",
        "2",
        "--trials",
        "3",
    ]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["search", "--target", "nope"][..],
        &["verify-conjecture", "--dims", "2x2"],
        &["special-case", "--file", "/nonexistent/b.json"],
        &["--format", "csv", "search", "--trials", "1"],
        &["perm-lemma", "--mu", "0.1,0.5"],
        &["drury-check", "--d", "9", "--trials", "1"],
    ] {
        let o = negmono(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
