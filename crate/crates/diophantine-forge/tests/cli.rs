//! End-to-end runs of the installed binary: output bytes and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diophantine-forge"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn scratch_poly(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("diophantine-forge-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("scratch poly");
    path
}

#[test]
fn eta_prints_the_frozen_decimal() {
    let out = run(&["eta", "58", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        "1681043235226619916301182624511918527834137733707408448335539840"
    );
}

#[test]
fn pair_prints_the_tuple_form() {
    let out = run(&["pair", "1", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "(11, 6564448)");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["eta", "0", "4"],
        vec!["eta", "1"],
        vec!["pair", "4", "0"],
        vec!["frobnicate"],
        vec!["verify", "bogus"],
        vec!["degree", "--poly", "/nonexistent/p.txt"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_prints_sorted_case_lines() {
    let out = run(&["verify", "bitarith", "--max", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let ids: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .map(|l| l.split_whitespace().nth(1).expect("case id"))
        .collect();
    assert_eq!(ids.len(), 7);
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted, "output must be sorted by case id");
    assert!(text.lines().last().unwrap().contains("7/7 cases passed"));

    // Determinism for fixed argv and seed.
    let again = run(&["verify", "bitarith", "--max", "3", "--seed", "1"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn construct_emits_dag_json() {
    let poly = scratch_poly("p1.txt", "a + 1 - z1\n");
    let poly = poly.to_str().unwrap();
    let out = run(&["construct", "--poly", poly]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert!(v.get("nodes").is_some(), "DAG JSON carries a node table");

    // --out writes the same bytes to a file instead.
    let dest = scratch_poly("q.json", "");
    let dest = dest.to_str().unwrap();
    let filed = run(&["construct", "--poly", poly, "--out", dest]);
    assert_eq!(filed.status.code(), Some(0));
    assert_eq!(stdout(&filed), "");
    let written = std::fs::read_to_string(dest).unwrap();
    assert_eq!(written.trim_end(), stdout(&out).trim_end());
}

#[test]
fn degree_emits_report_rows() {
    let poly = scratch_poly("p2.txt", "a + 1 - z1\n");
    let out = run(&["degree", "--poly", poly.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let rows = v.as_array().expect("array of rows");
    assert!(!rows.is_empty());
    for row in rows {
        for key in ["node", "tracker", "closed_form", "match"] {
            assert!(row.get(key).is_some(), "row {row} lacks {key}");
        }
    }
    let x = rows
        .iter()
        .find(|r| r["node"] == "X")
        .expect("X row present");
    assert_eq!(x["tracker"], "672");
    assert_eq!(x["match"], true);
}

#[test]
fn eval_agrees_with_the_library() {
    let poly_path = scratch_poly("p3.txt", "a + 1\n");
    let mut at = String::from("a=1");
    for j in 1..=11 {
        at.push_str(&format!(",z{j}=0"));
    }
    let out = run(&["eval", "--poly", poly_path.to_str().unwrap(), "--at", &at]);
    assert_eq!(out.status.code(), Some(0));

    let parsed = diophantine_forge::cli::parse_poly("a + 1").unwrap();
    let expr = diophantine_forge::construct::build_q_tilde(&parsed).unwrap();
    let mut point = std::collections::BTreeMap::new();
    point.insert("a".to_string(), num_bigint::BigInt::from(1));
    for j in 1..=11 {
        point.insert(format!("z{j}"), num_bigint::BigInt::from(0));
    }
    let expected = expr.evaluate(&point).unwrap();
    assert_eq!(stdout(&out).trim(), expected.to_string());

    // Malformed points are usage errors; missing variables are evaluation
    // failures.
    let bad = run(&["eval", "--poly", poly_path.to_str().unwrap(), "--at", "q=1"]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = run(&["eval", "--poly", poly_path.to_str().unwrap(), "--at", "a=1"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn threads_env_is_accepted() {
    let ok = Command::new(env!("CARGO_BIN_EXE_diophantine-forge"))
        .env("DIOPHANTINE_FORGE_THREADS", "1")
        .args(["eta", "1", "1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let auto = Command::new(env!("CARGO_BIN_EXE_diophantine-forge"))
        .env("DIOPHANTINE_FORGE_THREADS", "0")
        .args(["eta", "1", "1"])
        .output()
        .unwrap();
    assert_eq!(auto.status.code(), Some(0));
    assert_eq!(ok.stdout, auto.stdout);

    let garbled = Command::new(env!("CARGO_BIN_EXE_diophantine-forge"))
        .env("DIOPHANTINE_FORGE_THREADS", "lots")
        .args(["eta", "1", "1"])
        .output()
        .unwrap();
    assert_eq!(garbled.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&garbled.stderr).contains("warning"));
}
