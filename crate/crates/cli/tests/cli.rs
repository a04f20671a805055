use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn embtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embtree")).args(args).env_remove("EMBTREE_MAX_N").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("embtree-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn count_examples() {
    let o = embtree(&["count", "binary", "--profile", "2;2,1"]);
    assert_eq!((code(&o), stdout(&o)), (0, "3\n".to_string()));
    let o = embtree(&["count", "cayley", "--steps", "-1,1", "--profile", "2;2,1"]);
    assert_eq!(stdout(&o), "720\n");
    let o = embtree(&["count", "sary", "--steps", "-2,-1,1", "--profile", "1,1,1,2,1;1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("min S = -1"));
}

#[test]
fn count_explain_and_json() {
    let o = embtree(&["count", "cayley", "--steps", "-1,1", "--profile", "2;2,1", "--explain"]);
    let text = stdout(&o);
    assert!(text.lines().count() > 2);
    assert!(text.ends_with("720\n"));
    let o = embtree(&["count", "cayley", "--steps", "-1,1", "--profile", "2;2,1", "--explain", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "720");
    assert!(!v["factors"].as_array().unwrap().is_empty());
}

#[test]
fn count_by_types() {
    let o = embtree(&["count", "cayley", "--steps", "-1,1", "--out-types", "[[1,1,1],[0,-1,1]]"]);
    assert_eq!(stdout(&o), "6\n");
    let o = embtree(&["count", "sary", "--steps", "-1,1", "--out-types", "[[1,1,1],[0,-1,1]]"]);
    assert_eq!(stdout(&o), "1\n");
    let o = embtree(&["count", "cayley", "--steps", "0,1", "--in-types", "[[0,[0,0],2],[0,[2,0],1]]"]);
    assert_eq!(stdout(&o), "3\n");
    let o = embtree(&["count", "cayley", "--steps", "-1,1", "--out-types", "[[1,1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_examples() {
    let o = embtree(&["verify", "--max-n", "5", "--steps", "-1,1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = embtree(&["verify", "--regression", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["id"].as_str().unwrap().starts_with("regression/")));
    let o = embtree(&["verify", "--identities", "--span", "4", "--points", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn verify_budget() {
    let o = embtree(&["verify", "--max-n", "9"]);
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_embtree"))
        .args(["verify", "--max-n", "5"])
        .env("EMBTREE_MAX_N", "4")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn samples_are_reproducible() {
    let args = ["sample", "cayley", "--steps", "-1,1", "--profile", "2;2,1", "--seed", "7", "-n", "3"];
    let (a, b) = (embtree(&args), embtree(&args));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["n"], 5);
    }
    let o = embtree(&["sample", "function", "--steps", "-1,1", "--profile", "2;2,1", "--seed", "7", "-n", "2"]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = embtree(&["sample", "sary", "--steps", "1", "--profile", "2,1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn binary_law() {
    let o = embtree(&["law", "binary", "-n", "3"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("profile,numerator,denominator"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| 5 % r.rsplit(',').next().unwrap().parse::<u64>().unwrap() == 0));
    let o = embtree(&["law", "cayley", "--steps", "-1,1", "-n", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["normalizer"], "36");
}

#[test]
fn bijection_trace() {
    let o = embtree(&["sample", "function", "--steps", "-1,0,1", "--profile", "1;2,2,1", "--seed", "11"]);
    let f = scratch_file("fn.json", &stdout(&o));
    let o = embtree(&["bijection", "trace", "--input", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["direction"], "forward");
    assert_eq!(v["conditions"]["t1"], true);
    let tree = v["trace"]["tree"].to_string();

    let t = scratch_file("tree.json", &tree);
    let o = embtree(&["bijection", "trace", "--input", t.to_str().unwrap()]);
    let w: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(w["direction"], "inverse");
    assert_eq!(w["trace"]["function"], v["trace"]["function"]);

    let o = embtree(&["bijection", "trace", "--input", "/nonexistent/fn.json"]);
    assert_eq!(code(&o), 2);
    std::fs::remove_file(f).unwrap();
    std::fs::remove_file(t).unwrap();
}
