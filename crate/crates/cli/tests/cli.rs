use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn af(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_af"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn af_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_af"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .expect("stdin")
        .write_all(input.as_bytes())
        .expect("write stdin");
    child.wait_with_output().expect("binary exits")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn corpus(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(rel)
        .display()
        .to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("af-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write temp file");
    path.display().to_string()
}

#[test]
fn primgen_prints_generator() {
    for (word, want) in [
        ("abcbcbd", "abcbd"),
        ("babcd", "abcd"),
        ("abcbda", "abcbda"),
    ] {
        let o = af(&["primgen", word]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn primgen_json_lists_folds() {
    let o = af(&["primgen", "abcbcbd", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["generator"], "abcbd");
    assert_eq!(v["length"], 5);
    assert!(v["folds"].as_array().expect("folds").len() >= 2);
}

#[test]
fn generate_round_trips_through_primgen() {
    let o = af(&["generate", "abc", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let words: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(!words.is_empty());
    for w in words {
        let g = stdout(&af(&["primgen", &w])).trim().to_string();
        assert!(g == "abc" || g == "cba", "{w} folds to {g}");
    }
}

#[test]
fn sat_and_unsat_exit_codes() {
    let sat = af_stdin(&["sat", "-"], "forall x1 exists x2 r(x1,x2)");
    assert_eq!(sat.status.code(), Some(0));
    assert_eq!(stdout(&sat).trim(), "SAT");
    let unsat = af_stdin(&["sat", "-"], "exists x1 (p(x1) & !p(x1))");
    assert_eq!(unsat.status.code(), Some(1));
    assert_eq!(stdout(&unsat).trim(), "UNSAT");
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(af(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        af_stdin(&["sat", "-"], "forall x1 (").status.code(),
        Some(2)
    );
    assert_eq!(af(&["sat", "/nonexistent/formula"]).status.code(), Some(2));
}

#[test]
fn emitted_model_checks_true() {
    let f = scratch("total.af", "forall x1 exists x2 (r(x1,x2) & !r(x2,x1))");
    let m = scratch("total.json", "");
    assert_eq!(af(&["sat", &f, "--emit-model", &m]).status.code(), Some(0));
    let o = af(&["check", &f, &m]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn check_reports_false_with_exit_one() {
    let f = scratch("some.af", "exists x1 p(x1)");
    let s = scratch(
        "empty.json",
        r#"{"domain":["a","b"],"predicates":{"p/1":[]}}"#,
    );
    let o = af(&["check", &f, &s]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn outputs_are_deterministic() {
    let f = corpus("af4.txt");
    let first_line = std::fs::read_to_string(&f)
        .expect("corpus")
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .expect("formula")
        .to_string();
    let path = scratch("closure.af", &first_line);
    let a = af(&["closure", &path]);
    let b = af(&["closure", &path]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s1 = af_stdin(&["sat", "-", "--json"], "forall x1 exists x2 r(x1,x2)");
    let s2 = af_stdin(&["sat", "-", "--json"], "forall x1 exists x2 r(x1,x2)");
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn classify_reports_min_k() {
    let o = af_stdin(
        &["classify", "-"],
        "forall x1 forall x2 (r(x1,x2) -> exists x3 s(x1,x2,x3))",
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["adjacent"], true);
    assert_eq!(v["var_count"], 3);
}

#[test]
fn pool_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_af"))
        .args(["sat", "--help"])
        .env("AF_RESOURCE_CAP", "7")
        .output()
        .expect("binary runs");
    assert!(stdout(&o).contains("AF_RESOURCE_CAP=7"));
}

#[test]
fn atm_verify_and_simulate() {
    let o = af(&["atm", "verify", &corpus("atm/fork.atm"), "01"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["passed"], true);
    let r = af(&["atm", "simulate", &corpus("atm/reject.atm"), "1"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("REJECT"));
}

#[test]
fn atm_verify_is_deterministic_without_timings() {
    let path = corpus("atm/writer.atm");
    let a = af(&["atm", "verify", &path, "1"]);
    let b = af(&["atm", "verify", &path, "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_finds_small_model() {
    let o = af_stdin(&["oracle", "-", "--json"], "exists x1 forall x2 r(x1,x2)");
    assert_eq!(o.status.code(), Some(0));
    let none = af_stdin(&["oracle", "-"], "exists x1 (p(x1) & !p(x1))");
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn fo2_round_trip_preserves_truth() {
    let src = "forall u (p(u) -> exists v (r(u,v) & forall u (r(v,u) -> p(u))))";
    let af_form = af_stdin(&["fo2af", "-"], src);
    assert_eq!(af_form.status.code(), Some(0));
    let back = af_stdin(&["af2fo2", "-"], &stdout(&af_form));
    assert_eq!(back.status.code(), Some(0));
    let s = scratch(
        "fo2.json",
        r#"{"domain":["a","b"],"predicates":{"p/1":[["a"]],"r/2":[["a","b"],["b","a"]]}}"#,
    );
    for text in [src.to_string(), stdout(&af_form), stdout(&back)] {
        let f = scratch("fo2.af", &text);
        assert_eq!(stdout(&af(&["check", &f, &s])).trim(), "true", "{text}");
    }
}
