use std::path::PathBuf;

use af_core::hardness::*;
use af_core::syntax::{classify, parse, render};

fn machine(name: &str) -> Atm {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus/atm")
        .join(name);
    Atm::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn accepted(m: &Atm, w: &str) -> (Vec<usize>, ConfigTree) {
    let w = m.parse_input(w).unwrap();
    match simulate_atm(m, &w, 20, 1 << w.len()).unwrap() {
        SimOutcome::Accept(t) => (w, t),
        other => panic!("expected acceptance, got {other:?}"),
    }
}

#[test]
fn accepting_machines_verify() {
    for (name, w) in [
        ("accept_now.atm", "1"),
        ("writer.atm", "1"),
        ("writer.atm", "_1"),
        ("fork.atm", "0"),
        ("fork.atm", "01"),
        ("guess.atm", "ab"),
    ] {
        let m = machine(name);
        let (w, tree) = accepted(&m, w);
        let report = verify_encoding(&m, &w, &tree, false).unwrap();
        assert!(
            report.passed(),
            "{name}: {}",
            serde_json::to_string_pretty(&report).unwrap()
        );
        assert_eq!(report.conjuncts.len(), 13);
    }
}

#[test]
fn rejecting_machine_rejects() {
    let m = machine("reject.atm");
    let w = m.parse_input("1").unwrap();
    assert_eq!(simulate_atm(&m, &w, 20, 2).unwrap(), SimOutcome::Reject);
    assert!(embed_and_expand(
        &m,
        &ConfigTree {
            vertices: vec![Config {
                state: 0,
                tape: vec![1, 0],
                head: 0
            }],
            edges: vec![]
        },
        1
    )
    .is_err());
}

#[test]
fn encoding_shape() {
    let m = machine("writer.atm");
    let enc = encode_atm(&m, &m.parse_input("1").unwrap(), false).unwrap();
    assert_eq!(enc.signature["G_1"], 3);
    assert_eq!(enc.signature["G_2"], 4);
    assert_eq!(enc.signature["F_1"], 6);
    assert!(enc.unguarded().is_empty());
    let text = render(&enc.sentence());
    assert!(
        render(&parse(&text).unwrap()) == text,
        "rendering does not round-trip"
    );
    for (_, f) in &enc.conjuncts {
        assert!(!classify(f).renamed);
    }
}

#[test]
fn literal_successor_also_verifies_these_runs() {
    let m = machine("fork.atm");
    let (w, tree) = accepted(&m, "01");
    assert!(verify_encoding(&m, &w, &tree, true).unwrap().passed());
}
