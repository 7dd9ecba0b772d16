use std::path::PathBuf;

use af_core::syntax::{classify, parse, render};

fn corpus(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../corpus")
            .join(name),
    )
    .unwrap()
}

fn entries(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

#[test]
fn classify_corpus_min_k() {
    let text = corpus("classify.tsv");
    let mut n = 0;
    for line in entries(&text) {
        let (want, src) = line.split_once('\t').unwrap();
        let f = parse(src).unwrap();
        let r = classify(&f);
        let got = r.min_k.map_or("-".to_string(), |k| k.to_string());
        assert_eq!(got, want, "{src}");
        assert_eq!(r.min_k.is_some(), r.adjacent || r.renamed, "{src}: {r:?}");
        n += 1;
    }
    assert_eq!(n, 50);
}

#[test]
fn corpora_round_trip_through_the_printer() {
    for name in ["classify.tsv", "af3.tsv", "product.txt", "af4.txt"] {
        let text = corpus(name);
        for line in entries(&text) {
            let src = line.rsplit('\t').next().unwrap();
            let f = parse(src).unwrap();
            let again = parse(&render(&f)).unwrap();
            assert_eq!(render(&again), render(&f), "{name}: {src}");
        }
    }
}
