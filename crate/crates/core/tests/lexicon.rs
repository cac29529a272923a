use std::collections::{BTreeSet, HashSet};
use std::io::Cursor;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlemb::lexicon::LexiconStats;
use xlemb::{restrict_to_vocab, split_lexicon, BilingualLexicon, EmbeddingSpace, Error};

fn read(text: &str, tgt: &str) -> xlemb::Result<(BilingualLexicon, LexiconStats)> {
    BilingualLexicon::read_tsv(Cursor::new(text), "en", tgt)
}

fn pairs(lex: &BilingualLexicon) -> Vec<(&str, &str)> {
    lex.pairs().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn space(lang: &str, words: &[String]) -> EmbeddingSpace {
    let rows = words.iter().enumerate().map(|(i, w)| (w.clone(), vec![1.0, i as f32]));
    EmbeddingSpace::from_rows(lang, 2, rows).unwrap()
}

#[test]
fn comma_alternatives_expand() {
    let (es, _) = read("pussy\tcoño,chocho\n", "es").unwrap();
    assert_eq!(pairs(&es), [("pussy", "coño"), ("pussy", "chocho")]);
    let (it, _) = read("pussy\tfica,figa\n", "it").unwrap();
    assert_eq!(it.len(), 2);
}

#[test]
fn repeated_rows_and_case_collapse() {
    let (lex, stats) = read("# header\nHate\todio\nhate\tODIO\nhate\todio\n", "es").unwrap();
    assert_eq!(pairs(&lex), [("hate", "odio")]);
    assert_eq!(stats.duplicates, 2);
}

#[test]
fn malformed_row_reports_line() {
    match read("a\tb\nbroken row\n", "es") {
        Err(Error::Format { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(read("a\tb\tc\n", "es"), Err(Error::Format { line: 1, .. })));
}

#[test]
fn multiword_entries_are_dropped_and_counted() {
    let (lex, stats) = read("son of a bitch\thijo de puta\nslut\tputa,zorra sucia\n", "es").unwrap();
    assert_eq!(pairs(&lex), [("slut", "puta")]);
    assert_eq!(stats.multiword, 2);
}

#[test]
fn same_language_is_rejected() {
    assert!(matches!(BilingualLexicon::new("en", "en", [("a", "b")]), Err(Error::Config(_))));
}

#[test]
fn restrict_examples() {
    let src = space("en", &["a".into(), "b".into(), "c".into()]);
    let tgt = space("es", &["x".into(), "y".into()]);
    let lex = BilingualLexicon::new("en", "es", [("a", "x"), ("b", "y"), ("c", "zz")]).unwrap();
    let (kept, dropped) = restrict_to_vocab(&lex, &src, &tgt).unwrap();
    assert_eq!(kept.len(), 2);
    assert_eq!(dropped, 1);
    let none = BilingualLexicon::new("en", "es", [("q", "r")]).unwrap();
    assert!(matches!(restrict_to_vocab(&none, &src, &tgt), Err(Error::InsufficientOverlap { .. })));
    let wrong = space("it", &["x".into()]);
    assert!(matches!(restrict_to_vocab(&lex, &src, &wrong), Err(Error::Config(_))));
}

#[test]
fn restrict_matches_double_membership_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let src_words: Vec<String> = (0..150).map(|i| format!("s{i}")).collect();
    let tgt_words: Vec<String> = (0..150).map(|i| format!("t{i}")).collect();
    let src = space("en", &src_words[..100]);
    let tgt = space("es", &tgt_words[..110]);
    let mut raw = BTreeSet::new();
    while raw.len() < 200 {
        raw.insert((
            src_words[rng.random_range(0..150)].clone(),
            tgt_words[rng.random_range(0..150)].clone(),
        ));
    }
    let lex = BilingualLexicon::new("en", "es", raw.iter().cloned()).unwrap();
    let (kept, dropped) = restrict_to_vocab(&lex, &src, &tgt).unwrap();
    let src_set: HashSet<&String> = src_words[..100].iter().collect();
    let tgt_set: HashSet<&String> = tgt_words[..110].iter().collect();
    let oracle: BTreeSet<&(String, String)> = raw
        .iter()
        .filter(|(s, t)| src_set.contains(s) && tgt_set.contains(t))
        .collect();
    let got: BTreeSet<&(String, String)> = kept.pairs().iter().collect();
    assert_eq!(got, oracle);
    assert_eq!(dropped, 200 - oracle.len());
}

fn ten_word_lexicon() -> BilingualLexicon {
    let mut p: Vec<(String, String)> = (0..10).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
    p.push(("s3".into(), "u3".into()));
    p.push(("s3".into(), "v3".into()));
    BilingualLexicon::new("en", "es", p).unwrap()
}

#[test]
fn split_counts_and_determinism() {
    let lex = ten_word_lexicon();
    let (train, val) = split_lexicon(&lex, 0.8, 1).unwrap();
    assert_eq!(train.source_words().len(), 8);
    assert_eq!(val.source_words().len(), 2);
    let (train2, val2) = split_lexicon(&lex, 0.8, 1).unwrap();
    assert_eq!(train, train2);
    assert_eq!(val, val2);
}

#[test]
fn split_keeps_source_word_together() {
    let lex = ten_word_lexicon();
    for seed in 0..20 {
        let (train, val) = split_lexicon(&lex, 0.5, seed).unwrap();
        let in_train = train.pairs().iter().filter(|(s, _)| s == "s3").count();
        let in_val = val.pairs().iter().filter(|(s, _)| s == "s3").count();
        assert!((in_train, in_val) == (3, 0) || (in_train, in_val) == (0, 3));
    }
}

#[test]
fn split_rejects_bad_fraction() {
    let lex = ten_word_lexicon();
    for f in [0.0, 1.0, -0.2, 1.5] {
        assert!(matches!(split_lexicon(&lex, f, 1), Err(Error::Config(_))));
    }
    let one = BilingualLexicon::new("en", "es", [("a", "b"), ("a", "c")]).unwrap();
    assert!(matches!(split_lexicon(&one, 0.5, 1), Err(Error::InsufficientData(_))));
}

proptest! {
    #[test]
    fn split_partitions_pairs(n in 2usize..40, extra in 0usize..20, fraction in 0.05f64..0.95, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<(String, String)> = (0..n).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
        for j in 0..extra {
            p.push((format!("s{}", rng.random_range(0..n)), format!("x{j}")));
        }
        let lex = BilingualLexicon::new("en", "es", p).unwrap();
        let (train, val) = split_lexicon(&lex, fraction, seed).unwrap();
        let all: BTreeSet<_> = lex.pairs().iter().collect();
        let tr: BTreeSet<_> = train.pairs().iter().collect();
        let va: BTreeSet<_> = val.pairs().iter().collect();
        prop_assert!(tr.is_disjoint(&va));
        prop_assert_eq!(tr.union(&va).cloned().collect::<BTreeSet<_>>(), all);
        let ts: HashSet<&str> = train.source_words().into_iter().collect();
        prop_assert!(val.source_words().iter().all(|w| !ts.contains(w)));
        prop_assert_eq!(ts.len(), (fraction * n as f64).ceil() as usize);
    }

    #[test]
    fn expansion_count_matches_alternatives(k in 1usize..6) {
        let targets: Vec<String> = (0..k).map(|i| format!("t{i}")).collect();
        let (lex, _) = read(&format!("src\t{}\n", targets.join(",")), "es").unwrap();
        prop_assert_eq!(lex.len(), k);
    }
}
