mod common;

use std::io::Cursor;

use common::{brute_force_rules, random_corpus};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xlemb::rules::{context_of, mine_rules_for, top_antecedents};
use xlemb::{build_context, mine_rules, Error, Label, LabeledDataset, MiningConfig, TokenizerConfig};

fn docs() -> Vec<Vec<&'static str>> {
    vec![vec!["a", "b"], vec!["a", "b", "c"], vec!["a", "c"]]
}

#[test]
fn three_doc_example() {
    let rules = mine_rules_for(&docs(), &["a"], 0.5, 0.5).unwrap();
    let got: Vec<(&str, &str)> = rules.iter().map(|r| (r.antecedent.as_str(), r.consequent.as_str())).collect();
    assert_eq!(got, [("a", "b"), ("a", "c")]);
    for r in &rules {
        assert!((r.support - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.confidence - 2.0 / 3.0).abs() < 1e-15);
    }
    assert!(mine_rules_for(&docs(), &["a"], 0.7, 0.5).unwrap().is_empty());
}

#[test]
fn repeats_within_a_document_count_once() {
    let rules = mine_rules(&[vec!["a", "a", "b"]], 10, 0.5, 0.5).unwrap();
    let ab = rules.iter().find(|r| r.antecedent == "a" && r.consequent == "b").unwrap();
    assert_eq!(ab.support, 1.0);
    assert_eq!(ab.confidence, 1.0);
    assert!(rules.iter().all(|r| r.antecedent != r.consequent));
}

#[test]
fn context_of_fixture() {
    let rules = mine_rules_for(&docs(), &["a"], 0.5, 0.5).unwrap();
    let ctx = build_context(&rules, "a");
    assert_eq!(ctx.len(), 2);
    assert!((ctx.entries["b"].support - 0.667).abs() < 1e-3);
    assert!((ctx.entries["c"].confidence - 0.667).abs() < 1e-3);
    assert!(build_context(&rules, "zzz").is_empty());
    assert_eq!(context_of(&docs(), "a", 0.5, 0.5).unwrap(), ctx);
}

#[test]
fn top_antecedents_by_document_frequency() {
    let d = vec![vec!["b", "b", "b"], vec!["c", "a"], vec!["c", "a"], vec!["b"]];
    assert_eq!(top_antecedents(&d, 2), ["a", "b"]);
    assert_eq!(top_antecedents(&d, 10), ["a", "b", "c"]);
}

#[test]
fn invalid_inputs() {
    let empty: Vec<Vec<&str>> = Vec::new();
    assert!(matches!(mine_rules(&empty, 5, 0.1, 0.1), Err(Error::InsufficientData(_))));
    assert!(matches!(mine_rules(&docs(), 5, 0.0, 0.1), Err(Error::Config(_))));
    assert!(matches!(mine_rules(&docs(), 5, 0.1, 1.5), Err(Error::Config(_))));
    let cfg = MiningConfig { top_n: 0, ..MiningConfig::default() };
    assert!(cfg.validate().is_err());
}

#[test]
fn matches_brute_force_on_random_corpora() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let corpus = random_corpus(&mut rng);
        for (top_n, s, c) in [(3, 0.1, 0.2), (100, 0.05, 0.05), (1, 0.3, 0.9)] {
            let rules = mine_rules(&corpus, top_n, s, c).unwrap();
            let oracle = brute_force_rules(&corpus, top_n, s, c);
            assert_eq!(rules.len(), oracle.len());
            for (r, o) in rules.iter().zip(&oracle) {
                assert_eq!((&r.antecedent, &r.consequent), (&o.0, &o.1));
                assert!((r.support - o.2).abs() < 1e-12);
                assert!((r.confidence - o.3).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn loader_counts_and_errors() {
    let cfg = TokenizerConfig::default();
    let ds = LabeledDataset::read_tsv(Cursor::new("1\tgo home\n0\tnice day\n1\tout!\n"), "en", &cfg).unwrap();
    assert_eq!((ds.counts.hate, ds.counts.non_hate), (2, 1));
    assert_eq!(ds.partition(Label::Hate).len(), 2);
    match LabeledDataset::read_tsv(Cursor::new("1\tok\n2\tbad label\n"), "en", &cfg) {
        Err(Error::Format { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    let with_empty = LabeledDataset::read_tsv(Cursor::new("1\t@user http://t.co\n0\thello\n"), "en", &cfg).unwrap();
    assert_eq!(with_empty.len(), 1);
    assert_eq!(with_empty.counts.dropped_empty, 1);
    assert_eq!(with_empty.counts.total(), 2);
}

#[test]
fn dataset_split_sizes_and_determinism() {
    let cfg = TokenizerConfig::default();
    let text: String = (0..100).map(|i| format!("{}\tdoc {i}\n", i % 2)).collect();
    let ds = LabeledDataset::read_tsv(Cursor::new(text), "en", &cfg).unwrap();
    let (tr, dev, te) = ds.split(0.7, 0.1, 13).unwrap();
    assert_eq!((tr.len(), dev.len(), te.len()), (70, 10, 20));
    let (tr2, _, _) = ds.split(0.7, 0.1, 13).unwrap();
    assert_eq!(tr, tr2);
    assert!(ds.split(0.7, 0.3, 1).is_err());
}

proptest! {
    #[test]
    fn rule_invariants(seed in any::<u64>(), s in 0.01f64..0.5, c in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng);
        let rules = mine_rules(&corpus, 100, s, c).unwrap();
        let n = corpus.len() as f64;
        for r in &rules {
            let df = corpus.iter().filter(|d| d.contains(&r.antecedent)).count() as f64 / n;
            prop_assert!(r.support > 0.0 && r.support <= df + 1e-15);
            prop_assert!((r.confidence - r.support / df).abs() < 1e-12);
            prop_assert!(r.support <= r.confidence + 1e-15);
            prop_assert!(r.antecedent != r.consequent);
        }
        prop_assert_eq!(&rules, &mine_rules(&corpus, 100, s, c).unwrap());
        let ordered = rules.windows(2).all(|w| {
            (&w[0].antecedent, std::cmp::Reverse(ordered_f64(w[0].confidence)), &w[0].consequent)
                <= (&w[1].antecedent, std::cmp::Reverse(ordered_f64(w[1].confidence)), &w[1].consequent)
        });
        prop_assert!(ordered);
    }
}

fn ordered_f64(v: f64) -> u64 {
    v.to_bits()
}
