use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlemb::sgns::SgnsConfig;
use xlemb::synthetic::paired_token_corpus;
use xlemb::{build_vocab, filter_corpus, tokenize, train_sgns, Error, TokenizerConfig};

fn cfg() -> TokenizerConfig {
    TokenizerConfig::default()
}

fn seeds(words: &[&str]) -> HashSet<String> {
    words.iter().map(|w| w.to_string()).collect()
}

#[test]
fn tokenizer_examples() {
    assert_eq!(tokenize("Hello WORLD", &cfg()), ["hello", "world"]);
    assert_eq!(tokenize("see http://x.y @bob #stopX", &cfg()), ["see", "stopx"]);
    assert!(tokenize("", &cfg()).is_empty());
    let keep = TokenizerConfig {
        lowercase: false,
        strip_urls: false,
        strip_mentions: false,
        keep_hashtag_body: false,
    };
    assert_eq!(tokenize("Hi @bob #tag", &keep), ["Hi", "bob"]);
    assert_eq!(tokenize("¡Qué asco, inmigrantes!", &cfg()), ["qué", "asco", "inmigrantes"]);
}

#[test]
fn filter_examples() {
    let lines = vec!["a b".to_string(), "c d".to_string()];
    let out: Vec<String> = filter_corpus(lines.clone(), &seeds(&["b"]), &cfg()).unwrap().collect();
    assert_eq!(out, ["a b"]);
    assert_eq!(filter_corpus(lines.clone(), &seeds(&["x"]), &cfg()).unwrap().count(), 0);
    assert!(matches!(filter_corpus(lines, &HashSet::new(), &cfg()), Err(Error::Config(_))));
}

#[test]
fn filter_matches_tokens_not_substrings() {
    let lines = vec!["hateful stuff".to_string(), "pure HATE here".to_string()];
    let out: Vec<String> = filter_corpus(lines, &seeds(&["hate"]), &cfg()).unwrap().collect();
    assert_eq!(out, ["pure HATE here"]);
}

#[test]
fn filter_thousand_line_fixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    let plain: Vec<String> = (0..200).map(|i| format!("word{i}")).collect();
    let seed_words = ["odio", "invasion", "basta"];
    let mut hit_lines: HashSet<usize> = HashSet::new();
    while hit_lines.len() < 137 {
        hit_lines.insert(rng.random_range(0..1000));
    }
    let lines: Vec<String> = (0..1000)
        .map(|i| {
            let mut tokens: Vec<String> = (0..rng.random_range(3..10)).map(|_| plain.choose(&mut rng).unwrap().clone()).collect();
            if hit_lines.contains(&i) {
                let pos = rng.random_range(0..=tokens.len());
                let seed = seed_words.choose(&mut rng).unwrap();
                tokens.insert(pos, if rng.random_bool(0.5) { seed.to_uppercase() } else { seed.to_string() });
            } else if rng.random_bool(0.2) {
                // near misses
                tokens.push(format!("{}s", seed_words.choose(&mut rng).unwrap()));
            }
            tokens.join(" ")
        })
        .collect();

    let brute: Vec<&String> = lines
        .iter()
        .filter(|l| l.split_whitespace().any(|t| seed_words.contains(&t.to_lowercase().as_str())))
        .collect();
    assert_eq!(brute.len(), 137);
    let out: Vec<String> = filter_corpus(lines.clone(), &seeds(&seed_words), &cfg()).unwrap().collect();
    assert_eq!(out.len(), 137);
    assert!(out.iter().zip(&brute).all(|(a, b)| a == *b), "order preserved");
}

#[test]
fn vocab_examples() {
    let corpus = vec![vec!["a", "a", "b"]];
    let two = build_vocab(&corpus, 2);
    assert_eq!(two.into_iter().collect::<Vec<_>>(), [("a".to_string(), 2)]);
    let one = build_vocab(&corpus, 1);
    assert_eq!(one.len(), 2);
    assert_eq!(one["b"], 1);
}

#[test]
fn vocab_matches_hash_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut corpus: Vec<Vec<String>> = Vec::new();
    let mut total = 0;
    while total < 10_000 {
        let len = rng.random_range(1..15);
        // skewed draws so counts straddle the cutoff
        let doc: Vec<String> = (0..len).map(|_| format!("t{}", rng.random_range(0..40u32).pow(2) / 7)).collect();
        total += doc.len();
        corpus.push(doc);
    }
    for min_count in [1, 3, 25] {
        let mut oracle: HashMap<&str, usize> = HashMap::new();
        for t in corpus.iter().flatten() {
            *oracle.entry(t.as_str()).or_default() += 1;
        }
        oracle.retain(|_, c| *c >= min_count);
        let vocab = build_vocab(&corpus, min_count);
        assert_eq!(vocab.len(), oracle.len());
        for (w, c) in &vocab {
            assert_eq!(oracle[w.as_str()], *c);
        }
    }
}

fn small_cfg() -> SgnsConfig {
    SgnsConfig {
        dim: 8,
        epochs: 3,
        min_count: 1,
        subsample_t: 1e-3,
        rng_seed: 11,
        ..SgnsConfig::default()
    }
}

#[test]
fn sgns_is_deterministic_and_finite() {
    let corpus = paired_token_corpus(5, 20, 3);
    let a = train_sgns(&corpus, "xx", &small_cfg()).unwrap();
    let b = train_sgns(&corpus, "xx", &small_cfg()).unwrap();
    assert_eq!(a.words(), b.words());
    for (w, v) in a.rows() {
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(v, b.vector(w).unwrap());
    }
}

#[test]
fn sgns_finite_at_high_learning_rate() {
    let corpus = paired_token_corpus(6, 30, 4);
    let cfg = SgnsConfig {
        learning_rate: 0.05,
        ..small_cfg()
    };
    let space = train_sgns(&corpus, "xx", &cfg).unwrap();
    assert!(space.rows().all(|(_, v)| v.iter().all(|x| x.is_finite())));
}

#[test]
fn sgns_vocab_equals_build_vocab() {
    let corpus = paired_token_corpus(6, 10, 5);
    let cfg = SgnsConfig {
        min_count: 12,
        ..small_cfg()
    };
    let space = train_sgns(&corpus, "xx", &cfg).unwrap();
    let vocab = build_vocab(&corpus, 12);
    let mut words: Vec<&str> = space.words().iter().map(String::as_str).collect();
    words.sort_unstable();
    assert_eq!(words, vocab.keys().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(space.dim(), 8);
}

#[test]
fn sgns_single_word_vocab_is_insufficient() {
    let corpus = vec![vec!["solo", "solo", "rare"]];
    let cfg = SgnsConfig {
        min_count: 2,
        ..small_cfg()
    };
    assert!(matches!(train_sgns(&corpus, "xx", &cfg), Err(Error::InsufficientData(_))));
}

#[test]
fn sgns_config_validation_names_field() {
    let cfg = SgnsConfig {
        window: 0,
        ..SgnsConfig::default()
    };
    match cfg.validate() {
        Err(Error::Config(msg)) => assert!(msg.contains("window")),
        other => panic!("unexpected {other:?}"),
    }
    let cfg = SgnsConfig { dim: 1, ..SgnsConfig::default() };
    assert!(cfg.validate().is_err());
}

#[test]
fn planted_pair_beats_filler_word() {
    let corpus = paired_token_corpus(4, 40, 7);
    let cfg = SgnsConfig {
        dim: 16,
        epochs: 25,
        min_count: 1,
        subsample_t: 0.0,
        rng_seed: 7,
        ..SgnsConfig::default()
    };
    let space = train_sgns(&corpus, "xx", &cfg).unwrap();
    for i in 0..4 {
        let v = |w: String| space.vector(&w).unwrap().to_vec();
        let pq = xlemb::cosine(&v(format!("p{i}")), &v(format!("q{i}"))).unwrap();
        let pz = xlemb::cosine(&v(format!("p{i}")), &v(format!("z{i}"))).unwrap();
        assert!(pq > pz, "pair {i}: {pq} <= {pz}");
    }
}

proptest! {
    #[test]
    fn tokenize_is_deterministic_and_nonempty(text in "\\PC{0,80}") {
        let a = tokenize(&text, &cfg());
        prop_assert_eq!(&a, &tokenize(&text, &cfg()));
        prop_assert!(a.iter().all(|t| !t.is_empty() && t.chars().all(char::is_alphanumeric)));
    }
}
