use std::io::Cursor;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlemb::embedding::LoadStats;
use xlemb::{cosine, load_embeddings, save_embeddings, EmbeddingSpace, Error};

fn read(text: &str) -> xlemb::Result<(EmbeddingSpace, LoadStats)> {
    EmbeddingSpace::read_word2vec(Cursor::new(text), "xx")
}

#[test]
fn reads_three_word_file() {
    let (space, stats) = read("3 2\na 1 0\nb 0 1\nc 1 1").unwrap();
    assert_eq!(space.dim(), 2);
    assert_eq!(space.len(), 3);
    assert_eq!(space.words(), ["a", "b", "c"]);
    assert_eq!(space.vector("c").unwrap(), [1.0, 1.0]);
    assert_eq!(stats.duplicates, 0);
}

#[test]
fn missing_row_reports_line_five() {
    match read("4 2\na 1 0\nb 0 1\nc 1 1\n") {
        Err(Error::Format { line, .. }) => assert_eq!(line, 5),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn wrong_arity_reports_its_line() {
    match read("3 2\na 1 0\nb 0 1 4\nc 1 1\n") {
        Err(Error::Format { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn duplicate_word_keeps_first_row() {
    let (space, stats) = read("4 2\na 1 0\nb 0 1\na 5 5\nc 1 1\n").unwrap();
    assert_eq!(space.len(), 3);
    assert_eq!(stats.duplicates, 1);
    assert_eq!(space.vector("a").unwrap(), [1.0, 0.0]);
}

#[test]
fn empty_vocab_and_zero_rows_are_rejected() {
    assert!(matches!(read("0 2\n"), Err(Error::EmptyInput(_))));
    assert!(matches!(read(""), Err(Error::EmptyInput(_))));
    assert!(matches!(read("2 2\na 1 0\nb 0 0\n"), Err(Error::Format { line: 3, .. })));
}

#[test]
fn three_word_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (space, _) = read("3 2\na 1 0\nb 0 1\nc 1 1").unwrap();
    let path = dir.path().join("s.vec");
    save_embeddings(&space, &path).unwrap();
    let (back, _) = load_embeddings(&path, "xx").unwrap();
    assert_eq!(back.words(), space.words());
    for (w, v) in space.rows() {
        for (a, b) in v.iter().zip(back.vector(w).unwrap()) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn save_into_missing_directory_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let (space, _) = read("1 2\na 1 0\n").unwrap();
    let err = save_embeddings(&space, dir.path().join("no/such/dir/s.vec")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn random_space_round_trip_within_1e6() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let rows: Vec<(String, Vec<f32>)> = (0..1000)
        .map(|i| {
            let v: Vec<f32> = (0..20).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            (format!("w{i}"), v)
        })
        .collect();
    let space = EmbeddingSpace::from_rows("xx", 20, rows).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.vec");
    save_embeddings(&space, &path).unwrap();
    let (back, _) = load_embeddings(&path, "xx").unwrap();
    assert_eq!(back.words(), space.words());
    let mut max = 0.0f32;
    for (w, v) in space.rows() {
        for (a, b) in v.iter().zip(back.vector(w).unwrap()) {
            max = max.max((a - b).abs());
        }
    }
    assert!(max < 1e-6, "max drift {max}");
}

#[test]
fn cosine_examples() {
    assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    assert!((cosine(&[1.0, 2.0], &[2.0, 1.0]).unwrap() - 0.8).abs() < 1e-15);
    assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::UndefinedSimilarity)));
    assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(Error::Dimension { .. })));
}

#[test]
fn normalized_rows_have_unit_norm() {
    let (space, _) = read("3 3\na 3 4 0\nb 0.001 0 0\nc 1e3 -2e3 7\n").unwrap();
    for (_, v) in space.l2_normalized().rows() {
        let norm = v.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }
}

fn nonzero_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|d| {
        (
            prop::collection::vec(-100.0f64..100.0, d),
            prop::collection::vec(-100.0f64..100.0, d),
        )
            .prop_filter("nonzero", |(u, v)| {
                u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3)
            })
    })
}

proptest! {
    #[test]
    fn cosine_is_symmetric((u, v) in nonzero_pair()) {
        let a = cosine(&u, &v).unwrap();
        let b = cosine(&v, &u).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn cosine_is_scale_invariant((u, v) in nonzero_pair(), alpha in 1e-3f64..1e3) {
        let scaled: Vec<f64> = u.iter().map(|x| x * alpha).collect();
        prop_assert!((cosine(&scaled, &v).unwrap() - cosine(&u, &v).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn round_trip_preserves_rows(values in prop::collection::vec(prop::collection::vec(-1.0f32..1.0, 4), 1..30)) {
        let rows: Vec<(String, Vec<f32>)> = values
            .into_iter()
            .enumerate()
            .filter(|(_, v)| v.iter().any(|x| *x != 0.0))
            .map(|(i, v)| (format!("w{i}"), v))
            .collect();
        prop_assume!(!rows.is_empty());
        let space = EmbeddingSpace::from_rows("xx", 4, rows).unwrap();
        let mut buf = Vec::new();
        space.write_word2vec(&mut buf).unwrap();
        let (back, _) = EmbeddingSpace::read_word2vec(Cursor::new(buf), "xx").unwrap();
        prop_assert_eq!(back.words(), space.words());
        for (w, v) in space.rows() {
            for (a, b) in v.iter().zip(back.vector(w).unwrap()) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
