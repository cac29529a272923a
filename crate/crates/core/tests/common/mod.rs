#![allow(dead_code)]

use nalgebra::DMatrix;
use xlemb::{BilingualLexicon, EmbeddingSpace, SpaceSet};

/// Six paired 2-d points with planted correlation structure.
pub fn fixture_six() -> (DMatrix<f64>, DMatrix<f64>) {
    let x = DMatrix::from_row_slice(6, 2, &[1.0, 2.0, 2.0, 1.0, 3.0, 4.0, 4.0, 3.0, 5.0, 7.0, 6.0, 5.0]);
    let y = DMatrix::from_row_slice(6, 2, &[2.0, 0.5, 1.0, 3.5, 4.5, 1.0, 2.0, 4.5, 5.0, 3.5, 3.0, 7.5]);
    (x, y)
}

/// Deterministic trigonometric fixture: `Y = X·M + E`.
pub fn fixture_trig(n: usize, d: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = DMatrix::from_fn(n, d, |i, j| {
        let (i, j) = (i as f64, j as f64);
        (0.37 * (i + 1.0) * (j + 1.0) + 0.11 * j).sin() + 0.5 * (1.7 * i + 0.3 * j * j).cos()
    });
    let m = DMatrix::from_fn(d, d, |l, j| {
        let (l, j) = (l as f64, j as f64);
        (0.9 * l + 0.4 * j * (l + 1.0)).cos()
    });
    let e = DMatrix::from_fn(n, d, |i, j| {
        let (i, j) = (i as f64, j as f64);
        0.8 * (12.9898 * (i + 1.0) + 78.233 * (j + 1.0) * (j + 1.0) * 0.37 + 0.5 * i * j).sin()
    });
    let y = &x * m + e;
    (x, y)
}

/// Reference canonical correlations computed offline with a generalized
/// symmetric eigensolver on `Cxy Cyy^-1 Cyx v = rho^2 Cxx v`.
pub const ORACLE_SIX: [f64; 2] = [0.9921480549196399, 0.9159409355140413];
pub const ORACLE_TRIG_20_5: [f64; 5] = [
    0.9953501165988152,
    0.9726293832518412,
    0.9286553471897414,
    0.8712401293595559,
    0.35071944592113785,
];
pub const ORACLE_TRIG_100_10: [f64; 10] = [
    0.9942188165587749,
    0.9811469886105052,
    0.9729542329344212,
    0.9665450142113737,
    0.9576263470587327,
    0.9547649051190982,
    0.8844915318145123,
    0.47488073672190667,
    0.33763539933187176,
    0.04598601936167054,
];

fn covariance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows() as f64;
    let ca = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - a.column(j).mean());
    let cb = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] - b.column(j).mean());
    ca.transpose() * cb / (n - 1.0)
}

/// Canonical correlations as square roots of the eigenvalues of
/// `Cxx^-1 Cxy Cyy^-1 Cyx`, found through a real Schur decomposition.
pub fn eigen_oracle(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let cxx = covariance(x, x);
    let cyy = covariance(y, y);
    let cxy = covariance(x, y);
    let m = cxx.try_inverse().unwrap() * &cxy * cyy.try_inverse().unwrap() * cxy.transpose();
    let mut rho: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|c| c.re.max(0.0).sqrt())
        .collect();
    rho.sort_by(|a, b| b.total_cmp(a));
    rho.truncate(x.ncols().min(y.ncols()));
    rho
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// One space copied under a second language code, plus the identity lexicon.
pub fn duplicated_space(words: usize, dim: usize, seed: u64) -> (SpaceSet, BilingualLexicon) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(String, Vec<f32>)> = (0..words)
        .map(|i| (format!("w{i:03}"), (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()))
        .collect();
    let en = EmbeddingSpace::from_rows("en", dim, rows.clone()).unwrap();
    let xx = EmbeddingSpace::from_rows("xx", dim, rows).unwrap();
    let lex = BilingualLexicon::new("en", "xx", en.words().iter().map(|w| (w.clone(), w.clone()))).unwrap();
    ([en, xx].into_iter().collect(), lex)
}

/// Rules by exhaustive enumeration over (top-n word × vocabulary) pairs.
pub fn brute_force_rules(docs: &[Vec<String>], top_n: usize, min_support: f64, min_confidence: f64) -> Vec<(String, String, f64, f64)> {
    use std::collections::BTreeSet;
    let sets: Vec<BTreeSet<&str>> = docs.iter().map(|d| d.iter().map(String::as_str).collect()).collect();
    let vocab: BTreeSet<&str> = sets.iter().flatten().copied().collect();
    let df = |w: &str| sets.iter().filter(|s| s.contains(w)).count();
    let mut ranked: Vec<&str> = vocab.iter().copied().collect();
    ranked.sort_by(|a, b| df(b).cmp(&df(a)).then(a.cmp(b)));
    let n = docs.len() as f64;
    let mut out = Vec::new();
    for x in ranked.into_iter().take(top_n) {
        for u in &vocab {
            if *u == x {
                continue;
            }
            let both = sets.iter().filter(|s| s.contains(x) && s.contains(u)).count();
            if both == 0 {
                continue;
            }
            let support = both as f64 / n;
            let confidence = both as f64 / df(x) as f64;
            if support >= min_support && confidence >= min_confidence {
                out.push((x.to_string(), u.to_string(), support, confidence));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(b.3.total_cmp(&a.3)).then(a.1.cmp(&b.1)));
    out
}

/// Random corpus of at most 20 documents over a small vocabulary.
pub fn random_corpus(rng: &mut impl rand::Rng) -> Vec<Vec<String>> {
    let n_docs = rng.random_range(1..=20);
    let vocab = rng.random_range(2..12);
    (0..n_docs)
        .map(|_| {
            let len = rng.random_range(1..8);
            (0..len).map(|_| format!("w{}", rng.random_range(0..vocab))).collect()
        })
        .collect()
}
