// Skip-gram with negative sampling on a corpus with planted pairs.
//
// `p{i}` and `q{i}` always share the private context words `c{i}x*`, while
// `z{i}` only ever appears next to common filler words.

use xlemb::synthetic::paired_token_corpus;
use xlemb::{cosine, train_sgns, SgnsConfig};

pub fn run_example() -> xlemb::Result<()> {
    let corpus = paired_token_corpus(8, 40, 7);
    let cfg = SgnsConfig {
        dim: 16,
        epochs: 25,
        min_count: 1,
        subsample_t: 0.0,
        rng_seed: 7,
        ..SgnsConfig::default()
    };
    let space = train_sgns(&corpus, "xx", &cfg)?;
    println!("{} lines, vocabulary {}", corpus.len(), space.len());

    let mut gaps = Vec::new();
    for i in 0..8 {
        let p = space.vector(&format!("p{i}")).unwrap();
        let q = space.vector(&format!("q{i}")).unwrap();
        let z = space.vector(&format!("z{i}")).unwrap();
        let (pq, pz) = (cosine(p, q)?, cosine(p, z)?);
        println!("pair {i}: cos(p, q) = {pq:+.3}   cos(p, z) = {pz:+.3}");
        gaps.push(pq - pz);
    }
    println!("mean gap {:.3}", gaps.iter().sum::<f64>() / gaps.len() as f64);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
