// Reading and writing word2vec text files.

use std::io::Cursor;

use xlemb::{cosine, load_embeddings, save_embeddings, EmbeddingSpace};

pub fn run_example() -> xlemb::Result<()> {
    let text = "4 3\nodio 0.9 0.1 0.0\nhate 0.8 0.2 0.1\nodio 1.0 1.0 1.0\nsole 0.0 0.1 0.9\n";
    let (space, stats) = EmbeddingSpace::read_word2vec(Cursor::new(text), "mixed")?;
    println!("loaded {} words of dim {} ({} duplicate ignored)", space.len(), space.dim(), stats.duplicates);

    let odio = space.vector("odio").expect("first occurrence kept");
    let hate = space.vector("hate").unwrap();
    let sole = space.vector("sole").unwrap();
    println!("cos(odio, hate) = {:.4}", cosine(odio, hate)?);
    println!("cos(odio, sole) = {:.4}", cosine(odio, sole)?);

    let dir = tempfile::tempdir().map_err(|e| xlemb::Error::io(std::env::temp_dir(), e))?;
    let path = dir.path().join("mixed.vec");
    save_embeddings(&space, &path)?;
    let (reloaded, _) = load_embeddings(&path, "mixed")?;
    let drift = space
        .rows()
        .map(|(w, v)| {
            let r = reloaded.vector(w).unwrap();
            v.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max)
        })
        .fold(0.0f32, f32::max);
    println!("round trip through {}: max drift {drift:e}", path.display());

    match EmbeddingSpace::read_word2vec(Cursor::new("2 3\na 1 2 3\nb 1 2\n"), "bad") {
        Err(e) => println!("malformed file rejected: {e}"),
        Ok(_) => unreachable!("short row must be rejected"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
