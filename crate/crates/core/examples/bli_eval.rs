// Bilingual lexicon induction on held-out word pairs.

use xlemb::synthetic::{MultilingualFixture, MultilingualSpec};
use xlemb::{bli_precision_at_k, fit_hub_alignment, knn, AlignConfig};

pub fn run_example() -> xlemb::Result<()> {
    let fixture = MultilingualFixture::generate(MultilingualSpec {
        noise: 0.05,
        ..MultilingualSpec::default()
    })?;
    let cfg = AlignConfig {
        kept_ratio: 1.0,
        ..AlignConfig::default()
    };
    let (model, _) = fit_hub_alignment(&fixture.spaces, &fixture.alignment_lexicons(), &cfg)?;

    for (src, tgt) in [("en", "es"), ("es", "it"), ("it", "en")] {
        let validation = fixture.validation_lexicon(src, tgt);
        let scores: Vec<String> = [1, 5, 10]
            .iter()
            .map(|&k| {
                bli_precision_at_k(&model, &fixture.spaces, &validation, k)
                    .map(|r| format!("P@{k} {:.3}", r.precision))
            })
            .collect::<xlemb::Result<_>>()?;
        println!("{src} -> {tgt}: {}", scores.join("  "));
    }

    let query = xlemb::synthetic::word_name("it", fixture.validation_indices[3]);
    let list = knn(&model, &fixture.spaces, &query, "it", "en", 3)?;
    for n in &list.neighbors {
        println!("{query} ~ {} ({:.3})", n.word, n.score);
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
