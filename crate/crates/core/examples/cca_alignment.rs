// CCA between two small views, then a three-language hub alignment.

use nalgebra::DMatrix;
use xlemb::synthetic::{word_name, MultilingualFixture, MultilingualSpec};
use xlemb::{cosine, fit_cca, fit_hub_alignment, AlignConfig};

pub fn run_example() -> xlemb::Result<()> {
    let x = DMatrix::from_row_slice(6, 2, &[1.0, 2.0, 2.0, 1.0, 3.0, 4.0, 4.0, 3.0, 5.0, 7.0, 6.0, 5.0]);
    let y = DMatrix::from_row_slice(6, 2, &[2.0, 0.5, 1.0, 3.5, 4.5, 1.0, 2.0, 4.5, 5.0, 3.5, 3.0, 7.5]);
    let cca = fit_cca(&x, &y, 0.0, 1.0)?;
    println!("canonical correlations: {:?}", cca.correlations);

    let fixture = MultilingualFixture::generate(MultilingualSpec {
        words: 300,
        dim: 20,
        align_pairs: 120,
        validation_pairs: 60,
        ..MultilingualSpec::default()
    })?;
    let cfg = AlignConfig {
        kept_ratio: 1.0,
        ..AlignConfig::default()
    };
    let (model, summaries) = fit_hub_alignment(&fixture.spaces, &fixture.alignment_lexicons(), &cfg)?;
    for s in &summaries {
        println!(
            "{} -> {}: {} pairs, leading correlations {:.4} {:.4}",
            s.language,
            model.pivot(),
            s.pairs,
            s.correlations[0],
            s.correlations[1]
        );
    }

    let i = fixture.validation_indices[0];
    let en = model.project(&word_name("en", i), "en", &fixture.spaces)?;
    for lang in ["es", "it"] {
        let v = model.project(&word_name(lang, i), lang, &fixture.spaces)?;
        println!("held-out word {i}: cos(en, {lang}) = {:.4}", cosine(&en, &v)?);
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
