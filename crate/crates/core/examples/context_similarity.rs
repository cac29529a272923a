// Association-rule contexts and cross-lingual context similarity.

use std::collections::HashMap;

use xlemb::rules::{context_of, ContextEntry};
use xlemb::similarity::SimilarityConfig;
use xlemb::synthetic::{word_name, MultilingualFixture, MultilingualSpec, PlantedRule};
use xlemb::{context_sim, cross_lingual_report, fit_hub_alignment, met_sim, AlignConfig, Label, MiningConfig, SimVariant};

pub fn run_example() -> xlemb::Result<()> {
    let a = ContextEntry { support: 0.5, confidence: 0.8 };
    let b = ContextEntry { support: 0.3, confidence: 0.4 };
    for variant in [SimVariant::Literal, SimVariant::Bounded] {
        println!("met_sim {variant}: {:.3}", met_sim(a, b, variant)?);
    }

    let en = vec![
        vec!["migrants", "border", "invasion"],
        vec!["migrants", "border"],
        vec!["migrants", "invasion", "go"],
        vec!["women", "kitchen"],
    ];
    let es = vec![
        vec!["inmigrantes", "frontera", "invasion"],
        vec!["inmigrantes", "frontera"],
        vec!["mujeres", "cocina"],
    ];
    let ctx_en = context_of(&en, "migrants", 0.2, 0.3)?;
    let ctx_es = context_of(&es, "inmigrantes", 0.2, 0.3)?;
    println!("C(migrants) = {:?}", ctx_en.entries.keys().collect::<Vec<_>>());
    println!("C(inmigrantes) = {:?}", ctx_es.entries.keys().collect::<Vec<_>>());
    let vectors = |rows: &[(&str, [f64; 3])]| -> HashMap<String, Vec<f64>> {
        rows.iter().map(|(w, v)| (w.to_string(), v.to_vec())).collect()
    };
    let en_vectors = vectors(&[("border", [1.0, 0.0, 0.1]), ("invasion", [0.0, 1.0, 0.1])]);
    let es_vectors = vectors(&[("frontera", [0.9, 0.1, 0.1]), ("invasion", [0.1, 0.9, 0.0])]);
    let s = context_sim(&ctx_en, &en_vectors, &ctx_es, &es_vectors, SimVariant::Literal)?;
    println!("cont-sim(migrants, inmigrantes) = {:.3}", s.score);

    let fixture = MultilingualFixture::generate(MultilingualSpec {
        words: 120,
        dim: 16,
        align_pairs: 100,
        validation_pairs: 10,
        ..MultilingualSpec::default()
    })?;
    let rule = PlantedRule::generate(&fixture, 6, 0.3, 11);
    let datasets: Vec<_> = ["en", "es", "it"]
        .iter()
        .enumerate()
        .map(|(i, l)| rule.dataset(&fixture, l, 400, 6, 100 + i as u64))
        .collect();
    let cfg = AlignConfig { kept_ratio: 1.0, ..AlignConfig::default() };
    let (model, _) = fit_hub_alignment(&fixture.spaces, &fixture.alignment_lexicons(), &cfg)?;
    let mining = MiningConfig { top_n: 30, min_support: 0.01, min_confidence: 0.05, remove_stopwords: false };
    let seed = word_name("en", fixture.align_indices[0]);
    let records = cross_lingual_report(
        &[seed.as_str()],
        "en",
        &datasets,
        Label::Hate,
        &model,
        &fixture.spaces,
        &mining,
        &SimilarityConfig::default(),
    )?;
    for r in &records {
        let terms: Vec<String> = r.terms.iter().map(|t| format!("{} ({:.3})", t.word, t.score)).collect();
        println!("{} [{}] -> {}: {}", r.seed, r.class.as_str(), r.target_lang, terms.join(", "));
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
