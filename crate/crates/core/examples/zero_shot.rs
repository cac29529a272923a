// Zero-shot cross-lingual classification against monolingual baselines.

use xlemb::synthetic::{MultilingualFixture, MultilingualSpec, PlantedRule};
use xlemb::{fit_hub_alignment, zero_shot_eval, AlignConfig, ClassifyConfig, EvalMode};

pub fn run_example() -> xlemb::Result<()> {
    let fixture = MultilingualFixture::generate(MultilingualSpec::default())?;
    let cfg = AlignConfig {
        kept_ratio: 1.0,
        ..AlignConfig::default()
    };
    let (model, _) = fit_hub_alignment(&fixture.spaces, &fixture.alignment_lexicons(), &cfg)?;
    let rule = PlantedRule::generate(&fixture, 10, 0.4, 5);
    let langs = ["en", "es", "it"];
    let sets: Vec<_> = langs
        .iter()
        .enumerate()
        .map(|(i, l)| rule.dataset(&fixture, l, 1000, 10, 40 + i as u64))
        .collect();

    let clf = ClassifyConfig::default();
    let mut splits = Vec::new();
    for ds in &sets {
        let (train, _, test) = ds.split(clf.train_fraction, clf.dev_fraction, clf.split_seed)?;
        splits.push((train, test));
    }
    for (i, (train, _)) in splits.iter().enumerate() {
        for (j, (_, test)) in splits.iter().enumerate() {
            let mode = if i == j { EvalMode::Monolingual } else { EvalMode::ZeroShot };
            let out = zero_shot_eval(train, test, &model, &fixture.spaces, &clf, mode)?;
            println!(
                "{} -> {}  F1 {:.3}  P {:.3}  R {:.3}",
                langs[i], langs[j], out.metrics.f1, out.metrics.precision, out.metrics.recall
            );
        }
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
