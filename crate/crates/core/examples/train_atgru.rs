//! Trains an attention GRU on one-step windows, saves and reloads it.

use hybrid_forecast::neural::{format, predict_sequence, train, ModelKind, ModelSpec, TrainConfig};
use hybrid_forecast::synth::{generate, SynthConfig};
use hybrid_forecast::{make_windows, rmse, split, EmbeddingSpec, Normalizer, SplitSpec};

fn main() -> hybrid_forecast::Result<()> {
    let series = generate(&SynthConfig {
        len: 1000,
        ..SynthConfig::default()
    })?;
    let (train_part, test_part) = split(&series, SplitSpec { test_len: 200 })?;
    let lo = train_part.min();
    let hi = train_part.max();
    let norm = Normalizer::new(lo, hi)?;
    let spec = EmbeddingSpec::new(24, 1);

    let windows = make_windows(&norm.transform_all(train_part.values()), spec)?;
    let config = TrainConfig {
        epochs: 20,
        ..TrainConfig::default()
    };
    let outcome = train(
        ModelSpec::new(ModelKind::AtGru, 24, vec![16], 7),
        &windows,
        &config,
    )?;
    let first = outcome.loss_curve.first().copied().unwrap_or(f64::NAN);
    let last = outcome.loss_curve.last().copied().unwrap_or(f64::NAN);
    println!("training loss {first:.5} -> {last:.5}");

    let path = std::env::temp_dir().join("atgru-example.params");
    format::save(&outcome.params, &path)?;
    let restored = format::load(&path)?;
    println!(
        "reloaded parameters identical: {}",
        restored == outcome.params
    );

    // test windows start with the last span of training values
    let mut tail = train_part.values()[train_part.len() - spec.span()..].to_vec();
    tail.extend_from_slice(test_part.values());
    let test_windows = make_windows(&norm.transform_all(&tail), spec)?;
    let predicted = norm.inverse_all(predict_sequence(&restored, &test_windows)?.values());
    println!(
        "one-step test rmse {:.4}",
        rmse(test_part.values(), &predicted)?
    );
    Ok(())
}
