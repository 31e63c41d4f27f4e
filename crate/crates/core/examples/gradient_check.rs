//! Compares analytic gradients with central differences for each model.

use hybrid_forecast::neural::{gradient_check, ModelKind, ModelSpec, NetworkParams};
use hybrid_forecast::{make_windows, EmbeddingSpec};

fn main() -> hybrid_forecast::Result<()> {
    let xs: Vec<f64> = (0..12)
        .map(|t| (t as f64 * 0.7).sin() * 0.5 + 0.5)
        .collect();
    let batch = make_windows(&xs, EmbeddingSpec::new(5, 1))?;
    for (kind, hidden) in [
        (ModelKind::Mlp, vec![8, 4]),
        (ModelKind::Rnn, vec![6]),
        (ModelKind::Gru, vec![6]),
        (ModelKind::AtGru, vec![6]),
    ] {
        let params = NetworkParams::init(ModelSpec::new(kind, 5, hidden, 3))?;
        let report = gradient_check(&params, &batch, 1e-5)?;
        println!(
            "{:<6} {:>4} parameters, max relative error {:.2e}",
            kind.label(),
            report.parameters,
            report.max_relative_error
        );
    }
    Ok(())
}
