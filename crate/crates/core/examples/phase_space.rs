//! Picks an embedding delay by mutual information and a dimension by
//! Cao's method, then predicts one step with the local mean rule.

use hybrid_forecast::psr::{
    ami_profile, cao_profile, default_bins, default_neighbors, local_mean_predict, select_delay,
    select_dimension,
};
use hybrid_forecast::synth::{generate, SynthConfig};
use hybrid_forecast::EmbeddingSpec;

fn main() -> hybrid_forecast::Result<()> {
    let series = generate(&SynthConfig {
        len: 1200,
        ..SynthConfig::default()
    })?;
    let x = series.values();

    let ami = ami_profile(x, 30, default_bins(x.len()))?;
    let delay = select_delay(&ami);
    println!(
        "delay {} (no interior minimum: {})",
        delay.tau, delay.no_minimum
    );

    let cao = cao_profile(x, delay.tau, 10)?;
    for p in &cao.values {
        println!("d {:>2}  E {:.4}  E1 {:.4}", p.dimension, p.e, p.delta_e);
    }
    let dim = select_dimension(&cao, 0.05);
    println!("dimension {} (saturated: {})", dim.dimension, dim.saturated);

    let spec = EmbeddingSpec::new(dim.dimension, delay.tau);
    let history = &x[..x.len() - 1];
    let k = default_neighbors(history.len() - spec.span() + 1);
    let guess = local_mean_predict(history, spec, k)?;
    println!(
        "local mean forecast {guess:.4}, actual {:.4}",
        x[x.len() - 1]
    );
    Ok(())
}
