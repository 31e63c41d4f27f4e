//! Denoises a noisy sine with SSA and prints the singular spectrum.

use std::f64::consts::PI;

use hybrid_forecast::{ssa_decompose, SsaConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

fn main() -> hybrid_forecast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let clean: Vec<f64> = (0..400)
        .map(|t| (2.0 * PI * t as f64 / 25.0).sin())
        .collect();
    let noisy: Vec<f64> = clean.iter().map(|c| c + noise.sample(&mut rng)).collect();

    let dec = ssa_decompose(&noisy, SsaConfig::new(20, 2))?;
    let spectrum: Vec<String> = dec
        .singular_values
        .iter()
        .map(|s| format!("{s:.2}"))
        .collect();
    println!("singular values: {}", spectrum.join(" "));
    for p in [1, 2, 4, 10, 20] {
        println!(
            "keep {p:>2}: rmse to clean signal {:.4}",
            rmse(&dec.reconstruct(p), &clean)
        );
    }
    println!(
        "noisy input:  rmse to clean signal {:.4}",
        rmse(&noisy, &clean)
    );
    Ok(())
}
