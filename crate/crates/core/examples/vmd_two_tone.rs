//! Splits a two-tone signal into band-limited modes with VMD, once with
//! every center frequency starting at zero and once spread uniformly.

use std::f64::consts::PI;

use hybrid_forecast::{vmd_decompose, OmegaInit, VmdConfig};

fn main() -> hybrid_forecast::Result<()> {
    let x: Vec<f64> = (0..1024)
        .map(|t| {
            let t = t as f64;
            (2.0 * PI * 0.04 * t).cos() + 0.5 * (2.0 * PI * 0.2 * t).cos()
        })
        .collect();
    for init in [OmegaInit::Zeros, OmegaInit::Uniform] {
        let config = VmdConfig {
            alpha: 2000.0,
            init,
            ..VmdConfig::with_modes(2)
        };
        let dec = vmd_decompose(&x, &config)?;
        println!(
            "init {init:?}: converged {} after {} iterations",
            dec.converged, dec.iterations
        );
        for (k, (mode, w)) in dec.modes.iter().zip(&dec.center_freqs).enumerate() {
            let rms = (mode.iter().map(|v| v * v).sum::<f64>() / mode.len() as f64).sqrt();
            println!(
                "  mode {}: center {w:.4} cycles/sample, rms {rms:.4}",
                k + 1
            );
        }
        let residual = (dec.residual.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
        println!("  residual rms {residual:.4}");
    }
    Ok(())
}
