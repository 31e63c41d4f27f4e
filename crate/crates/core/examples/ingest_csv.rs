//! Writes a synthetic series in the ingestion format, reads it back and
//! prints its summary statistics.

use hybrid_forecast::series::{read_csv, to_csv};
use hybrid_forecast::synth::{generate, SynthConfig};

fn main() -> hybrid_forecast::Result<()> {
    let series = generate(&SynthConfig {
        len: 500,
        seed: 9,
        ..SynthConfig::default()
    })?;
    let path = std::env::temp_dir().join("synthetic-wind.csv");
    std::fs::write(&path, to_csv(&series))?;
    let loaded = read_csv(&path)?;
    let s = loaded.summary();
    println!(
        "{}: count {} mean {:.4} std {:.4} max {:.4} min {:.4}",
        path.display(),
        s.count,
        s.mean,
        s.std,
        s.max,
        s.min
    );
    Ok(())
}
