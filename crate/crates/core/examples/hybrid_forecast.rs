//! Runs the full hybrid pipeline on a synthetic series and compares the
//! preliminary and corrected forecasts per horizon.

use hybrid_forecast::synth::{generate, SynthConfig};
use hybrid_forecast::{run_hybrid, split, PipelineConfig, SplitSpec};

fn main() -> hybrid_forecast::Result<()> {
    let series = generate(&SynthConfig {
        len: 1400,
        seed: 2,
        ..SynthConfig::default()
    })?;
    let (train, test) = split(&series, SplitSpec { test_len: 200 })?;
    let mut config = PipelineConfig {
        seed: 2,
        ..PipelineConfig::default()
    };
    for stage in [&mut config.predictor, &mut config.corrector] {
        stage.hidden = 16;
        stage.train.epochs = 15;
    }
    let run = run_hybrid(&train, &test, &config)?;
    println!("{}", run.model_name);
    for (pre, hyb) in run.preliminary_reports.iter().zip(&run.reports) {
        println!(
            "h{}: preliminary rmse {:.4}, corrected rmse {:.4}, corrected mape {:.2}%",
            pre.horizon, pre.rmse, hyb.rmse, hyb.mape
        );
    }
    let first = &run.forecasts[0];
    print!(
        "{}",
        first
            .to_csv()
            .lines()
            .take(4)
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!();
    Ok(())
}
