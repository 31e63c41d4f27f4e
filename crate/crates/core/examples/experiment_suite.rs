//! Runs a reduced experiment suite and prints the results matrix.

use hybrid_forecast::neural::ModelKind;
use hybrid_forecast::pipeline::{run_experiment_suite, Dataset, SuiteConfig};
use hybrid_forecast::synth::{generate, SynthConfig};
use hybrid_forecast::{split, ErrorDecomposer, PipelineConfig, SplitSpec, SsaConfig};

fn main() -> hybrid_forecast::Result<()> {
    let series = generate(&SynthConfig {
        len: 1000,
        ..SynthConfig::default()
    })?;
    let (train, test) = split(&series, SplitSpec { test_len: 150 })?;
    let mut base = PipelineConfig {
        horizons: vec![1, 3],
        history: 128,
        residual_history: 128,
        ..PipelineConfig::default()
    };
    for stage in [&mut base.predictor, &mut base.corrector] {
        stage.hidden = 8;
        stage.train.epochs = 5;
    }
    let vmd = base.error_decomposer;
    let config = SuiteConfig {
        predictors: vec![ModelKind::Mlp, ModelKind::AtGru],
        decomposers: vec![
            vmd,
            ErrorDecomposer::Ssa(SsaConfig::default()),
            ErrorDecomposer::None,
        ],
        correctors: vec![ModelKind::Mlp, ModelKind::Gru],
        ..SuiteConfig::new(base)
    };
    let datasets = [Dataset {
        name: "synthetic".into(),
        train,
        test,
    }];
    let result = run_experiment_suite(&datasets, &config)?;
    print!("{}", result.matrix_csv());
    println!(
        "{} failed cells, {} plot tables",
        result.failures(),
        result.plots.len()
    );
    Ok(())
}
