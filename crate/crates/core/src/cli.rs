//! Command-line front end. `run` returns the process exit code.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{load_config, schema_help, RunConfig};
use crate::error::{Error, Result};
use crate::metrics::EvaluationReport;
use crate::neural::{gradient_check, ModelKind, ModelSpec, NetworkParams};
use crate::output::write_atomic;
use crate::pipeline::{run_experiment_suite, run_hybrid, seed_plan, Dataset};
use crate::psr::{ami_profile, cao_profile, select_delay, select_dimension, EmbeddingSpec};
use crate::series::{make_windows, read_csv, split, to_csv, SplitSpec};
use crate::ssa::{ssa_decompose, SsaConfig};
use crate::synth::{generate, SynthConfig};
use crate::vmd::{vmd_decompose, OmegaInit, VmdConfig};

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-forecast",
    version,
    about = "Hybrid SSA / AtGRU / VMD-GRU wind speed forecasting"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "HYBRID_FORECAST_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a timestamp,speed_ms CSV and print count, mean, std, max and min.
    Ingest { path: PathBuf },
    /// Write a seeded synthetic series (daily cycle plus AR(1) noise).
    Synth(SynthArgs),
    /// Split a series into SSA components or VMD modes.
    Decompose(DecomposeArgs),
    /// Choose the embedding delay (mutual information) and dimension (Cao).
    TunePsr(TuneArgs),
    /// Train the hybrid model and forecast the held-out span.
    #[command(after_long_help = schema_help())]
    Forecast(RunArgs),
    /// Run the predictor, decomposer and corrector comparisons.
    #[command(after_long_help = schema_help())]
    Benchmark(RunArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2400)]
    pub len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 7.5)]
    pub mean: f64,
    #[arg(long, default_value_t = 2.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 24.0)]
    pub period: f64,
    #[arg(long, default_value_t = 0.8)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub trend: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Ssa,
    Vmd,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub out: PathBuf,
    /// SSA window length L.
    #[arg(long, default_value_t = 20)]
    pub window: usize,
    /// SSA components summed into the reconstruction.
    #[arg(long, default_value_t = 10)]
    pub keep: usize,
    #[arg(long, default_value_t = 10)]
    pub modes: usize,
    #[arg(long, default_value_t = 5000.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long)]
    pub dc: bool,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 20)]
    pub d_max: usize,
    /// Allowed distance of E1 from 1 when choosing the dimension.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Histogram bins for mutual information.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Directory for ami.csv and cao.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides `experiment.seed`.
    #[arg(long, env = "HYBRID_FORECAST_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GradKind {
    All,
    Mlp,
    Rnn,
    Gru,
    Atgru,
}

#[derive(Debug, Args)]
pub struct GradArgs {
    #[arg(long, value_enum, default_value_t = GradKind::All)]
    pub kind: GradKind,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 4)]
    pub hidden: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(jobs) = cli.jobs {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Ingest { path } => ingest(&path),
        Command::Synth(a) => synth(a),
        Command::Decompose(a) => decompose(a),
        Command::TunePsr(a) => tune_psr(a),
        Command::Forecast(a) => forecast(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Gradcheck(a) => gradcheck(a),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

fn ingest(path: &Path) -> Result<i32> {
    let series = read_csv(path)?;
    let s = series.summary();
    println!("count {}", s.count);
    println!("mean {:.4}", s.mean);
    println!("std {:.4}", s.std);
    println!("max {:.4}", s.max);
    println!("min {:.4}", s.min);
    Ok(0)
}

fn synth(a: SynthArgs) -> Result<i32> {
    let cfg = SynthConfig {
        len: a.len,
        mean: a.mean,
        amplitude: a.amplitude,
        period: a.period,
        phi: a.phi,
        sigma: a.sigma,
        trend: a.trend,
        seed: a.seed,
    };
    let series = generate(&cfg)?;
    let stamps = (0..series.len()).map(|t| t.to_string()).collect();
    let series = series.with_timestamps(stamps)?;
    write(&a.out, &to_csv(&series))?;
    let s = series.summary();
    println!(
        "wrote {} values to {} (mean {:.4}, std {:.4})",
        s.count,
        a.out.display(),
        s.mean,
        s.std
    );
    Ok(0)
}

fn decompose(a: DecomposeArgs) -> Result<i32> {
    let series = read_csv(&a.path)?;
    let mut out = String::new();
    match a.method {
        Method::Ssa => {
            let d = ssa_decompose(series.values(), SsaConfig::new(a.window, a.keep))?;
            let recon = d.reconstruct(a.keep);
            out.push_str("index");
            for i in 1..=d.components.len() {
                out.push_str(&format!(",c{i}"));
            }
            out.push_str(",reconstruction\n");
            for t in 0..series.len() {
                out.push_str(&t.to_string());
                for c in &d.components {
                    out.push_str(&format!(",{}", c[t]));
                }
                out.push_str(&format!(",{}\n", recon[t]));
            }
            println!(
                "{} components, singular values {:?}",
                d.components.len(),
                d.singular_values
            );
        }
        Method::Vmd => {
            let cfg = VmdConfig {
                modes: a.modes,
                alpha: a.alpha,
                tau: a.tau,
                dc: a.dc,
                init: OmegaInit::Zeros,
                tol: a.tol,
                max_iter: a.max_iter,
                ..VmdConfig::default()
            };
            let d = vmd_decompose(series.values(), &cfg)?;
            out.push_str("index");
            for i in 1..=d.modes.len() {
                out.push_str(&format!(",mode{i}"));
            }
            out.push_str(",residual\n");
            for t in 0..series.len() {
                out.push_str(&t.to_string());
                for m in &d.modes {
                    out.push_str(&format!(",{}", m[t]));
                }
                out.push_str(&format!(",{}\n", d.residual[t]));
            }
            println!(
                "{} modes, center frequencies {:?}, {} iterations, converged {}",
                d.modes.len(),
                d.center_freqs,
                d.iterations,
                d.converged
            );
        }
    }
    write(&a.out, &out)?;
    Ok(0)
}

fn tune_psr(a: TuneArgs) -> Result<i32> {
    let series = read_csv(&a.path)?;
    let bins = a
        .bins
        .unwrap_or_else(|| crate::psr::default_bins(series.len()));
    let ami = ami_profile(series.values(), a.tau_max, bins)?;
    let delay = select_delay(&ami);
    let cao = cao_profile(series.values(), delay.tau, a.d_max)?;
    let dim = select_dimension(&cao, a.tol);
    println!(
        "delay {}{}",
        delay.tau,
        if delay.no_minimum {
            " (no local minimum; global minimum used)"
        } else {
            ""
        }
    );
    println!(
        "dimension {}{}",
        dim.dimension,
        if dim.saturated {
            " (E1 never settled; d_max used)"
        } else {
            ""
        }
    );
    if let Some(dir) = a.out {
        let mut csv = String::from("tau,ami\n");
        for (tau, v) in &ami.values {
            csv.push_str(&format!("{tau},{v}\n"));
        }
        write(&dir.join("ami.csv"), &csv)?;
        let mut csv = String::from("dimension,e,e1\n");
        for p in &cao.values {
            csv.push_str(&format!("{},{},{}\n", p.dimension, p.e, p.delta_e));
        }
        write(&dir.join("cao.csv"), &csv)?;
    }
    Ok(0)
}

fn load_run(a: &RunArgs) -> Result<(RunConfig, Dataset)> {
    let mut cfg = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.pipeline.seed = seed;
    }
    let (series, default_name) = match &cfg.data.path {
        Some(path) => {
            let s = read_csv(path)?;
            let name = s.name().to_string();
            (s, name)
        }
        None => (generate(&cfg.data.synth)?, "synthetic".to_string()),
    };
    let name = cfg.data.name.clone().unwrap_or(default_name);
    let (train, test) = split(
        &series,
        SplitSpec {
            test_len: cfg.data.test_len,
        },
    )?;
    Ok((cfg, Dataset { name, train, test }))
}

fn manifest(command: &str, cfg: &RunConfig, dataset: &Dataset) -> String {
    let seeds: Vec<_> = seed_plan(&cfg.pipeline)
        .into_iter()
        .map(|(role, init, shuffle)| json!({ "role": role, "init": init, "shuffle": shuffle }))
        .collect();
    let value = json!({
        "tool": "hybrid-forecast",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "multi_step": "recursive",
        "dataset": {
            "name": dataset.name,
            "train_len": dataset.train.len(),
            "test_len": dataset.test.len(),
        },
        "config": cfg,
        "seeds": seeds,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("manifest is plain data");
    text.push('\n');
    text
}

fn reports_csv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from("model,horizon,rmse,mae,mape,r2\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.model_name, r.horizon, r.rmse, r.mae, r.mape, r.r2
        ));
    }
    out
}

fn print_reports(reports: &[EvaluationReport]) {
    println!(
        "{:<24} {:>3} {:>9} {:>9} {:>9} {:>9}",
        "model", "h", "RMSE", "MAE", "MAPE%", "R2"
    );
    for r in reports {
        println!(
            "{:<24} {:>3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            r.model_name, r.horizon, r.rmse, r.mae, r.mape, r.r2
        );
    }
}

fn forecast(a: RunArgs) -> Result<i32> {
    let (cfg, dataset) = load_run(&a)?;
    let run = run_hybrid(&dataset.train, &dataset.test, &cfg.pipeline)?;
    for f in &run.forecasts {
        write(
            &a.out.join(format!("forecast_h{}.csv", f.horizon)),
            &f.to_csv(),
        )?;
    }
    let mut reports = run.preliminary_reports.clone();
    reports.extend(run.reports.iter().cloned());
    write(&a.out.join("reports.csv"), &reports_csv(&reports))?;
    write(
        &a.out.join("manifest.json"),
        &manifest("forecast", &cfg, &dataset),
    )?;
    print_reports(&reports);
    Ok(0)
}

fn benchmark(a: RunArgs) -> Result<i32> {
    let (cfg, dataset) = load_run(&a)?;
    let result = run_experiment_suite(std::slice::from_ref(&dataset), &cfg.suite())?;
    write(&a.out.join("matrix.csv"), &result.matrix_csv())?;
    write(&a.out.join("results.csv"), &result.long_csv())?;
    for plot in &result.plots {
        write(
            &a.out.join(format!("{}.csv", plot.file_stem())),
            &plot.to_csv(),
        )?;
    }
    write(
        &a.out.join("manifest.json"),
        &manifest("benchmark", &cfg, &dataset),
    )?;
    let reports: Vec<EvaluationReport> = result
        .rows
        .iter()
        .filter_map(|r| r.report.clone())
        .collect();
    print_reports(&reports);
    let failed = result.failures();
    if failed > 0 {
        eprintln!("warning: {failed} cells failed; see results.csv");
        for r in result.rows.iter().filter(|r| r.report.is_none()) {
            eprintln!(
                "  {} {} h{}: {}",
                r.experiment,
                r.model,
                r.horizon,
                r.error.as_deref().unwrap_or("")
            );
        }
    }
    Ok(0)
}

fn gradcheck(a: GradArgs) -> Result<i32> {
    use rand::{Rng, SeedableRng};
    let kinds: Vec<ModelKind> = match a.kind {
        GradKind::All => vec![
            ModelKind::Mlp,
            ModelKind::Rnn,
            ModelKind::Gru,
            ModelKind::AtGru,
        ],
        GradKind::Mlp => vec![ModelKind::Mlp],
        GradKind::Rnn => vec![ModelKind::Rnn],
        GradKind::Gru => vec![ModelKind::Gru],
        GradKind::Atgru => vec![ModelKind::AtGru],
    };
    let mut failed = false;
    for kind in kinds {
        let mut worst: f64 = 0.0;
        for seed in 0..a.seeds {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..a.window + 6)
                .map(|_| rng.random_range(0.0..1.0))
                .collect();
            let batch = make_windows(&xs, EmbeddingSpec::new(a.window, 1))?;
            let hidden = if kind == ModelKind::Mlp {
                vec![a.hidden, a.hidden]
            } else {
                vec![a.hidden]
            };
            let params = NetworkParams::init(ModelSpec::new(kind, a.window, hidden, seed))?;
            worst = worst.max(gradient_check(&params, &batch, a.step)?.max_relative_error);
        }
        let ok = worst < a.tolerance;
        failed |= !ok;
        println!(
            "{:<6} max relative error {worst:.3e} {}",
            kind.label(),
            if ok { "ok" } else { "FAIL" }
        );
    }
    if failed {
        return Err(Error::NumericalFailure(format!(
            "gradient check exceeded tolerance {}",
            a.tolerance
        )));
    }
    Ok(0)
}
