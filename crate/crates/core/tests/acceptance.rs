//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hybrid_forecast::neural::{gradient_check, ModelKind, ModelSpec, NetworkParams};
use hybrid_forecast::psr::{
    ami_profile, cao_profile, default_bins, select_delay, select_dimension,
};
use hybrid_forecast::synth::{generate, SynthConfig};
use hybrid_forecast::{
    mae, make_windows, mape, r2, rmse, run_hybrid, split, ssa_decompose, vmd_decompose,
    EmbeddingSpec, EvaluationReport, PipelineConfig, SplitSpec, SsaConfig, VmdConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{naive_metrics, oracle_ami, oracle_cao_e, oracle_dimension, oracle_first_minimum};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ssa_exact_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=200);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for l in 2..=n {
            let dec = ssa_decompose(&x, SsaConfig::new(l, 1)).map_err(|e| e.to_string())?;
            let sum = dec.reconstruct(dec.components.len());
            let err = sum
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / scale;
            worst = worst.max(err);
            cases += 1;
        }
    }
    ensure(
        worst <= 1e-9,
        format!("{cases} (series, L) cases, worst relative error {worst:.2e}"),
    )
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn vmd_two_tones() -> Outcome {
    let tone =
        |f: f64| -> Vec<f64> { (0..1024).map(|t| (2.0 * PI * f * t as f64).cos()).collect() };
    let (a, b) = (tone(0.04), tone(0.20));
    let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
    let cfg = VmdConfig {
        alpha: 2000.0,
        ..VmdConfig::with_modes(2)
    };
    let dec = vmd_decompose(&x, &cfg).map_err(|e| e.to_string())?;
    let w = &dec.center_freqs;
    let (ca, cb) = (
        correlation(&dec.modes[0], &a),
        correlation(&dec.modes[1], &b),
    );
    let ok = (w[0] - 0.04).abs() <= 0.01
        && (w[1] - 0.20).abs() <= 0.01
        && ca > 0.95
        && cb > 0.95
        && dec.converged
        && dec.iterations <= 500;
    ensure(
        ok,
        format!(
            "freqs [{:.4}, {:.4}], correlations [{ca:.4}, {cb:.4}], converged {} after {} iterations",
            w[0], w[1], dec.converged, dec.iterations
        ),
    )
}

fn gradients() -> Outcome {
    let d = 5;
    let mut worst: f64 = 0.0;
    for (kind, hidden) in [
        (ModelKind::Mlp, vec![6, 4]),
        (ModelKind::Rnn, vec![4]),
        (ModelKind::Gru, vec![4]),
        (ModelKind::AtGru, vec![4]),
    ] {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);
            let xs: Vec<f64> = (0..d + 6).map(|_| rng.random_range(0.0..1.0)).collect();
            let batch = make_windows(&xs, EmbeddingSpec::new(d, 1)).map_err(|e| e.to_string())?;
            let params = NetworkParams::init(ModelSpec::new(kind, d, hidden.clone(), seed))
                .map_err(|e| e.to_string())?;
            let report = gradient_check(&params, &batch, 1e-5).map_err(|e| e.to_string())?;
            worst = worst.max(report.max_relative_error);
        }
    }
    ensure(
        worst < 1e-4,
        format!("80 instances, worst relative error {worst:.2e}"),
    )
}

fn psr_sanity() -> Outcome {
    let x: Vec<f64> = (0..1000)
        .map(|t| (2.0 * PI * t as f64 / 24.0).sin())
        .collect();
    let bins = default_bins(x.len());
    let profile = ami_profile(&x, 24, bins).map_err(|e| e.to_string())?;
    let oracle: Vec<f64> = (1..=24).map(|tau| oracle_ami(&x, tau, bins)).collect();
    let ami_match = profile
        .values
        .iter()
        .zip(&oracle)
        .all(|((_, a), b)| (a - b).abs() < 1e-12);
    let tau = select_delay(&profile).tau;
    let oracle_tau = oracle_first_minimum(&oracle);

    let cao = cao_profile(&x, 6, 8).map_err(|e| e.to_string())?;
    let e: Vec<f64> = (1..=9).map(|d| oracle_cao_e(&x, 6, d)).collect();
    let cao_match = cao
        .values
        .iter()
        .zip(&e)
        .all(|(p, o)| (p.e - o).abs() < 1e-12);
    let dim = select_dimension(&cao, 0.05).dimension;
    let oracle_dim = oracle_dimension(&e, 0.05);

    let ok = ami_match
        && tau == oracle_tau
        && tau == 6
        && cao_match
        && Some(dim) == oracle_dim
        && dim <= 4;
    ensure(
        ok,
        format!(
            "delay {tau} (oracle {oracle_tau}, expected 6), dimension {dim} (oracle {oracle_dim:?}, expected <= 4), \
             AMI oracle match {ami_match}, Cao oracle match {cao_match}"
        ),
    )
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..300);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..20.0)).collect();
        let p: Vec<f64> = y.iter().map(|v| v + rng.random_range(-3.0..3.0)).collect();
        let o = naive_metrics(&y, &p);
        let got = [mae(&y, &p), rmse(&y, &p), mape(&y, &p), r2(&y, &p)];
        for (g, o) in got.into_iter().zip(o) {
            worst = worst.max((g.map_err(|e| e.to_string())? - o).abs());
        }
    }
    let hand = EvaluationReport::evaluate("hand", 1, &[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0])
        .map_err(|e| e.to_string())?;
    let hand_ok = (hand.mae - 0.6667).abs() < 1e-3
        && (hand.rmse - 0.8165).abs() < 1e-3
        && (hand.mape - 44.444).abs() < 1e-3
        && hand.r2.abs() < 1e-3;
    ensure(
        worst < 1e-10 && hand_ok,
        format!(
            "worst oracle gap {worst:.2e}; hand case MAE {:.4} RMSE {:.4} MAPE {:.3} R2 {:.3}",
            hand.mae, hand.rmse, hand.mape, hand.r2
        ),
    )
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hybrid-forecast"));
    cmd.env_remove("HYBRID_FORECAST_SEED")
        .env_remove("HYBRID_FORECAST_JOBS");
    cmd
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = bin().args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

const FORECAST_CONFIG: &str = r#"
[data]
synth_len = 900
test_len = 100
synth_seed = 4
[predictor]
hidden = 8
[corrector]
hidden = 8
[train]
epochs = 5
[experiment]
seed = 4
history = 128
residual_history = 128
"#;

fn superposition_and_determinism() -> Outcome {
    let series = generate(&SynthConfig {
        len: 900,
        seed: 4,
        ..SynthConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let (train, test) = split(&series, SplitSpec { test_len: 100 }).map_err(|e| e.to_string())?;
    let mut config = PipelineConfig {
        history: 128,
        residual_history: 128,
        seed: 4,
        ..PipelineConfig::default()
    };
    for stage in [&mut config.predictor, &mut config.corrector] {
        stage.hidden = 8;
        stage.train.epochs = 5;
    }
    let run = run_hybrid(&train, &test, &config).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut nonzero = 0;
    for f in &run.forecasts {
        for i in 0..f.final_forecast.len() {
            if f.final_forecast[i] - f.preliminary[i] - f.correction[i] != 0.0 {
                nonzero += 1;
            }
            checked += 1;
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, FORECAST_CONFIG).map_err(|e| e.to_string())?;
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    cli(&["forecast", "--config", cfg, "--out", a.to_str().unwrap()])?;
    cli(&["forecast", "--config", cfg, "--out", b.to_str().unwrap()])?;
    let mut differing = Vec::new();
    for name in [
        "forecast_h1.csv",
        "forecast_h2.csv",
        "forecast_h3.csv",
        "reports.csv",
    ] {
        let same =
            fs::read(a.join(name)).ok() == fs::read(b.join(name)).ok() && a.join(name).exists();
        if !same {
            differing.push(name);
        }
    }
    ensure(
        nonzero == 0 && differing.is_empty(),
        format!("{nonzero} of {checked} superposition residuals non-zero; rerun differences {differing:?}"),
    )
}

fn hybrid_improves() -> Outcome {
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in 0..5u64 {
        let series = generate(&SynthConfig {
            len: 2400,
            seed,
            ..SynthConfig::default()
        })
        .map_err(|e| e.to_string())?;
        let (train, test) =
            split(&series, SplitSpec { test_len: 400 }).map_err(|e| e.to_string())?;
        let mut config = PipelineConfig {
            horizons: vec![1],
            seed,
            ..PipelineConfig::default()
        };
        for stage in [&mut config.predictor, &mut config.corrector] {
            stage.hidden = 16;
            stage.train.epochs = 30;
        }
        let run = run_hybrid(&train, &test, &config).map_err(|e| e.to_string())?;
        let (pre, hyb) = (run.preliminary_reports[0].rmse, run.reports[0].rmse);
        if hyb <= pre {
            wins += 1;
        }
        lines.push(format!("seed {seed}: {pre:.4} -> {hyb:.4}"));
    }
    ensure(
        wins >= 4,
        format!("{wins}/5 seeds improved at h1 ({})", lines.join(", ")),
    )
}

const BENCHMARK_CONFIG: &str = r#"
[data]
synth_len = 1400
test_len = 200
synth_seed = {seed}
[predictor]
hidden = 8
[corrector]
hidden = 8
[train]
epochs = 10
[experiment]
seed = {seed}
"#;

fn read_matrix(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    Ok((header, rows))
}

fn benchmark_structure() -> Outcome {
    let expected_header: Vec<String> = ["experiment", "dataset", "model", "status"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=3).flat_map(|h| ["rmse", "mae", "mape", "r2"].map(|m| format!("h{h}_{m}"))))
        .collect();
    let expected_models = [
        ("I-II", "SSA-BPNN"),
        ("I-II", "SSA-RNN"),
        ("I-II", "SSA-GRU"),
        ("I-II", "SSA-AtGRU"),
        ("III-IV", "SSA-AtGRU-VMD-GRU"),
        ("III-IV", "SSA-AtGRU-SSA-GRU"),
        ("III-IV", "SSA-AtGRU-None-GRU"),
        ("V", "SSA-AtGRU-VMD-BPNN"),
        ("V", "SSA-AtGRU-VMD-RNN"),
        ("V", "SSA-AtGRU-VMD-AtGRU"),
        ("V", "SSA-AtGRU-VMD-GRU"),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    let mut monotone = vec![0usize; expected_models.len()];
    for seed in 0..5u64 {
        let cfg = dir.path().join(format!("bench{seed}.toml"));
        let text = BENCHMARK_CONFIG.replace("{seed}", &seed.to_string());
        fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let out = dir.path().join(format!("out{seed}"));
        cli(&[
            "benchmark",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])?;
        let (header, rows) = read_matrix(&out.join("matrix.csv"))?;
        if header != expected_header {
            problems.push(format!("seed {seed}: header {header:?}"));
        }
        for (i, (exp, model)) in expected_models.iter().enumerate() {
            let row = rows
                .iter()
                .find(|r| r.len() == header.len() && r[0] == *exp && r[2] == *model);
            let Some(row) = row else {
                problems.push(format!("seed {seed}: missing {exp} {model}"));
                continue;
            };
            if row[3] != "OK" {
                problems.push(format!("seed {seed}: {exp} {model} {}", row[3]));
                continue;
            }
            let h1: f64 = row[4]
                .parse()
                .map_err(|_| format!("bad number {}", row[4]))?;
            let h3: f64 = row[12]
                .parse()
                .map_err(|_| format!("bad number {}", row[12]))?;
            if h1 <= h3 {
                monotone[i] += 1;
            }
        }
        if rows.len() != expected_models.len() {
            problems.push(format!("seed {seed}: {} rows", rows.len()));
        }
        let plots = fs::read_dir(&out)
            .map_err(|e| e.to_string())?
            .filter(|e| {
                e.as_ref()
                    .is_ok_and(|e| e.file_name().to_string_lossy().starts_with("plot_"))
            })
            .count();
        if plots != 9 {
            problems.push(format!("seed {seed}: {plots} plot files"));
        }
    }
    let weakest = expected_models
        .iter()
        .zip(&monotone)
        .min_by_key(|(_, c)| **c)
        .map(|((e, m), c)| format!("{e} {m} {c}/5"))
        .unwrap_or_default();
    let all_monotone = monotone.iter().all(|&c| c >= 4);
    ensure(
        problems.is_empty() && all_monotone,
        format!(
            "11 model rows x 3 horizons x 4 metrics per seed; h1 <= h3 counts {monotone:?} (weakest {weakest}); problems {problems:?}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "SSA exact reconstruction",
            ssa_exact_reconstruction,
            Duration::from_secs(10),
        ),
        (
            "VMD two-tone separation",
            vmd_two_tones,
            Duration::from_secs(5),
        ),
        ("gradient verification", gradients, Duration::from_secs(60)),
        ("PSR sanity", psr_sanity, Duration::from_secs(30)),
        ("metric oracle equivalence", metric_oracles, Duration::MAX),
        (
            "superposition exactness",
            superposition_and_determinism,
            Duration::MAX,
        ),
        (
            "hybrid improves preliminary",
            hybrid_improves,
            Duration::from_secs(600),
        ),
        ("ablation structure", benchmark_structure, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took longer than {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {}: {status} {name} [{:.1}s] {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
