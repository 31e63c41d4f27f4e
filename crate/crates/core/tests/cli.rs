use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hybrid-forecast"));
    cmd.env_remove("HYBRID_FORECAST_SEED")
        .env_remove("HYBRID_FORECAST_JOBS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_series(path: &Path, values: &[f64]) {
    let mut text = String::from("timestamp,speed_ms\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v:?}\n"));
    }
    fs::write(path, text).unwrap();
}

/// 3251 values with mean 8.3631, sample std 3.5523, max 19.9028 and
/// min 0.3115: the extremes are placed once, the interior is a scaled
/// and shifted bounded sample solved for the remaining two moments.
fn site1_values() -> Vec<f64> {
    let (n, mean, std, max, min) = (3251usize, 8.3631, 3.5523, 19.9028, 0.3115);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = n - 2;
    let mut z: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let zm = z.iter().sum::<f64>() / m as f64;
    z.iter_mut().for_each(|v| *v -= zm);
    let shift = (n as f64 * mean - min - max) / m as f64;
    let target_ss = (n - 1) as f64 * std * std
        - (min - mean).powi(2)
        - (max - mean).powi(2)
        - m as f64 * (shift - mean).powi(2);
    let scale = (target_ss / z.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let mut values = vec![max];
    values.extend(z.iter().map(|v| shift + scale * v));
    values.push(min);
    assert!(values[1..n - 1].iter().all(|&v| v > min && v < max));
    values
}

#[test]
fn ingest_reports_site1_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("site1.csv");
    write_series(&path, &site1_values());
    let out = run(&["ingest", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for line in [
        "count 3251",
        "mean 8.3631",
        "std 3.5523",
        "max 19.9028",
        "min 0.3115",
    ] {
        assert!(
            text.lines().any(|l| l == line),
            "missing `{line}` in\n{text}"
        );
    }
}

#[test]
fn ingest_names_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let mut text = String::from("timestamp,speed_ms\n");
    for i in 1..=10 {
        let v = if i == 7 {
            "abc".to_string()
        } else {
            format!("{i}.5")
        };
        text.push_str(&format!("{i},{v}\n"));
    }
    fs::write(&path, text).unwrap();
    let out = run(&["ingest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 7"), "{}", stderr(&out));
}

#[test]
fn ingest_rejects_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    fs::write(&path, "").unwrap();
    let out = run(&["ingest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no observations"), "{}", stderr(&out));
}

fn synth(dir: &Path, len: usize) -> String {
    let path = dir.join("s.csv");
    let len = len.to_string();
    let out = run(&[
        "synth",
        "--out",
        path.to_str().unwrap(),
        "--len",
        &len,
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    path.to_str().unwrap().to_string()
}

fn header(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .next()
        .unwrap()
        .split(',')
        .map(String::from)
        .collect()
}

#[test]
fn decompose_ssa_and_vmd_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 300);
    let ssa = dir.path().join("ssa.csv");
    let out = run(&[
        "decompose",
        &data,
        "--method",
        "ssa",
        "--window",
        "20",
        "--keep",
        "10",
        "--out",
        ssa.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let cols = header(&ssa);
    assert_eq!(cols.len(), 1 + 20 + 1);
    assert_eq!(cols.last().unwrap(), "reconstruction");

    let vmd = dir.path().join("vmd.csv");
    let out = run(&[
        "decompose",
        &data,
        "--method",
        "vmd",
        "--modes",
        "10",
        "--out",
        vmd.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let cols = header(&vmd);
    assert_eq!(cols.len(), 1 + 10 + 1);
    assert_eq!(cols.last().unwrap(), "residual");
}

#[test]
fn decompose_without_method_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), 100);
    let out = run(&["decompose", &data]);
    assert_eq!(out.status.code(), Some(1));
}

const SMALL: &str = r#"
[data]
test_len = 60
synth_len = 460
[ssa]
window_len = 10
keep = 4
[psr]
dimension = 6
[vmd]
modes = 3
max_iter = 60
[predictor]
model = "gru"
hidden = 4
[corrector]
hidden = 4
dimension = 5
[train]
epochs = 3
batch_size = 32
[experiment]
history = 64
residual_history = 40
"#;

fn config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, format!("{SMALL}{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn forecast_writes_one_csv_per_horizon_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = run(&[
            "forecast",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in [
        "forecast_h1.csv",
        "forecast_h2.csv",
        "forecast_h3.csv",
        "reports.csv",
        "manifest.json",
    ] {
        let x = fs::read(a.join(name)).unwrap();
        let y = fs::read(b.join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
    assert!(!a.join("forecast_h4.csv").exists());
    assert_eq!(
        header(&a.join("forecast_h1.csv")),
        ["index", "actual", "preliminary", "correction", "final"]
    );
    let manifest = fs::read_to_string(a.join("manifest.json")).unwrap();
    assert!(
        manifest.contains("\"multi_step\": \"recursive\"")
            || manifest.contains("\"multi_step\":\"recursive\"")
    );
}

#[test]
fn seed_override_changes_forecast() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(
        run(&["forecast", "--config", &cfg, "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    let out = bin()
        .args(["forecast", "--config", &cfg, "--out", b.to_str().unwrap()])
        .env("HYBRID_FORECAST_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_ne!(
        fs::read(a.join("reports.csv")).unwrap(),
        fs::read(b.join("reports.csv")).unwrap()
    );
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("epochs = 3", "epchs = 3\nbatch_sise = 4");
    fs::write(&cfg, text).unwrap();
    let out = run(&[
        "forecast",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("epchs") && err.contains("batch_sise"), "{err}");
}

#[test]
fn help_lists_keys_with_defaults() {
    let out = run(&["forecast", "--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for key in [
        "window_len",
        "residual_history",
        "modes",
        "epochs",
        "horizons",
        "published preset",
    ] {
        assert!(text.contains(key), "help lacks {key}");
    }
}

#[test]
fn benchmark_has_one_row_per_predictor_and_survives_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "horizons = [1]\npredictors = [\"gru\", \"atgru\"]\ndecomposers = [\"none\"]\ncorrectors = [\"mlp\"]\n",
    );
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("dimension = 5", "dimension = 5\nmlp_hidden = []");
    fs::write(&cfg, text).unwrap();
    let out_dir = dir.path().join("bench");
    let out = run(&[
        "benchmark",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("1 cells failed"), "{}", stderr(&out));

    let matrix = fs::read_to_string(out_dir.join("matrix.csv")).unwrap();
    let predictor_rows = matrix.lines().filter(|l| l.starts_with("I-II,")).count();
    assert_eq!(predictor_rows, 2);
    assert!(matrix
        .lines()
        .any(|l| l.contains("None") && l.starts_with("III-IV,")));
    assert!(matrix
        .lines()
        .any(|l| l.starts_with("V,") && l.contains("FAILED")));

    let plot = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| {
            p.file_name()
                .unwrap()
                .to_str()
                .unwrap()
                .starts_with("plot_synth")
                && p.to_str().unwrap().contains("expI-II")
        })
        .expect("predictor plot file");
    let cols = header(&plot);
    assert_eq!(cols[1], "actual");
    assert_eq!(cols.len(), 4);
}

#[test]
fn gradcheck_passes() {
    let out = run(&["gradcheck", "--seeds", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).matches(" ok").count(), 4);
}
