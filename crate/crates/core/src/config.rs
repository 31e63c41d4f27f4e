//! TOML run configuration.
//!
//! Every accepted key is listed in [`SCHEMA`]; anything else is rejected,
//! and all problems in a file are reported together. Absent keys take the
//! defaults shown by `hybrid-forecast forecast --help`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::neural::{ModelKind, Optimizer};
use crate::pipeline::{ErrorDecomposer, PipelineConfig, SuiteConfig};
use crate::psr::EmbeddingSpec;
use crate::ssa::SsaConfig;
use crate::synth::SynthConfig;
use crate::vmd::{OmegaInit, VmdConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Bool,
    Str,
    IntList,
    StrList,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Int => "an integer",
            Kind::Float => "a number",
            Kind::Bool => "a boolean",
            Kind::Str => "a string",
            Kind::IntList => "a list of integers",
            Kind::StrList => "a list of strings",
        }
    }

    fn accepts(self, v: &Value) -> bool {
        match (self, v) {
            (Kind::Int, Value::Integer(i)) => *i >= 0,
            (Kind::Float, Value::Float(_) | Value::Integer(_)) => true,
            (Kind::Bool, Value::Boolean(_)) => true,
            (Kind::Str, Value::String(_)) => true,
            (Kind::IntList, Value::Array(a)) => {
                a.iter().all(|x| matches!(x, Value::Integer(i) if *i >= 0))
            }
            (Kind::StrList, Value::Array(a)) => a.iter().all(Value::is_str),
            _ => false,
        }
    }
}

pub struct KeySpec {
    pub section: &'static str,
    pub key: &'static str,
    pub kind: Kind,
    /// Default as it would be written in the file; empty when unset.
    pub default: &'static str,
    pub source: &'static str,
    pub help: &'static str,
}

const fn key(
    section: &'static str,
    key: &'static str,
    kind: Kind,
    default: &'static str,
    source: &'static str,
    help: &'static str,
) -> KeySpec {
    KeySpec {
        section,
        key,
        kind,
        default,
        source,
        help,
    }
}

const PRESET: &str = "published preset";

pub const SCHEMA: &[KeySpec] = &[
    key(
        "data",
        "path",
        Kind::Str,
        "",
        "",
        "timestamp,speed_ms CSV; a synthetic series is generated when absent",
    ),
    key(
        "data",
        "name",
        Kind::Str,
        "",
        "",
        "dataset label; defaults to the file stem or `synthetic`",
    ),
    key(
        "data",
        "test_len",
        Kind::Int,
        "400",
        "published split",
        "trailing samples held out for testing",
    ),
    key(
        "data",
        "synth_len",
        Kind::Int,
        "2400",
        "",
        "synthetic series length",
    ),
    key(
        "data",
        "synth_seed",
        Kind::Int,
        "0",
        "",
        "synthetic series seed",
    ),
    key(
        "data",
        "synth_trend",
        Kind::Float,
        "0.0",
        "",
        "synthetic linear trend per sample",
    ),
    key(
        "ssa",
        "window_len",
        Kind::Int,
        "20",
        PRESET,
        "SSA embedding dimension L",
    ),
    key(
        "ssa",
        "keep",
        Kind::Int,
        "10",
        PRESET,
        "SSA reconstruction dimension p",
    ),
    key(
        "psr",
        "dimension",
        Kind::Int,
        "60",
        PRESET,
        "predictor window length d",
    ),
    key(
        "psr",
        "delay",
        Kind::Int,
        "1",
        PRESET,
        "predictor window delay tau",
    ),
    key("vmd", "modes", Kind::Int, "10", PRESET, "number of modes K"),
    key(
        "vmd",
        "alpha",
        Kind::Float,
        "5000.0",
        PRESET,
        "bandwidth constraint",
    ),
    key(
        "vmd",
        "tau",
        Kind::Float,
        "0.0",
        PRESET,
        "dual ascent step (noise tolerance)",
    ),
    key(
        "vmd",
        "dc",
        Kind::Bool,
        "false",
        PRESET,
        "pin the first mode at zero frequency",
    ),
    key(
        "vmd",
        "init",
        Kind::Str,
        "\"zeros\"",
        PRESET,
        "center frequency init: zeros, uniform or random",
    ),
    key(
        "vmd",
        "tol",
        Kind::Float,
        "1e-7",
        PRESET,
        "convergence tolerance",
    ),
    key("vmd", "max_iter", Kind::Int, "500", PRESET, "iteration cap"),
    key(
        "predictor",
        "model",
        Kind::Str,
        "\"atgru\"",
        "",
        "mlp, rnn, gru or atgru",
    ),
    key(
        "predictor",
        "hidden",
        Kind::Int,
        "64",
        PRESET,
        "recurrent hidden width",
    ),
    key(
        "predictor",
        "mlp_hidden",
        Kind::IntList,
        "[40, 20]",
        PRESET,
        "MLP hidden layers between the window and the output",
    ),
    key(
        "corrector",
        "model",
        Kind::Str,
        "\"gru\"",
        "",
        "mlp, rnn, gru or atgru",
    ),
    key(
        "corrector",
        "hidden",
        Kind::Int,
        "64",
        PRESET,
        "recurrent hidden width",
    ),
    key(
        "corrector",
        "mlp_hidden",
        Kind::IntList,
        "[40, 20]",
        PRESET,
        "MLP hidden layers",
    ),
    key(
        "corrector",
        "dimension",
        Kind::Int,
        "20",
        "",
        "corrector window length",
    ),
    key(
        "corrector",
        "delay",
        Kind::Int,
        "1",
        "",
        "corrector window delay",
    ),
    key(
        "corrector",
        "decomposer",
        Kind::Str,
        "\"vmd\"",
        "",
        "error decomposer: vmd, ssa or none",
    ),
    key(
        "train",
        "epochs",
        Kind::Int,
        "150",
        PRESET,
        "epochs for every network",
    ),
    key(
        "train",
        "batch_size",
        Kind::Int,
        "64",
        PRESET,
        "minibatch size",
    ),
    key(
        "train",
        "learning_rate",
        Kind::Float,
        "0.001",
        "",
        "optimizer step size",
    ),
    key(
        "train",
        "optimizer",
        Kind::Str,
        "\"adam\"",
        "",
        "adam or sgd",
    ),
    key(
        "experiment",
        "horizons",
        Kind::IntList,
        "[1, 2, 3]",
        "published horizons",
        "forecast horizons in steps",
    ),
    key(
        "experiment",
        "seed",
        Kind::Int,
        "42",
        "",
        "run seed; component seeds derive from it",
    ),
    key(
        "experiment",
        "residual_fraction",
        Kind::Float,
        "0.25",
        "",
        "trailing share of train used for residuals",
    ),
    key(
        "experiment",
        "history",
        Kind::Int,
        "256",
        "",
        "raw values denoised at each forecast origin",
    ),
    key(
        "experiment",
        "residual_history",
        Kind::Int,
        "256",
        "",
        "residuals decomposed at each forecast origin",
    ),
    key(
        "experiment",
        "predictors",
        Kind::StrList,
        "[\"mlp\", \"rnn\", \"gru\", \"atgru\"]",
        "Experiments I-II",
        "benchmark predictor arms",
    ),
    key(
        "experiment",
        "decomposers",
        Kind::StrList,
        "[\"vmd\", \"ssa\", \"none\"]",
        "Experiments III-IV",
        "benchmark error decomposer arms",
    ),
    key(
        "experiment",
        "correctors",
        Kind::StrList,
        "[\"mlp\", \"rnn\", \"atgru\", \"gru\"]",
        "Experiment V",
        "benchmark corrector arms",
    ),
];

/// `--help` text listing every key, its default and provenance.
pub fn schema_help() -> String {
    let mut out = String::from("Configuration keys (section.key = default):\n");
    let mut section = "";
    for k in SCHEMA {
        if k.section != section {
            section = k.section;
            out.push_str(&format!("\n  [{section}]\n"));
        }
        let default = if k.default.is_empty() {
            "(unset)"
        } else {
            k.default
        };
        let source = if k.source.is_empty() {
            String::new()
        } else {
            format!(" [{}]", k.source)
        };
        out.push_str(&format!(
            "    {:<18} = {:<34} {}{}\n",
            k.key, default, k.help, source
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataConfig {
    pub path: Option<PathBuf>,
    pub name: Option<String>,
    pub test_len: usize,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub data: DataConfig,
    pub pipeline: PipelineConfig,
    pub suite_predictors: Vec<ModelKind>,
    pub suite_decomposers: Vec<ErrorDecomposer>,
    pub suite_correctors: Vec<ModelKind>,
}

impl RunConfig {
    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            base: self.pipeline.clone(),
            predictors: self.suite_predictors.clone(),
            decomposers: self.suite_decomposers.clone(),
            correctors: self.suite_correctors.clone(),
        }
    }
}

struct Reader<'a> {
    doc: &'a Table,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.doc.get(section)?.as_table()?.get(key)
    }

    fn int(&self, section: &str, key: &str, default: usize) -> usize {
        match self.get(section, key) {
            Some(Value::Integer(i)) => *i as usize,
            _ => default,
        }
    }

    fn float(&self, section: &str, key: &str, default: f64) -> f64 {
        match self.get(section, key) {
            Some(Value::Float(f)) => *f,
            Some(Value::Integer(i)) => *i as f64,
            _ => default,
        }
    }

    fn boolean(&self, section: &str, key: &str, default: bool) -> bool {
        self.get(section, key)
            .and_then(Value::as_bool)
            .unwrap_or(default)
    }

    fn string(&self, section: &str, key: &str) -> Option<String> {
        self.get(section, key)
            .and_then(Value::as_str)
            .map(str::to_string)
    }

    fn ints(&self, section: &str, key: &str, default: Vec<usize>) -> Vec<usize> {
        match self.get(section, key) {
            Some(Value::Array(a)) => a
                .iter()
                .filter_map(Value::as_integer)
                .map(|i| i as usize)
                .collect(),
            _ => default,
        }
    }

    fn strings(&self, section: &str, key: &str) -> Option<Vec<String>> {
        match self.get(section, key) {
            Some(Value::Array(a)) => Some(
                a.iter()
                    .filter_map(Value::as_str)
                    .map(str::to_string)
                    .collect(),
            ),
            _ => None,
        }
    }

    fn model(&mut self, section: &str, default: ModelKind) -> ModelKind {
        match self.string(section, "model") {
            Some(s) => self
                .model_name(&format!("{section}.model"), &s)
                .unwrap_or(default),
            None => default,
        }
    }

    fn model_name(&mut self, at: &str, s: &str) -> Option<ModelKind> {
        let parsed = ModelKind::parse(s);
        if parsed.is_none() {
            self.errors.push(format!(
                "`{at}`: unknown model `{s}` (expected mlp, rnn, gru or atgru)"
            ));
        }
        parsed
    }

    fn decomposer(
        &mut self,
        at: &str,
        s: &str,
        vmd: VmdConfig,
        ssa: SsaConfig,
    ) -> Option<ErrorDecomposer> {
        match s.to_ascii_lowercase().as_str() {
            "vmd" => Some(ErrorDecomposer::Vmd(vmd)),
            "ssa" => Some(ErrorDecomposer::Ssa(ssa)),
            "none" => Some(ErrorDecomposer::None),
            _ => {
                self.errors.push(format!(
                    "`{at}`: unknown decomposer `{s}` (expected vmd, ssa or none)"
                ));
                None
            }
        }
    }
}

fn check_keys(doc: &Table) -> Vec<String> {
    let mut errors = Vec::new();
    for (section, value) in doc {
        let Some(table) = value.as_table() else {
            if SCHEMA.iter().any(|k| k.section == section) {
                errors.push(format!("`{section}` must be a [section]"));
            } else {
                errors.push(format!("unknown key `{section}`"));
            }
            continue;
        };
        if !SCHEMA.iter().any(|k| k.section == section) {
            errors.push(format!("unknown section `[{section}]`"));
            continue;
        }
        for (key, v) in table {
            match SCHEMA.iter().find(|k| k.section == section && k.key == key) {
                None => errors.push(format!("unknown key `{section}.{key}`")),
                Some(spec) if !spec.kind.accepts(v) => {
                    errors.push(format!("`{section}.{key}` must be {}", spec.kind.name()))
                }
                Some(_) => {}
            }
        }
    }
    errors
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![e.to_string().trim().to_string()]))?;
    let errors = check_keys(&doc);
    let mut r = Reader { doc: &doc, errors };
    let d = PipelineConfig::default();

    let ssa = SsaConfig::new(
        r.int("ssa", "window_len", d.ssa.window_len),
        r.int("ssa", "keep", d.ssa.keep_components),
    );
    let vd = VmdConfig::default();
    let init = match r.string("vmd", "init").as_deref() {
        None | Some("zeros") | Some("0") => OmegaInit::Zeros,
        Some("uniform") => OmegaInit::Uniform,
        Some("random") => OmegaInit::Random,
        Some(other) => {
            r.errors.push(format!(
                "`vmd.init`: unknown value `{other}` (expected zeros, uniform or random)"
            ));
            OmegaInit::Zeros
        }
    };
    let vmd = VmdConfig {
        modes: r.int("vmd", "modes", vd.modes),
        alpha: r.float("vmd", "alpha", vd.alpha),
        tau: r.float("vmd", "tau", vd.tau),
        dc: r.boolean("vmd", "dc", vd.dc),
        init,
        tol: r.float("vmd", "tol", vd.tol),
        max_iter: r.int("vmd", "max_iter", vd.max_iter),
        seed: vd.seed,
    };

    let mut train = d.predictor.train;
    train.epochs = r.int("train", "epochs", train.epochs);
    train.batch_size = r.int("train", "batch_size", train.batch_size);
    train.learning_rate = r.float("train", "learning_rate", train.learning_rate);
    train.optimizer = match r.string("train", "optimizer").as_deref() {
        None | Some("adam") => Optimizer::Adam,
        Some("sgd") => Optimizer::Sgd,
        Some(other) => {
            r.errors.push(format!(
                "`train.optimizer`: unknown value `{other}` (expected adam or sgd)"
            ));
            Optimizer::Adam
        }
    };

    let mut predictor = d.predictor.clone();
    predictor.kind = r.model("predictor", predictor.kind);
    predictor.hidden = r.int("predictor", "hidden", predictor.hidden);
    predictor.mlp_hidden = r.ints("predictor", "mlp_hidden", predictor.mlp_hidden);
    predictor.train = train;
    let mut corrector = d.corrector.clone();
    corrector.kind = r.model("corrector", corrector.kind);
    corrector.hidden = r.int("corrector", "hidden", corrector.hidden);
    corrector.mlp_hidden = r.ints("corrector", "mlp_hidden", corrector.mlp_hidden);
    corrector.train = train;

    let error_decomposer = match r.string("corrector", "decomposer") {
        Some(s) => r
            .decomposer("corrector.decomposer", &s, vmd, ssa)
            .unwrap_or(ErrorDecomposer::Vmd(vmd)),
        None => ErrorDecomposer::Vmd(vmd),
    };

    let pipeline = PipelineConfig {
        ssa,
        embedding: EmbeddingSpec::new(
            r.int("psr", "dimension", d.embedding.dimension),
            r.int("psr", "delay", d.embedding.delay),
        ),
        predictor,
        error_decomposer,
        corrector,
        corrector_embedding: EmbeddingSpec::new(
            r.int("corrector", "dimension", d.corrector_embedding.dimension),
            r.int("corrector", "delay", d.corrector_embedding.delay),
        ),
        horizons: r.ints("experiment", "horizons", d.horizons.clone()),
        seed: r.int("experiment", "seed", d.seed as usize) as u64,
        residual_fraction: r.float("experiment", "residual_fraction", d.residual_fraction),
        history: r.int("experiment", "history", d.history),
        residual_history: r.int("experiment", "residual_history", d.residual_history),
    };

    let defaults = SuiteConfig::new(pipeline.clone());
    let suite_predictors = match r.strings("experiment", "predictors") {
        Some(list) => list
            .iter()
            .filter_map(|s| r.model_name("experiment.predictors", s))
            .collect(),
        None => defaults.predictors.clone(),
    };
    let suite_correctors = match r.strings("experiment", "correctors") {
        Some(list) => list
            .iter()
            .filter_map(|s| r.model_name("experiment.correctors", s))
            .collect(),
        None => defaults.correctors.clone(),
    };
    let suite_decomposers = match r.strings("experiment", "decomposers") {
        Some(list) => list
            .iter()
            .filter_map(|s| r.decomposer("experiment.decomposers", s, vmd, ssa))
            .collect(),
        None => defaults.decomposers.clone(),
    };

    let sd = SynthConfig::default();
    let data = DataConfig {
        path: r.string("data", "path").map(PathBuf::from),
        name: r.string("data", "name"),
        test_len: r.int("data", "test_len", 400),
        synth: SynthConfig {
            len: r.int("data", "synth_len", sd.len),
            seed: r.int("data", "synth_seed", sd.seed as usize) as u64,
            trend: r.float("data", "synth_trend", sd.trend),
            ..sd
        },
    };

    let mut errors = r.errors;
    if let Err(e) = pipeline.validate() {
        errors.push(e.to_string());
    }
    if let Err(e) = vmd.validate() {
        errors.push(e.to_string());
    }
    if errors.is_empty() {
        Ok(RunConfig {
            data,
            pipeline,
            suite_predictors,
            suite_decomposers,
            suite_correctors,
        })
    } else {
        Err(Error::Config(errors))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text)
}
