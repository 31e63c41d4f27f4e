//! The hybrid forecaster and its experiment suite.
//!
//! 1. The training series is SSA-denoised and windowed; a predictor
//!    (AtGRU by default) learns one-step forecasts on normalized values.
//! 2. Forecasts are produced causally: at every origin the trailing raw
//!    history is denoised, then the model recurses `h` steps.
//! 3. Residuals `actual - preliminary` on the trailing slice of the
//!    training set are decomposed into modes and one corrector per mode
//!    learns to forecast its mode.
//! 4. The final forecast is the preliminary forecast plus the summed mode
//!    forecasts.

mod suite;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use suite::{run_experiment_suite, Dataset, PlotData, SuiteConfig, SuiteResult, SuiteRow};

use crate::error::{Error, Result};
use crate::metrics::EvaluationReport;
use crate::neural::{train, ModelKind, ModelSpec, NetworkParams, TrainConfig};
use crate::psr::EmbeddingSpec;
use crate::series::{make_windows, Normalizer, Series, WindowSet};
use crate::ssa::{ssa_decompose, ssa_denoise, SsaConfig};
use crate::vmd::{vmd_decompose, VmdConfig};

/// Smallest number of training windows the predictor is fit on.
pub const MIN_TRAIN_WINDOWS: usize = 50;

/// A model kind together with its sizes and training budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageConfig {
    pub kind: ModelKind,
    /// Width of the recurrent state.
    pub hidden: usize,
    /// Hidden layer widths when `kind` is the MLP.
    pub mlp_hidden: Vec<usize>,
    pub train: TrainConfig,
}

impl StageConfig {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            hidden: 64,
            mlp_hidden: vec![40, 20],
            train: TrainConfig::default(),
        }
    }

    pub fn with_kind(&self, kind: ModelKind) -> Self {
        Self {
            kind,
            ..self.clone()
        }
    }

    pub fn model_spec(&self, input_dim: usize, seed: u64) -> ModelSpec {
        let hidden = match self.kind {
            ModelKind::Mlp => self.mlp_hidden.clone(),
            _ => vec![self.hidden],
        };
        ModelSpec::new(self.kind, input_dim, hidden, seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ErrorDecomposer {
    /// The VMD reconstruction residual is added to the highest-frequency
    /// mode, so the modes sum to the input exactly.
    Vmd(VmdConfig),
    /// Each of the first `keep_components` components is a mode; the rest
    /// are summed into one more mode.
    Ssa(SsaConfig),
    None,
}

impl ErrorDecomposer {
    pub fn label(&self) -> &'static str {
        match self {
            ErrorDecomposer::Vmd(_) => "VMD",
            ErrorDecomposer::Ssa(_) => "SSA",
            ErrorDecomposer::None => "None",
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            ErrorDecomposer::Vmd(c) => c.modes,
            ErrorDecomposer::Ssa(c) => c.keep_components + 1,
            ErrorDecomposer::None => 1,
        }
    }

    pub fn decompose(&self, values: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            ErrorDecomposer::Vmd(config) => {
                let decomp = vmd_decompose(values, config)?;
                let mut modes = decomp.modes;
                if let Some(finest) = modes.last_mut() {
                    for (m, r) in finest.iter_mut().zip(&decomp.residual) {
                        *m += r;
                    }
                }
                Ok(modes)
            }
            ErrorDecomposer::Ssa(config) => {
                let decomp = ssa_decompose(values, *config)?;
                let p = config.keep_components;
                let mut modes: Vec<Vec<f64>> = decomp.components[..p].to_vec();
                let mut rest = vec![0.0; values.len()];
                for comp in &decomp.components[p..] {
                    for (r, c) in rest.iter_mut().zip(comp) {
                        *r += c;
                    }
                }
                modes.push(rest);
                Ok(modes)
            }
            ErrorDecomposer::None => Ok(vec![values.to_vec()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ssa: SsaConfig,
    pub embedding: EmbeddingSpec,
    pub predictor: StageConfig,
    pub error_decomposer: ErrorDecomposer,
    pub corrector: StageConfig,
    pub corrector_embedding: EmbeddingSpec,
    pub horizons: Vec<usize>,
    pub seed: u64,
    /// Trailing share of the training set whose residuals train the
    /// correctors.
    pub residual_fraction: f64,
    /// Raw values denoised at each forecast origin.
    pub history: usize,
    /// Residuals decomposed at each forecast origin.
    pub residual_history: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            ssa: SsaConfig::default(),
            embedding: EmbeddingSpec::default(),
            predictor: StageConfig::new(ModelKind::AtGru),
            error_decomposer: ErrorDecomposer::Vmd(VmdConfig::default()),
            corrector: StageConfig::new(ModelKind::Gru),
            corrector_embedding: EmbeddingSpec::new(20, 1),
            horizons: vec![1, 2, 3],
            seed: 42,
            residual_fraction: 0.25,
            history: 256,
            residual_history: 256,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::invalid(
                "horizons",
                "need at least one horizon, each at least 1",
            ));
        }
        if !(self.residual_fraction > 0.0 && self.residual_fraction < 1.0) {
            return Err(Error::invalid(
                "residual_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        self.embedding.validate()?;
        self.corrector_embedding.validate()?;
        self.predictor.train.validate()?;
        self.corrector.train.validate()?;
        let needed = self.embedding.span().max(self.ssa.window_len + 1);
        if self.history < needed {
            return Err(Error::invalid(
                "history",
                format!("must be at least {needed} to cover the embedding and SSA window"),
            ));
        }
        if self.residual_history < self.corrector_embedding.span() {
            return Err(Error::invalid(
                "residual_history",
                format!(
                    "must be at least the corrector window span {}",
                    self.corrector_embedding.span()
                ),
            ));
        }
        Ok(())
    }

    pub fn max_horizon(&self) -> usize {
        self.horizons.iter().copied().max().unwrap_or(1)
    }

    /// Length of the residual-fitting slice for a training set of `train_len`.
    pub fn fit_len(&self, train_len: usize) -> usize {
        ((train_len as f64) * self.residual_fraction).round() as usize
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-component seed from the run seed, a role name and an
/// index (horizon, mode, ...).
pub fn derive_seed(seed: u64, role: &str, index: u64) -> u64 {
    // FNV-1a over the role keeps distinct roles apart
    let role_hash = role.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    });
    splitmix64(splitmix64(splitmix64(seed) ^ role_hash) ^ index)
}

fn stage_seeds(seed: u64, role: &str, index: u64) -> (u64, u64) {
    let init = derive_seed(seed, role, index);
    (init, derive_seed(init, "shuffle", 0))
}

/// Every derived (role, init seed, shuffle seed) of a run, for manifests.
pub fn seed_plan(config: &PipelineConfig) -> Vec<(String, u64, u64)> {
    let (init, shuffle) = stage_seeds(config.seed, "predictor", 0);
    let mut plan = vec![("predictor".to_string(), init, shuffle)];
    for h in &config.horizons {
        let role = format!("corrector:h{h}");
        for m in 0..config.error_decomposer.mode_count() {
            let (init, shuffle) = stage_seeds(config.seed, &role, m as u64);
            plan.push((format!("{role}:mode{m}"), init, shuffle));
        }
    }
    plan
}

/// Min-max normalizer that widens a degenerate range by one unit on each
/// side, so constant and all-zero series stay trainable.
pub fn padded_normalizer(values: &[f64]) -> Result<Normalizer> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min > 1e-12 * max.abs().max(min.abs()).max(1.0) {
        Normalizer::new(min, max)
    } else {
        Normalizer::new(min - 1.0, max + 1.0)
    }
}

/// Feeds each prediction back as the newest input, `steps` times.
/// `buffer` holds normalized values; the result is normalized too.
pub fn recurse(
    params: &NetworkParams,
    embedding: EmbeddingSpec,
    buffer: &[f64],
    steps: usize,
) -> Result<Vec<f64>> {
    let span = embedding.span();
    if buffer.len() < span {
        return Err(Error::too_short("forecast history", span, buffer.len()));
    }
    let mut buf = buffer[buffer.len() - span..].to_vec();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let window = embedding.gather(&buf, buf.len() - span);
        let y = params.forward(&window)?;
        if !y.is_finite() {
            return Err(Error::non_finite("recursive forecast"));
        }
        buf.push(y);
        out.push(y);
    }
    Ok(out)
}

/// Trained predictor plus everything needed to forecast from any origin.
#[derive(Debug, Clone)]
pub struct Predictor {
    pub params: NetworkParams,
    pub normalizer: Normalizer,
    pub ssa: SsaConfig,
    pub embedding: EmbeddingSpec,
    pub history: usize,
    pub loss_curve: Vec<f64>,
}

impl Predictor {
    /// Forecasts `steps` values following `history`, using only its last
    /// `self.history` observations. Physical units.
    pub fn forecast_path(&self, history: &[f64], steps: usize) -> Result<Vec<f64>> {
        let start = history.len().saturating_sub(self.history);
        let denoised = ssa_denoise(&history[start..], self.ssa)?;
        let normalized = self.normalizer.transform_all(&denoised);
        let path = recurse(&self.params, self.embedding, &normalized, steps)?;
        Ok(self.normalizer.inverse_all(&path))
    }
}

/// Per-horizon residuals on the residual-fitting slice, in physical units.
#[derive(Debug, Clone)]
pub struct ResidualSet {
    pub horizons: Vec<usize>,
    pub residuals: Vec<Series>,
}

/// Output of [`run_preliminary`]. Forecast vectors cover the targets from
/// `fit_start` (inside the training set) to the end of the test span.
#[derive(Debug, Clone)]
pub struct Preliminary {
    pub predictor: Predictor,
    pub horizons: Vec<usize>,
    pub train_len: usize,
    pub fit_start: usize,
    /// Concatenated train and test values.
    pub actual: Vec<f64>,
    /// `forecasts[k][i]` is the horizon `horizons[k]` forecast of
    /// `actual[fit_start + i]`.
    pub forecasts: Vec<Vec<f64>>,
    pub residuals: ResidualSet,
}

impl Preliminary {
    /// Test-span forecast for horizon index `k`.
    pub fn test_forecast(&self, k: usize) -> &[f64] {
        &self.forecasts[k][self.train_len - self.fit_start..]
    }

    pub fn test_actual(&self) -> &[f64] {
        &self.actual[self.train_len..]
    }

    /// Residuals from `fit_start` up to (excluding) absolute index `end`.
    fn residuals_before(&self, k: usize, end: usize) -> Vec<f64> {
        (self.fit_start..end)
            .map(|j| self.actual[j] - self.forecasts[k][j - self.fit_start])
            .collect()
    }
}

/// Trains the predictor on the denoised training series and forecasts
/// every horizon over the residual-fitting slice and the test span.
pub fn run_preliminary(
    train_series: &Series,
    test_series: &Series,
    config: &PipelineConfig,
) -> Result<Preliminary> {
    config.validate()?;
    let n_train = train_series.len();
    let max_h = config.max_horizon();
    let fit_len = config.fit_len(n_train);
    let span = config.embedding.span();
    let required = (span + MIN_TRAIN_WINDOWS).max(config.history + fit_len + max_h);
    if n_train < required {
        return Err(Error::too_short(train_series.name(), required, n_train));
    }
    if fit_len < config.residual_history + max_h {
        return Err(Error::invalid(
            "residual_fraction",
            format!("fitting slice of {fit_len} values is shorter than residual_history + horizon"),
        ));
    }
    let fit_start = n_train - fit_len;

    let normalizer = padded_normalizer(train_series.values())?;
    let denoised = ssa_denoise(train_series.values(), config.ssa)?;
    let windows = make_windows(&normalizer.transform_all(&denoised), config.embedding)?;
    let (init_seed, shuffle_seed) = stage_seeds(config.seed, "predictor", 0);
    let spec = config.predictor.model_spec(span, init_seed);
    let train_cfg = TrainConfig {
        seed: shuffle_seed,
        ..config.predictor.train
    };
    let outcome = train(spec, &windows, &train_cfg)?;
    let predictor = Predictor {
        params: outcome.params,
        normalizer,
        ssa: config.ssa,
        embedding: config.embedding,
        history: config.history,
        loss_curve: outcome.loss_curve,
    };

    let mut actual = train_series.values().to_vec();
    actual.extend_from_slice(test_series.values());
    let total = actual.len();

    // One path per origin; origin o forecasts actual[o..o + max_h].
    let first_origin = fit_start + 1 - max_h;
    let paths: Vec<Vec<f64>> = (first_origin..total)
        .into_par_iter()
        .map(|o| predictor.forecast_path(&actual[..o], max_h.min(total - o)))
        .collect::<Result<_>>()?;

    let forecasts: Vec<Vec<f64>> = config
        .horizons
        .iter()
        .map(|&h| {
            (fit_start..total)
                .map(|j| paths[j + 1 - h - first_origin][h - 1])
                .collect()
        })
        .collect();

    let residuals = config
        .horizons
        .iter()
        .zip(&forecasts)
        .map(|(h, f)| {
            let r: Vec<f64> = (fit_start..n_train)
                .map(|j| actual[j] - f[j - fit_start])
                .collect();
            Ok(Series::new(format!("residual:h{h}"), r)?.with_origin(fit_start))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Preliminary {
        predictor,
        horizons: config.horizons.clone(),
        train_len: n_train,
        fit_start,
        actual,
        forecasts,
        residuals: ResidualSet {
            horizons: config.horizons.clone(),
            residuals,
        },
    })
}

#[derive(Debug, Clone)]
pub struct ModeCorrector {
    pub params: NetworkParams,
    pub normalizer: Normalizer,
    pub loss_curve: Vec<f64>,
}

impl ModeCorrector {
    /// The mode's value `steps` ahead of `mode`, in physical units.
    pub fn forecast(&self, mode: &[f64], embedding: EmbeddingSpec, steps: usize) -> Result<f64> {
        let normalized = self.normalizer.transform_all(mode);
        let path = recurse(&self.params, embedding, &normalized, steps)?;
        Ok(self.normalizer.inverse(path[steps - 1]))
    }
}

#[derive(Debug, Clone)]
pub struct HorizonCorrector {
    pub horizon: usize,
    pub modes: Vec<ModeCorrector>,
}

#[derive(Debug, Clone)]
pub struct CorrectorSet {
    pub decomposer: ErrorDecomposer,
    pub embedding: EmbeddingSpec,
    pub residual_history: usize,
    pub horizons: Vec<HorizonCorrector>,
}

impl CorrectorSet {
    /// Summed mode forecasts `horizon` steps past the end of `residuals`.
    pub fn correction(&self, k: usize, residuals: &[f64]) -> Result<f64> {
        let hc = &self.horizons[k];
        let start = residuals.len().saturating_sub(self.residual_history);
        let modes = self.decomposer.decompose(&residuals[start..])?;
        if modes.len() != hc.modes.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} modes at forecast time, {} correctors",
                modes.len(),
                hc.modes.len()
            )));
        }
        let mut total = 0.0;
        for (mode, corrector) in modes.iter().zip(&hc.modes) {
            total += corrector.forecast(mode, self.embedding, hc.horizon)?;
        }
        Ok(total)
    }
}

/// Inputs and targets of one mode's corrector.
pub type ModeWindows = (Vec<Vec<f64>>, Vec<f64>);

/// Per-mode training windows drawn the way correctors are queried: the
/// residual window ending at `t` is decomposed, the last `d` values of each
/// mode form the input, and the target is that mode's newest value in the
/// decomposition of the window ending at `t + 1`.
pub fn mode_windows(
    residuals: &[f64],
    decomposer: &ErrorDecomposer,
    window: usize,
    embedding: EmbeddingSpec,
) -> Result<Vec<ModeWindows>> {
    let span = embedding.span();
    if window < span {
        return Err(Error::invalid(
            "residual_history",
            format!("must be at least {span}"),
        ));
    }
    if residuals.len() < window + 2 {
        return Err(Error::too_short(
            "residual series",
            window + 2,
            residuals.len(),
        ));
    }
    let decompositions: Vec<Vec<Vec<f64>>> = (window..=residuals.len())
        .into_par_iter()
        .map(|end| decomposer.decompose(&residuals[end - window..end]))
        .collect::<Result<_>>()?;
    let modes = decompositions[0].len();
    let mut out = vec![(Vec::new(), Vec::new()); modes];
    for pair in decompositions.windows(2) {
        let (now, next) = (&pair[0], &pair[1]);
        for (m, (inputs, targets)) in out.iter_mut().enumerate() {
            inputs.push(now[m][window - span..].to_vec());
            targets.push(next[m][window - 1]);
        }
    }
    Ok(out)
}

/// Decomposes each horizon's residuals and trains one corrector per mode.
pub fn train_corrector(residuals: &ResidualSet, config: &PipelineConfig) -> Result<CorrectorSet> {
    config.validate()?;
    let embedding = config.corrector_embedding;
    let per_horizon: Vec<Vec<ModeWindows>> = residuals
        .residuals
        .iter()
        .map(|r| {
            mode_windows(
                r.values(),
                &config.error_decomposer,
                config.residual_history,
                embedding,
            )
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = per_horizon
        .iter()
        .enumerate()
        .flat_map(|(k, modes)| (0..modes.len()).map(move |m| (k, m)))
        .collect();
    let trained: Vec<ModeCorrector> = jobs
        .par_iter()
        .map(|&(k, m)| {
            let (inputs, targets) = &per_horizon[k][m];
            let seen: Vec<f64> = inputs.iter().flatten().chain(targets).copied().collect();
            let normalizer = padded_normalizer(&seen)?;
            let windows = WindowSet {
                inputs: inputs.iter().map(|w| normalizer.transform_all(w)).collect(),
                targets: normalizer.transform_all(targets),
                spec: embedding,
            };
            let role = format!("corrector:h{}", residuals.horizons[k]);
            let (init_seed, shuffle_seed) = stage_seeds(config.seed, &role, m as u64);
            let spec = config.corrector.model_spec(embedding.span(), init_seed);
            let train_cfg = TrainConfig {
                seed: shuffle_seed,
                ..config.corrector.train
            };
            let outcome = train(spec, &windows, &train_cfg)?;
            Ok(ModeCorrector {
                params: outcome.params,
                normalizer,
                loss_curve: outcome.loss_curve,
            })
        })
        .collect::<Result<_>>()?;

    let mut trained = trained.into_iter();
    let horizons = per_horizon
        .iter()
        .zip(&residuals.horizons)
        .map(|(modes, &horizon)| HorizonCorrector {
            horizon,
            modes: trained.by_ref().take(modes.len()).collect(),
        })
        .collect();
    Ok(CorrectorSet {
        decomposer: config.error_decomposer,
        embedding,
        residual_history: config.residual_history,
        horizons,
    })
}

/// Test-span forecasts for one horizon. `final = preliminary + correction`
/// holds exactly in floating point.
#[derive(Debug, Clone)]
pub struct HybridForecast {
    pub horizon: usize,
    pub actual: Series,
    pub preliminary: Series,
    pub correction: Series,
    pub final_forecast: Series,
}

impl HybridForecast {
    fn assemble(
        horizon: usize,
        origin: usize,
        actual: &[f64],
        preliminary: &[f64],
        raw: &[f64],
    ) -> Result<Self> {
        let mut fin = Vec::with_capacity(raw.len());
        let mut correction = Vec::with_capacity(raw.len());
        for (&p, &c) in preliminary.iter().zip(raw) {
            let f = p + c;
            fin.push(f);
            // Re-deriving the correction from the rounded sum makes the
            // superposition exact.
            correction.push(f - p);
        }
        let named = |suffix: &str, v: Vec<f64>| {
            Ok::<_, Error>(Series::new(format!("{suffix}:h{horizon}"), v)?.with_origin(origin))
        };
        Ok(Self {
            horizon,
            actual: named("actual", actual.to_vec())?,
            preliminary: named("preliminary", preliminary.to_vec())?,
            correction: named("correction", correction)?,
            final_forecast: named("final", fin)?,
        })
    }

    /// `index,actual,preliminary,correction,final`, indices relative to
    /// the start of the source series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,actual,preliminary,correction,final\n");
        let origin = self.actual.origin_index();
        for i in 0..self.actual.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                origin + i,
                self.actual[i],
                self.preliminary[i],
                self.correction[i],
                self.final_forecast[i]
            ));
        }
        out
    }
}

/// Computes the corrections for every horizon over the test span.
pub fn apply_correctors(
    preliminary: &Preliminary,
    correctors: &CorrectorSet,
) -> Result<Vec<Vec<f64>>> {
    let total = preliminary.actual.len();
    preliminary
        .horizons
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            (preliminary.train_len..total)
                .into_par_iter()
                .map(|j| {
                    // residuals known at origin j + 1 - h
                    let known = preliminary.residuals_before(k, j + 1 - h);
                    correctors.correction(k, &known)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// Forecasts and reports for the hybrid model.
#[derive(Debug, Clone)]
pub struct HybridRun {
    pub model_name: String,
    pub forecasts: Vec<HybridForecast>,
    /// One report per horizon for the corrected forecast.
    pub reports: Vec<EvaluationReport>,
    pub preliminary_reports: Vec<EvaluationReport>,
}

pub fn model_name(
    predictor: ModelKind,
    decomposer: &ErrorDecomposer,
    corrector: ModelKind,
) -> String {
    format!(
        "SSA-{}-{}-{}",
        predictor.label(),
        decomposer.label(),
        corrector.label()
    )
}

/// Adds per-horizon corrections to the preliminary test forecasts.
pub fn combine(
    preliminary: &Preliminary,
    name: &str,
    corrections: &[Vec<f64>],
) -> Result<HybridRun> {
    let actual = preliminary.test_actual();
    let pre_name = format!("SSA-{}", preliminary.predictor.params.spec.kind.label());
    let mut forecasts = Vec::new();
    let mut reports = Vec::new();
    let mut preliminary_reports = Vec::new();
    for (k, &h) in preliminary.horizons.iter().enumerate() {
        let pre = preliminary.test_forecast(k);
        let hf = HybridForecast::assemble(h, preliminary.train_len, actual, pre, &corrections[k])?;
        reports.push(EvaluationReport::evaluate(
            name,
            h,
            actual,
            hf.final_forecast.values(),
        )?);
        preliminary_reports.push(EvaluationReport::evaluate(&pre_name, h, actual, pre)?);
        forecasts.push(hf);
    }
    Ok(HybridRun {
        model_name: name.to_string(),
        forecasts,
        reports,
        preliminary_reports,
    })
}

/// The full hybrid pipeline on one train/test split.
pub fn run_hybrid(
    train_series: &Series,
    test_series: &Series,
    config: &PipelineConfig,
) -> Result<HybridRun> {
    let preliminary = run_preliminary(train_series, test_series, config)?;
    let correctors = train_corrector(&preliminary.residuals, config)?;
    let corrections = apply_correctors(&preliminary, &correctors)?;
    let name = model_name(
        config.predictor.kind,
        &config.error_decomposer,
        config.corrector.kind,
    );
    combine(&preliminary, &name, &corrections)
}
