use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    apply_correctors, combine, model_name, run_preliminary, train_corrector, ErrorDecomposer,
    PipelineConfig, Preliminary,
};
use crate::error::{Error, Result};
use crate::metrics::EvaluationReport;
use crate::neural::ModelKind;
use crate::series::Series;
use crate::ssa::SsaConfig;
use crate::vmd::VmdConfig;

pub const EXPERIMENT_PREDICTORS: &str = "I-II";
pub const EXPERIMENT_DECOMPOSERS: &str = "III-IV";
pub const EXPERIMENT_CORRECTORS: &str = "V";

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub train: Series,
    pub test: Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub base: PipelineConfig,
    /// Preliminary predictors compared in experiments I-II.
    pub predictors: Vec<ModelKind>,
    /// Error decomposers compared in experiments III-IV, each with the
    /// base corrector.
    pub decomposers: Vec<ErrorDecomposer>,
    /// Corrector models compared in experiment V, each behind VMD.
    pub correctors: Vec<ModelKind>,
}

impl SuiteConfig {
    pub fn new(base: PipelineConfig) -> Self {
        let vmd = match base.error_decomposer {
            ErrorDecomposer::Vmd(c) => c,
            _ => VmdConfig::default(),
        };
        Self {
            predictors: vec![
                ModelKind::Mlp,
                ModelKind::Rnn,
                ModelKind::Gru,
                ModelKind::AtGru,
            ],
            decomposers: vec![
                ErrorDecomposer::Vmd(vmd),
                ErrorDecomposer::Ssa(SsaConfig::default()),
                ErrorDecomposer::None,
            ],
            correctors: vec![
                ModelKind::Mlp,
                ModelKind::Rnn,
                ModelKind::AtGru,
                ModelKind::Gru,
            ],
            base,
        }
    }

    fn vmd(&self) -> ErrorDecomposer {
        self.decomposers
            .iter()
            .find(|d| matches!(d, ErrorDecomposer::Vmd(_)))
            .copied()
            .unwrap_or(match self.base.error_decomposer {
                d @ ErrorDecomposer::Vmd(_) => d,
                _ => ErrorDecomposer::Vmd(VmdConfig::default()),
            })
    }
}

/// One (experiment, dataset, model, horizon) cell. `report` is `None` when
/// the cell failed, with the reason in `error`.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub experiment: String,
    pub dataset: String,
    pub model: String,
    pub horizon: usize,
    pub report: Option<EvaluationReport>,
    pub error: Option<String>,
}

impl SuiteRow {
    pub fn status(&self) -> &'static str {
        if self.report.is_some() {
            "OK"
        } else {
            "FAILED"
        }
    }
}

/// Actual test values next to each model's forecast for one figure.
#[derive(Debug, Clone)]
pub struct PlotData {
    pub experiment: String,
    pub dataset: String,
    pub horizon: usize,
    pub origin: usize,
    pub actual: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl PlotData {
    /// `index,actual,<model>...`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,actual");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for i in 0..self.actual.len() {
            out.push_str(&format!("{},{}", self.origin + i, self.actual[i]));
            for (_, values) in &self.columns {
                out.push_str(&format!(",{}", values[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn file_stem(&self) -> String {
        format!(
            "plot_{}_exp{}_h{}",
            self.dataset, self.experiment, self.horizon
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub horizons: Vec<usize>,
    pub rows: Vec<SuiteRow>,
    pub plots: Vec<PlotData>,
}

impl SuiteResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.report.is_none()).count()
    }

    pub fn report(
        &self,
        experiment: &str,
        model: &str,
        horizon: usize,
    ) -> Option<&EvaluationReport> {
        self.rows
            .iter()
            .find(|r| r.experiment == experiment && r.model == model && r.horizon == horizon)
            .and_then(|r| r.report.as_ref())
    }

    /// One row per (experiment, dataset, model); four metrics per horizon.
    pub fn matrix_csv(&self) -> String {
        let mut out = String::from("experiment,dataset,model,status");
        for h in &self.horizons {
            for m in ["rmse", "mae", "mape", "r2"] {
                out.push_str(&format!(",h{h}_{m}"));
            }
        }
        out.push('\n');
        let mut groups: Vec<(&str, &str, &str)> = Vec::new();
        for r in &self.rows {
            let key = (r.experiment.as_str(), r.dataset.as_str(), r.model.as_str());
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        for (exp, ds, model) in groups {
            let cells: Vec<&SuiteRow> = self
                .rows
                .iter()
                .filter(|r| r.experiment == exp && r.dataset == ds && r.model == model)
                .collect();
            let failed = cells.iter().any(|r| r.report.is_none());
            out.push_str(&format!(
                "{exp},{ds},{model},{}",
                if failed { "FAILED" } else { "OK" }
            ));
            for h in &self.horizons {
                match cells
                    .iter()
                    .find(|r| r.horizon == *h)
                    .and_then(|r| r.report.as_ref())
                {
                    Some(rep) => out.push_str(&format!(
                        ",{},{},{},{}",
                        rep.rmse, rep.mae, rep.mape, rep.r2
                    )),
                    None => out.push_str(",,,,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// One row per cell.
    pub fn long_csv(&self) -> String {
        let mut out =
            String::from("experiment,dataset,model,horizon,status,rmse,mae,mape,r2,error\n");
        for r in &self.rows {
            let metrics = match &r.report {
                Some(rep) => format!("{},{},{},{}", rep.rmse, rep.mae, rep.mape, rep.r2),
                None => ",,,".to_string(),
            };
            let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.experiment,
                r.dataset,
                r.model,
                r.horizon,
                r.status(),
                metrics,
                error
            ));
        }
        out
    }
}

struct Collector<'a> {
    dataset: &'a Dataset,
    horizons: &'a [usize],
    result: SuiteResult,
    plots: BTreeMap<(String, usize), Vec<NamedColumn>>,
}

/// A model name and its test-span forecast.
type NamedColumn = (String, Vec<f64>);

/// Per-horizon report and test-span forecast of one arm.
type ArmOutcome = Result<Vec<(EvaluationReport, Vec<f64>)>>;

impl Collector<'_> {
    fn record(&mut self, experiment: &str, model: &str, outcome: ArmOutcome) {
        match outcome {
            Ok(per_h) => {
                for (report, forecast) in per_h {
                    self.plots
                        .entry((experiment.to_string(), report.horizon))
                        .or_default()
                        .push((model.to_string(), forecast));
                    self.push(experiment, model, report.horizon, Some(report), None);
                }
            }
            Err(e) => {
                for &h in self.horizons {
                    self.push(experiment, model, h, None, Some(e.to_string()));
                }
            }
        }
    }

    fn push(
        &mut self,
        experiment: &str,
        model: &str,
        horizon: usize,
        report: Option<EvaluationReport>,
        error: Option<String>,
    ) {
        self.result.rows.push(SuiteRow {
            experiment: experiment.to_string(),
            dataset: self.dataset.name.clone(),
            model: model.to_string(),
            horizon,
            report,
            error,
        });
    }

    fn finish(mut self) -> SuiteResult {
        let origin = self.dataset.train.len();
        for ((experiment, horizon), columns) in std::mem::take(&mut self.plots) {
            self.result.plots.push(PlotData {
                experiment,
                dataset: self.dataset.name.clone(),
                horizon,
                origin,
                actual: self.dataset.test.values().to_vec(),
                columns,
            });
        }
        self.result
    }
}

fn preliminary_cells(pre: &Preliminary) -> Result<Vec<(EvaluationReport, Vec<f64>)>> {
    let name = format!("SSA-{}", pre.predictor.params.spec.kind.label());
    pre.horizons
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let forecast = pre.test_forecast(k).to_vec();
            Ok((
                EvaluationReport::evaluate(&name, h, pre.test_actual(), &forecast)?,
                forecast,
            ))
        })
        .collect()
}

fn hybrid_cells(
    pre: &Preliminary,
    config: &PipelineConfig,
) -> Result<Vec<(EvaluationReport, Vec<f64>)>> {
    let correctors = train_corrector(&pre.residuals, config)?;
    let corrections = apply_correctors(pre, &correctors)?;
    let name = model_name(
        pre.predictor.params.spec.kind,
        &config.error_decomposer,
        config.corrector.kind,
    );
    let run = combine(pre, &name, &corrections)?;
    Ok(run
        .reports
        .into_iter()
        .zip(run.forecasts)
        .map(|(r, f)| (r, f.final_forecast.into_values()))
        .collect())
}

fn run_dataset(dataset: &Dataset, config: &SuiteConfig) -> SuiteResult {
    let base = &config.base;
    let mut col = Collector {
        dataset,
        horizons: &base.horizons,
        result: SuiteResult::default(),
        plots: BTreeMap::new(),
    };

    let mut atgru: Option<std::result::Result<Preliminary, String>> = None;
    for &kind in &config.predictors {
        let mut cfg = base.clone();
        cfg.predictor = base.predictor.with_kind(kind);
        let pre = run_preliminary(&dataset.train, &dataset.test, &cfg);
        let name = format!("SSA-{}", kind.label());
        col.record(
            EXPERIMENT_PREDICTORS,
            &name,
            pre.as_ref().map_err(clone_err).and_then(preliminary_cells),
        );
        if kind == ModelKind::AtGru {
            atgru = Some(pre.map_err(|e| e.to_string()));
        }
    }

    let mut arms: Vec<(&str, ErrorDecomposer, ModelKind)> = config
        .decomposers
        .iter()
        .map(|&d| (EXPERIMENT_DECOMPOSERS, d, base.corrector.kind))
        .collect();
    let vmd = config.vmd();
    arms.extend(
        config
            .correctors
            .iter()
            .map(|&k| (EXPERIMENT_CORRECTORS, vmd, k)),
    );
    if arms.is_empty() {
        return col.finish();
    }

    let preliminary = atgru.unwrap_or_else(|| {
        let mut cfg = base.clone();
        cfg.predictor = base.predictor.with_kind(ModelKind::AtGru);
        run_preliminary(&dataset.train, &dataset.test, &cfg).map_err(|e| e.to_string())
    });
    let mut plot_prelim_added = false;
    let mut cache: BTreeMap<String, Vec<(EvaluationReport, Vec<f64>)>> = BTreeMap::new();
    for (experiment, decomposer, kind) in arms {
        let name = model_name(ModelKind::AtGru, &decomposer, kind);
        let outcome = match &preliminary {
            Err(msg) => Err(Error::NumericalFailure(format!(
                "preliminary AtGRU stage failed: {msg}"
            ))),
            Ok(pre) => {
                if !plot_prelim_added {
                    // each hybrid figure also shows the uncorrected forecast
                    if let Ok(cells) = preliminary_cells(pre) {
                        for (rep, f) in cells {
                            for exp in [EXPERIMENT_DECOMPOSERS, EXPERIMENT_CORRECTORS] {
                                col.plots
                                    .entry((exp.to_string(), rep.horizon))
                                    .or_default()
                                    .push((rep.model_name.clone(), f.clone()));
                            }
                        }
                    }
                    plot_prelim_added = true;
                }
                if let Some(hit) = cache.get(&name) {
                    Ok(hit.clone())
                } else {
                    let mut cfg = base.clone();
                    cfg.error_decomposer = decomposer;
                    cfg.corrector = base.corrector.with_kind(kind);
                    let cells = hybrid_cells(pre, &cfg);
                    if let Ok(c) = &cells {
                        cache.insert(name.clone(), c.clone());
                    }
                    cells
                }
            }
        };
        col.record(experiment, &name, outcome);
    }
    col.finish()
}

fn clone_err(e: &Error) -> Error {
    Error::NumericalFailure(e.to_string())
}

/// Runs experiments I-V on every dataset. A failing cell becomes a
/// FAILED row; the suite carries on.
pub fn run_experiment_suite(datasets: &[Dataset], config: &SuiteConfig) -> Result<SuiteResult> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.base.validate()?;
    let mut result = SuiteResult {
        horizons: config.base.horizons.clone(),
        ..SuiteResult::default()
    };
    for dataset in datasets {
        let part = run_dataset(dataset, config);
        result.rows.extend(part.rows);
        result.plots.extend(part.plots);
    }
    Ok(result)
}
