use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::method::{tune_kmax, Hyperparameter, Method, Resampler};
use super::metrics::{f1_score, mean_std, wilcoxon_signed_rank};
use crate::dataset::{self, impute_mean, standard_scale, Dataset, SplitSpec};
use crate::distance::Euclidean;
use crate::error::{OpfError, Result};
use crate::rng::{derive_seed, RandomSource, Rng};
use crate::supervised;

pub const DEFAULT_KMAX_GRID: [usize; 6] = [5, 10, 20, 30, 40, 50];
pub const DEFAULT_SMOTE_GRID: [usize; 6] = [5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub runs: usize,
    #[serde(with = "seed_text")]
    pub base_seed: u64,
    pub kmax_grid: Vec<usize>,
    pub smote_grid: Vec<usize>,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub fit_scaler_on_train: bool,
    pub alpha: f64,
    /// Store per-run wall-clock times. Off by default so reports are
    /// byte-reproducible.
    pub record_timings: bool,
    /// Command-line flags that produced the report, if any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let split = SplitSpec::default();
        Self {
            dataset: "dataset".into(),
            runs: 20,
            base_seed: 0,
            kmax_grid: DEFAULT_KMAX_GRID.to_vec(),
            smote_grid: DEFAULT_SMOTE_GRID.to_vec(),
            train_fraction: split.train_fraction,
            val_fraction: split.val_fraction,
            test_fraction: split.test_fraction,
            fit_scaler_on_train: false,
            alpha: 0.05,
            record_timings: false,
            flags: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn split_spec(&self) -> Result<SplitSpec> {
        SplitSpec::new(self.train_fraction, self.val_fraction, self.test_fraction)
    }

    /// Seed of run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        derive_seed(self.base_seed, run as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: Method,
    pub run: usize,
    #[serde(with = "seed_text")]
    pub seed: u64,
    pub f1: f64,
    /// Hyperparameter chosen on validation data, if the method has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
    /// True for the best mean and for methods not significantly different
    /// from it.
    pub tied_with_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub a: Method,
    pub b: Method,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub methods: Vec<Method>,
    #[serde(rename = "run")]
    pub runs: Vec<RunResult>,
    #[serde(rename = "summary")]
    pub summaries: Vec<MethodSummary>,
    #[serde(rename = "wilcoxon")]
    pub tests: Vec<PairTest>,
}

impl ExperimentReport {
    pub fn f1_of(&self, method: Method) -> Vec<f64> {
        self.runs.iter().filter(|r| r.method == method).map(|r| r.f1).collect()
    }

    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn best(&self) -> Option<&MethodSummary> {
        self.summaries.iter().fold(None, |best: Option<&MethodSummary>, s| match best {
            Some(b) if b.mean >= s.mean => Some(b),
            _ => Some(s),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| OpfError::Report(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| OpfError::Report(e.to_string()))
    }

    /// Flat `method,run,seed,f1[,elapsed]` table.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let timed = self.config.record_timings;
        let mut header = vec!["method", "run", "seed", "f1"];
        if timed {
            header.push("elapsed");
        }
        w.write_record(&header)?;
        for r in &self.runs {
            let mut rec = vec![r.method.to_string(), r.run.to_string(), r.seed.to_string(), r.f1.to_string()];
            if timed {
                rec.push(r.elapsed.map_or(String::new(), |e| e.to_string()));
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| OpfError::Io { path: "<report csv>".into(), source })?;
        Ok(())
    }
}

/// TOML integers are signed 64-bit, so seeds are stored as decimal text.
mod seed_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&seed.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Samples of one run after preprocessing and splitting.
#[derive(Debug, Clone)]
pub struct RunSplit {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

/// Reproduces the preprocessing and split of run `run`.
///
/// `imputed` must already be mean-imputed; it is scaled here either as a
/// whole or, with `fit_scaler_on_train`, with statistics of the training
/// part.
pub fn prepare_run(imputed: &Dataset, cfg: &ExperimentConfig, run: usize) -> Result<RunSplit> {
    let spec = cfg.split_spec()?;
    let mut rng = Rng::new(cfg.run_seed(run)).child(0);
    if cfg.fit_scaler_on_train {
        let parts = dataset::split(imputed, &spec, &mut rng)?;
        let scaler = dataset::StandardScaler::fit(&parts.train)?;
        Ok(RunSplit {
            train: scaler.transform(&parts.train)?,
            val: scaler.transform(&parts.val)?,
            test: scaler.transform(&parts.test)?,
        })
    } else {
        let scaled = standard_scale(imputed, imputed)?;
        let parts = dataset::split(&scaled, &spec, &mut rng)?;
        Ok(RunSplit { train: parts.train, val: parts.val, test: parts.test })
    }
}

/// One method on one prepared split: tune, resample, train, score the test
/// part. Returns the test F1 and the chosen hyperparameter.
pub fn evaluate_method(
    method: Method,
    split: &RunSplit,
    cfg: &ExperimentConfig,
    run_rng: &Rng,
    positive: u8,
) -> Result<(f64, Option<usize>)> {
    let rng = run_rng.child(method.stream_id());
    let grid: &[usize] = match method.hyperparameter() {
        Hyperparameter::None => &[],
        Hyperparameter::KMax => &cfg.kmax_grid,
        Hyperparameter::SmoteK => &cfg.smote_grid,
    };
    let (param, effective) = if grid.is_empty() {
        (None, 0)
    } else {
        let t = tune_kmax(&split.train, &split.val, &method, grid, &rng)?;
        (Some(t.chosen), t.effective)
    };
    let resampled = method.resample(&split.train, &split.val, effective, &rng.child(u64::MAX))?;
    let model = supervised::fit(&resampled, &Euclidean)?;
    let predicted = model.predict(&split.test, &Euclidean);
    let f1 = f1_score(split.test.labels(), &predicted, positive)?;
    Ok((f1, param))
}

/// Repeated stratified holdout comparison of `methods` on `ds`. The
/// original (unresampled) baseline is always included, first.
pub fn run_experiment(ds: &Dataset, methods: &[Method], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.runs == 0 {
        return Err(OpfError::InvalidArgument("runs must be at least 1".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(OpfError::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    cfg.split_spec()?;
    let mut order = vec![Method::Original];
    order.extend(methods.iter().copied().filter(|&m| m != Method::Original));
    let mut unique = Vec::with_capacity(order.len());
    for m in order {
        if !unique.contains(&m) {
            unique.push(m);
        }
    }
    let methods = unique;

    let positive = ds.minority_label();
    let imputed = impute_mean(ds)?;
    let mut runs = Vec::with_capacity(cfg.runs * methods.len());
    for run in 0..cfg.runs {
        let seed = cfg.run_seed(run);
        let split = prepare_run(&imputed, cfg, run)?;
        let run_rng = Rng::new(seed);
        for &method in &methods {
            let start = Instant::now();
            let (f1, param) = evaluate_method(method, &split, cfg, &run_rng, positive)
                .map_err(|e| OpfError::RunFailed { run, method: method.to_string(), source: Box::new(e) })?;
            runs.push(RunResult {
                method,
                run,
                seed,
                f1,
                param,
                elapsed: cfg.record_timings.then(|| start.elapsed().as_secs_f64()),
            });
        }
    }
    summarize(cfg.clone(), methods, runs)
}

/// Builds summaries and pairwise tests from raw run results.
pub fn summarize(
    config: ExperimentConfig,
    methods: Vec<Method>,
    runs: Vec<RunResult>,
) -> Result<ExperimentReport> {
    let scores: Vec<Vec<f64>> =
        methods.iter().map(|&m| runs.iter().filter(|r| r.method == m).map(|r| r.f1).collect()).collect();
    let stats: Vec<(f64, f64)> = scores.iter().map(|s| mean_std(s)).collect();
    let best = (0..methods.len())
        .fold(None, |b: Option<usize>, i| match b {
            Some(j) if stats[j].0 >= stats[i].0 => Some(j),
            _ => Some(i),
        })
        .ok_or_else(|| OpfError::InvalidArgument("no methods".into()))?;

    let mut tests = Vec::new();
    for i in 0..methods.len() {
        for j in i + 1..methods.len() {
            let w = wilcoxon_signed_rank(&scores[i], &scores[j], config.alpha)?;
            tests.push(PairTest {
                a: methods[i],
                b: methods[j],
                p_value: w.p_value,
                significant: w.significant,
            });
        }
    }
    let differs_from_best = |i: usize| {
        let (a, b) = (methods[i.min(best)], methods[i.max(best)]);
        tests.iter().find(|t| t.a == a && t.b == b).is_some_and(|t| t.significant)
    };
    let summaries = methods
        .iter()
        .enumerate()
        .map(|(i, &method)| MethodSummary {
            method,
            mean: stats[i].0,
            std: stats[i].1,
            runs: scores[i].len(),
            tied_with_best: i == best || !differs_from_best(i),
        })
        .collect();
    Ok(ExperimentReport { config, methods, runs, summaries, tests })
}
