use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use opf_imbalance::dataset;
use opf_imbalance::evaluation::{
    run_experiment, ExperimentConfig, ExperimentReport, Method, DEFAULT_KMAX_GRID, DEFAULT_SMOTE_GRID,
};

use crate::output::write_atomic;
use crate::{parse_method, InputArgs, UsageError};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated methods; `original` is always included.
    #[arg(long, value_parser = parse_method, value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_KMAX_GRID)]
    kmax_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SMOTE_GRID)]
    smote_grid: Vec<usize>,
    #[arg(long, default_value_t = 0.15)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0.15)]
    test_fraction: f64,
    /// Fit the scaler on each run's training part instead of the full input.
    #[arg(long)]
    fit_scaler_on_train: bool,
    /// Path prefix for `<prefix>.toml` and `<prefix>.csv`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record per-run wall-clock times in the report.
    #[arg(long)]
    timings: bool,
}

impl EvaluateArgs {
    fn config(&self) -> ExperimentConfig {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut flags = vec![
            format!("--input={}", self.input.input.display()),
            format!("--label-column={}", self.input.label_column_text()),
            format!("--methods={}", self.methods().iter().map(|m| m.name()).collect::<Vec<_>>().join(",")),
            format!("--runs={}", self.runs),
            format!("--seed={}", self.seed),
            format!("--kmax-grid={}", list(&self.kmax_grid)),
            format!("--smote-grid={}", list(&self.smote_grid)),
            format!("--val-fraction={}", self.val_fraction),
            format!("--test-fraction={}", self.test_fraction),
        ];
        if let Some(p) = &self.input.positive_label {
            flags.push(format!("--positive-label={p}"));
        }
        if self.fit_scaler_on_train {
            flags.push("--fit-scaler-on-train".into());
        }
        if self.timings {
            flags.push("--timings".into());
        }
        ExperimentConfig {
            dataset: dataset_name(&self.input.input),
            runs: self.runs,
            base_seed: self.seed,
            kmax_grid: self.kmax_grid.clone(),
            smote_grid: self.smote_grid.clone(),
            train_fraction: 1.0 - self.val_fraction - self.test_fraction,
            val_fraction: self.val_fraction,
            test_fraction: self.test_fraction,
            fit_scaler_on_train: self.fit_scaler_on_train,
            alpha: 0.05,
            record_timings: self.timings,
            flags,
        }
    }

    fn methods(&self) -> Vec<Method> {
        if self.methods.is_empty() {
            Method::ALL.to_vec()
        } else {
            self.methods.clone()
        }
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn run(args: &EvaluateArgs) -> Result<()> {
    if args.runs == 0 {
        return Err(UsageError("--runs must be at least 1".into()).into());
    }
    if args.kmax_grid.contains(&0) || args.smote_grid.contains(&0) {
        return Err(UsageError("grid values must be at least 1".into()).into());
    }
    let cfg = args.config();
    if cfg.split_spec().is_err() {
        return Err(UsageError("--val-fraction and --test-fraction must leave a training part".into()).into());
    }
    let ds = dataset::load_csv(&args.input.input, &args.input.csv_options())?;
    let report = run_experiment(&ds, &args.methods(), &cfg)?;

    if let Some(prefix) = &args.report {
        let toml_text = report.to_toml()?;
        write_atomic(&with_suffix(prefix, "toml"), |w| Ok(w.write_all(toml_text.as_bytes())?))?;
        write_atomic(&with_suffix(prefix, "csv"), |w| Ok(report.write_csv(w)?))?;
    }
    print_table(&report);
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn print_table(report: &ExperimentReport) {
    println!("{} ({} runs, seed {})", report.config.dataset, report.config.runs, report.config.base_seed);
    println!("{:<10} {:>17}", "method", "F1");
    for s in &report.summaries {
        let mark = if s.tied_with_best { " *" } else { "" };
        println!("{:<10} {:>8.4} ± {:.4}{mark}", s.method.name(), s.mean, s.std);
    }
    println!("* best mean, or not significantly different from it (Wilcoxon, alpha {})", report.config.alpha);
}
