//! Repeated-holdout comparison of resampling methods: F1 on the minority
//! class, validation tuning of each method's hyperparameter, Wilcoxon
//! signed-rank tests between methods, and a SMOTE baseline.

mod experiment;
mod method;
mod metrics;
mod smote;

pub use experiment::{
    evaluate_method, prepare_run, run_experiment, summarize, ExperimentConfig, ExperimentReport,
    MethodSummary, PairTest, RunResult, RunSplit, DEFAULT_KMAX_GRID, DEFAULT_SMOTE_GRID,
};
pub use method::{tune_kmax, Hyperparameter, Method, Resampler, Tuned};
pub use metrics::{
    f1_score, mean_std, wilcoxon_exact, wilcoxon_normal, wilcoxon_signed_rank, Wilcoxon, EXACT_MAX_N,
};
pub use smote::smote_baseline;
