use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use opf_imbalance::dataset::{self, impute_mean, split_holdout, StandardScaler};
use opf_imbalance::evaluation::{Hyperparameter, Method, Resampler};
use opf_imbalance::oversampling::{oversample, OverPolicy, OverVariant};
use opf_imbalance::undersampling::{prune, score_training, ScoreMap};
use opf_imbalance::{supervised, Dataset, Euclidean, RandomSource, Rng};

use crate::output::write_atomic;
use crate::{parse_method, InputArgs, UsageError};

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long)]
    seed: u64,
    /// Largest k searched when clustering the minority class.
    #[arg(long, default_value_t = 5)]
    kmax: usize,
    /// Neighbourhood size for `smote`.
    #[arg(long, default_value_t = 5)]
    smote_k: usize,
    /// Share of the input held out to score samples (score-based methods).
    #[arg(long, default_value_t = 0.15)]
    val_fraction: f64,
}

pub fn run(args: &ResampleArgs) -> Result<()> {
    if args.input.input == args.output {
        return Err(UsageError("--input and --output must differ".into()).into());
    }
    if !(args.val_fraction > 0.0 && args.val_fraction < 1.0) {
        return Err(UsageError("--val-fraction must lie in (0, 1)".into()).into());
    }
    let raw = dataset::load_csv(&args.input.input, &args.input.csv_options())?;
    let imputed = impute_mean(&raw)?;
    let scaler = StandardScaler::fit(&imputed)?;
    let scaled = scaler.transform(&imputed)?;
    let rng = Rng::new(args.seed);
    let method_rng = rng.child(args.method.stream_id());

    let resampled = if args.method.needs_validation() {
        score_and_prune(&scaled, args, &rng, &method_rng)?
    } else {
        let param = match args.method.hyperparameter() {
            Hyperparameter::SmoteK => args.smote_k,
            _ => args.kmax,
        };
        args.method.resample(&scaled, &scaled, param, &method_rng)?
    };

    let out = to_input_units(&imputed, &resampled, &scaler)?;
    write_atomic(&args.output, |w| Ok(dataset::write_csv(&out, w)?))?;

    let names = &raw.schema().class_names;
    let before = raw.class_counts();
    let after = out.class_counts();
    let kept = out.len() - out.synthetic_count();
    println!(
        "{} seed={}: {}={} {}={} -> {}={} {}={} ({} removed, {} synthetic)",
        args.method,
        args.seed,
        names[0],
        before[0],
        names[1],
        before[1],
        names[0],
        after[0],
        names[1],
        after[1],
        raw.len() - kept,
        out.synthetic_count()
    );
    Ok(())
}

/// Scores the input minus a stratified validation slice, then applies the
/// pruning policy to the whole input. Validation samples score 0 and rank by
/// the cost the trained forest offers them.
fn score_and_prune(scaled: &Dataset, args: &ResampleArgs, rng: &Rng, method_rng: &Rng) -> Result<Dataset> {
    let (rest, val) = split_holdout(scaled, args.val_fraction, &mut rng.child(0))?;
    let partial = score_training(&rest, &val, &Euclidean)?;
    let model = supervised::fit(&rest, &Euclidean)?;
    let val_cost: Vec<f64> = val.rows().map(|x| model.classify(x, &Euclidean).cost).collect();

    let mut scores =
        ScoreMap { ids: scaled.ids().to_vec(), score: vec![0; scaled.len()], cost: vec![0.0; scaled.len()] };
    for (i, &id) in scaled.ids().iter().enumerate() {
        if let Some(p) = rest.ids().iter().position(|&r| r == id) {
            scores.score[i] = partial.score[p];
            scores.cost[i] = partial.cost[p];
        } else if let Some(p) = val.ids().iter().position(|&v| v == id) {
            scores.cost[i] = val_cost[p];
        } else {
            bail!("sample {id} is in neither part of the validation split");
        }
    }

    let policy = args.method.under_policy().expect("score-based method");
    let pruned = prune(scaled, &scores, policy)?;
    if pruned.guard_triggered {
        eprintln!("warning: pruning would empty a class; its best-ranked sample was kept");
    }
    if args.method.over_variant().is_none() {
        return Ok(pruned.data);
    }
    let gap = pruned.data.majority_count() - pruned.data.minority_count();
    if gap == 0 {
        return Ok(pruned.data);
    }
    let policy = OverPolicy::new(OverVariant::O2pf, args.kmax)?;
    Ok(oversample(&pruned.data, gap, policy, method_rng, &Euclidean)?.data)
}

/// Real rows are copied from the imputed input; synthetic rows are mapped
/// back through the scaler.
fn to_input_units(imputed: &Dataset, resampled: &Dataset, scaler: &StandardScaler) -> Result<Dataset> {
    let mut positions = Vec::new();
    let mut synthetic = Vec::new();
    let mut synthetic_label = None;
    for i in 0..resampled.len() {
        if resampled.is_synthetic(i) {
            if !synthetic.is_empty() && synthetic_label != Some(resampled.label(i)) {
                bail!("synthetic samples of both classes");
            }
            synthetic_label = Some(resampled.label(i));
            synthetic.push(scaler.inverse_row(resampled.row(i)));
        } else {
            if !synthetic.is_empty() {
                bail!("real sample after synthetic ones");
            }
            positions.push(resampled.id(i) as usize);
        }
    }
    let real = imputed.subset(&positions);
    match synthetic_label {
        Some(label) => Ok(real.with_synthetic(&synthetic, label)?),
        None => Ok(real),
    }
}
