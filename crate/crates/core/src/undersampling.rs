//! OPF-US: validation-driven scoring of training samples and score-based
//! pruning.
//!
//! A supervised OPF is trained on the training set and every validation
//! sample is classified. The training node that conquered it gains one point
//! when the predicted label is right and loses one otherwise. Low-scoring
//! samples are then removed according to an [`UnderPolicy`].

use std::fmt;
use std::str::FromStr;

use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{OpfError, Result};
use crate::supervised;

/// Per-sample relevance scores, aligned with the positions of the dataset
/// they were computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    pub ids: Vec<u64>,
    pub score: Vec<i64>,
    /// Cost of each sample in the trained forest, used to break score ties.
    pub cost: Vec<f64>,
}

impl ScoreMap {
    /// Score of the sample with id `id`, if present.
    pub fn get(&self, id: u64) -> Option<i64> {
        self.ids.iter().position(|&i| i == id).map(|p| self.score[p])
    }

    pub fn len(&self) -> usize {
        self.score.len()
    }

    pub fn is_empty(&self) -> bool {
        self.score.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnderPolicy {
    /// Remove the lowest-scored majority samples until the classes balance.
    Us,
    /// Remove majority samples with a negative score.
    Us1,
    /// Remove majority samples with a score of zero or less.
    Us2,
    /// Remove samples of either class with a negative score.
    Us3,
}

impl UnderPolicy {
    pub const ALL: [UnderPolicy; 4] = [Self::Us, Self::Us1, Self::Us2, Self::Us3];

    pub fn name(self) -> &'static str {
        match self {
            Self::Us => "US",
            Self::Us1 => "US1",
            Self::Us2 => "US2",
            Self::Us3 => "US3",
        }
    }
}

impl fmt::Display for UnderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnderPolicy {
    type Err = OpfError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OpfError::UnknownMethod(s.to_string()))
    }
}

/// Result of a pruning pass.
#[derive(Debug, Clone)]
pub struct Undersampled {
    pub data: Dataset,
    /// Ids of the removed samples, ascending.
    pub pruned: Vec<u64>,
    /// Set when a class would have been emptied and its best sample was kept.
    pub guard_triggered: bool,
}

/// Trains an OPF on `train` and scores each training node by the
/// validation samples it conquers.
pub fn score_training<D: Distance + ?Sized>(train: &Dataset, val: &Dataset, metric: &D) -> Result<ScoreMap> {
    if val.is_empty() {
        return Err(OpfError::InvalidArgument("validation set is empty".into()));
    }
    val.ensure_complete()?;
    if val.n_features() != train.n_features() {
        return Err(OpfError::LengthMismatch(val.n_features(), train.n_features()));
    }
    let model = supervised::fit(train, metric)?;
    let mut score = vec![0i64; train.len()];
    for (x, &truth) in val.rows().zip(val.labels()) {
        let c = model.classify(x, metric);
        score[c.conqueror] += if c.label == truth { 1 } else { -1 };
    }
    Ok(ScoreMap { ids: train.ids().to_vec(), score, cost: model.cost })
}

/// Removes samples from `data` according to `policy`, using scores aligned
/// with `data`'s positions.
pub fn prune(data: &Dataset, scores: &ScoreMap, policy: UnderPolicy) -> Result<Undersampled> {
    if scores.len() != data.len() || scores.cost.len() != data.len() {
        return Err(OpfError::LengthMismatch(scores.len(), data.len()));
    }
    if scores.ids != data.ids() {
        return Err(OpfError::InvalidArgument("score map does not belong to this dataset".into()));
    }
    let majority = data.majority_label();
    let rank = |a: &usize, b: &usize| {
        scores.score[*a]
            .cmp(&scores.score[*b])
            .then(scores.cost[*a].total_cmp(&scores.cost[*b]))
            .then(data.id(*a).cmp(&data.id(*b)))
    };

    let mut remove = vec![false; data.len()];
    match policy {
        UnderPolicy::Us => {
            let n_r = data.majority_count() - data.minority_count();
            let mut candidates = data.indices_of(majority);
            candidates.sort_by(rank);
            for &i in &candidates[..n_r] {
                remove[i] = true;
            }
        }
        UnderPolicy::Us1 | UnderPolicy::Us2 | UnderPolicy::Us3 => {
            for (i, r) in remove.iter_mut().enumerate() {
                let s = scores.score[i];
                *r = match policy {
                    UnderPolicy::Us1 => data.label(i) == majority && s < 0,
                    UnderPolicy::Us2 => data.label(i) == majority && s <= 0,
                    _ => s < 0,
                };
            }
        }
    }

    let mut guard_triggered = false;
    for class in 0..2u8 {
        let members = data.indices_of(class);
        if !members.is_empty() && members.iter().all(|&i| remove[i]) {
            let keep = *members.iter().max_by(|a, b| rank(a, b)).expect("non-empty");
            remove[keep] = false;
            guard_triggered = true;
        }
    }

    let kept: Vec<usize> = (0..data.len()).filter(|&i| !remove[i]).collect();
    let mut pruned: Vec<u64> = (0..data.len()).filter(|&i| remove[i]).map(|i| data.id(i)).collect();
    pruned.sort_unstable();
    Ok(Undersampled { data: data.subset(&kept), pruned, guard_triggered })
}

/// Scores `train` against `val` and prunes it with `policy`.
pub fn undersample<D: Distance + ?Sized>(
    train: &Dataset,
    val: &Dataset,
    policy: UnderPolicy,
    metric: &D,
) -> Result<Undersampled> {
    let counts = train.class_counts();
    if counts.iter().any(|&c| c < 2) {
        return Err(OpfError::SingleClass(format!(
            "undersampling needs at least 2 training samples per class, got {counts:?}"
        )));
    }
    let scores = score_training(train, val, metric)?;
    prune(train, &scores, policy)
}
