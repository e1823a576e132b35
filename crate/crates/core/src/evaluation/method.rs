use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::metrics::f1_score;
use super::smote::smote_baseline;
use crate::dataset::Dataset;
use crate::distance::Euclidean;
use crate::error::{OpfError, Result};
use crate::hybrid::{hybrid_resample, HybridPolicy};
use crate::oversampling::{oversample, OverPolicy, OverVariant};
use crate::rng::{RandomSource, Rng};
use crate::supervised;
use crate::undersampling::{undersample, UnderPolicy};

/// Every resampling method the harness can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    Original,
    O2pf,
    O2pfRi,
    O2pfMi,
    O2pfP,
    O2pfWi,
    OpfUs,
    OpfUs1,
    OpfUs2,
    OpfUs3,
    Us1O2pf,
    Us2O2pf,
    Us3O2pf,
    Smote,
}

/// What a method's hyperparameter means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyperparameter {
    None,
    /// Largest `k` searched when clustering the minority class.
    KMax,
    /// SMOTE neighbourhood size.
    SmoteK,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Self::Original,
        Self::O2pf,
        Self::O2pfRi,
        Self::O2pfMi,
        Self::O2pfP,
        Self::O2pfWi,
        Self::OpfUs,
        Self::OpfUs1,
        Self::OpfUs2,
        Self::OpfUs3,
        Self::Us1O2pf,
        Self::Us2O2pf,
        Self::Us3O2pf,
        Self::Smote,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::O2pf => "o2pf",
            Self::O2pfRi => "o2pf-ri",
            Self::O2pfMi => "o2pf-mi",
            Self::O2pfP => "o2pf-p",
            Self::O2pfWi => "o2pf-wi",
            Self::OpfUs => "opf-us",
            Self::OpfUs1 => "opf-us1",
            Self::OpfUs2 => "opf-us2",
            Self::OpfUs3 => "opf-us3",
            Self::Us1O2pf => "us1-o2pf",
            Self::Us2O2pf => "us2-o2pf",
            Self::Us3O2pf => "us3-o2pf",
            Self::Smote => "smote",
        }
    }

    /// Stream id of the method's random generator within a run. Fixed per
    /// method so adding or removing methods never changes the others.
    pub fn stream_id(self) -> u64 {
        100 + Self::ALL.iter().position(|&m| m == self).expect("listed") as u64
    }

    pub fn hyperparameter(self) -> Hyperparameter {
        match self {
            Self::Original | Self::OpfUs | Self::OpfUs1 | Self::OpfUs2 | Self::OpfUs3 => Hyperparameter::None,
            Self::Smote => Hyperparameter::SmoteK,
            _ => Hyperparameter::KMax,
        }
    }

    /// True for methods that score training samples on validation data.
    pub fn needs_validation(self) -> bool {
        matches!(
            self,
            Self::OpfUs
                | Self::OpfUs1
                | Self::OpfUs2
                | Self::OpfUs3
                | Self::Us1O2pf
                | Self::Us2O2pf
                | Self::Us3O2pf
        )
    }

    pub fn under_policy(self) -> Option<UnderPolicy> {
        match self {
            Self::OpfUs => Some(UnderPolicy::Us),
            Self::OpfUs1 | Self::Us1O2pf => Some(UnderPolicy::Us1),
            Self::OpfUs2 | Self::Us2O2pf => Some(UnderPolicy::Us2),
            Self::OpfUs3 | Self::Us3O2pf => Some(UnderPolicy::Us3),
            _ => None,
        }
    }

    pub fn over_variant(self) -> Option<OverVariant> {
        match self {
            Self::O2pf | Self::Us1O2pf | Self::Us2O2pf | Self::Us3O2pf => Some(OverVariant::O2pf),
            Self::O2pfRi => Some(OverVariant::Ri),
            Self::O2pfMi => Some(OverVariant::Mi),
            Self::O2pfP => Some(OverVariant::P),
            Self::O2pfWi => Some(OverVariant::Wi),
            _ => None,
        }
    }

    /// Parses a comma-separated list, keeping the given order and dropping
    /// repeats.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Method = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(OpfError::InvalidArgument("method list is empty".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = OpfError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OpfError::UnknownMethod(s.to_string()))
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = OpfError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Anything that turns a training set into a resampled training set.
pub trait Resampler {
    /// Resamples `train`; `param` is the method's hyperparameter (ignored
    /// by methods without one) and `val` is only read by score-based methods.
    fn resample(&self, train: &Dataset, val: &Dataset, param: usize, rng: &Rng) -> Result<Dataset>;
}

impl Resampler for Method {
    fn resample(&self, train: &Dataset, val: &Dataset, param: usize, rng: &Rng) -> Result<Dataset> {
        let gap = train.majority_count() - train.minority_count();
        match *self {
            Method::Original => Ok(train.clone()),
            Method::OpfUs | Method::OpfUs1 | Method::OpfUs2 | Method::OpfUs3 => {
                let policy = self.under_policy().expect("score method");
                Ok(undersample(train, val, policy, &Euclidean)?.data)
            }
            Method::Us1O2pf | Method::Us2O2pf | Method::Us3O2pf => {
                let policy = HybridPolicy::new(
                    self.under_policy().expect("hybrid"),
                    OverPolicy::new(OverVariant::O2pf, param)?,
                )?;
                Ok(hybrid_resample(train, val, policy, rng, &Euclidean)?.data)
            }
            Method::Smote => {
                if gap == 0 {
                    return Ok(train.clone());
                }
                smote_baseline(train, gap, param, &mut rng.clone())
            }
            _ => {
                if gap == 0 {
                    return Ok(train.clone());
                }
                let policy = OverPolicy::new(self.over_variant().expect("oversampler"), param)?;
                Ok(oversample(train, gap, policy, rng, &Euclidean)?.data)
            }
        }
    }
}

/// Outcome of a validation grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned {
    /// Grid value as given.
    pub chosen: usize,
    /// Value actually used after clamping to the minority size minus one.
    pub effective: usize,
    pub val_f1: f64,
}

/// Picks the grid value whose resampled training set gives the best
/// validation F1 on the minority class, ties to the smaller value.
///
/// Values above the minority size minus one are evaluated clamped. Each
/// effective value resamples with `rng.child(value)`.
pub fn tune_kmax<M: Resampler + ?Sized>(
    train: &Dataset,
    val: &Dataset,
    method: &M,
    grid: &[usize],
    rng: &Rng,
) -> Result<Tuned> {
    if grid.is_empty() {
        return Err(OpfError::InvalidArgument("hyperparameter grid is empty".into()));
    }
    let positive = train.minority_label();
    let ceiling = train.minority_count().saturating_sub(1).max(1);
    let mut cache: Vec<(usize, f64)> = Vec::new();
    let mut best: Option<Tuned> = None;
    for &value in grid {
        let effective = value.min(ceiling);
        let f1 = match cache.iter().find(|(e, _)| *e == effective) {
            Some(&(_, f)) => f,
            None => {
                let resampled = method.resample(train, val, effective, &rng.child(effective as u64))?;
                let model = supervised::fit(&resampled, &Euclidean)?;
                let f = f1_score(val.labels(), &model.predict(val, &Euclidean), positive)?;
                cache.push((effective, f));
                f
            }
        };
        let better = match best {
            None => true,
            Some(b) => f1 > b.val_f1 || (f1 == b.val_f1 && value < b.chosen),
        };
        if better {
            best = Some(Tuned { chosen: value, effective, val_f1: f1 });
        }
    }
    Ok(best.expect("non-empty grid"))
}
