//! Undersample-then-oversample pipelines: prune with a score policy, then
//! fill the remaining gap with O²PF samples.

use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{OpfError, Result};
use crate::oversampling::{self, OverPolicy};
use crate::rng::RandomSource;
use crate::undersampling::{self, UnderPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HybridPolicy {
    pub under: UnderPolicy,
    pub over: OverPolicy,
}

impl HybridPolicy {
    pub fn new(under: UnderPolicy, over: OverPolicy) -> Result<Self> {
        if under == UnderPolicy::Us {
            return Err(OpfError::InvalidArgument(
                "US already balances; pair O2PF with US1, US2 or US3".into(),
            ));
        }
        Ok(Self { under, over })
    }
}

#[derive(Debug, Clone)]
pub struct HybridOutcome {
    pub data: Dataset,
    pub pruned: Vec<u64>,
    pub guard_triggered: bool,
    /// Samples synthesised after pruning.
    pub n_s: usize,
}

pub fn hybrid_resample<R: RandomSource, D: Distance + ?Sized>(
    train: &Dataset,
    val: &Dataset,
    policy: HybridPolicy,
    rng: &R,
    metric: &D,
) -> Result<HybridOutcome> {
    let under = undersampling::undersample(train, val, policy.under, metric)?;
    let n_s = under.data.majority_count() - under.data.minority_count();
    let data = if n_s == 0 {
        under.data
    } else {
        oversampling::oversample(&under.data, n_s, policy.over, rng, metric)?.data
    };
    Ok(HybridOutcome { data, pruned: under.pruned, guard_triggered: under.guard_triggered, n_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Euclidean;
    use crate::oversampling::OverVariant;
    use crate::rng::Rng;

    #[test]
    fn plain_us_is_rejected() {
        let over = OverPolicy::new(OverVariant::O2pf, 5).unwrap();
        assert!(HybridPolicy::new(UnderPolicy::Us, over).is_err());
        assert!(HybridPolicy::new(UnderPolicy::Us2, over).is_ok());
    }

    #[test]
    fn balanced_after_pruning_skips_oversampling() {
        // every validation sample is a correctly classified twin, so no
        // score is negative and US1 keeps the already balanced set
        let rows: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 10.0, 11.0, 12.0].iter().map(|&x| vec![x]).collect();
        let train = Dataset::from_rows(&rows, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let val = train.clone();
        let policy =
            HybridPolicy::new(UnderPolicy::Us1, OverPolicy::new(OverVariant::O2pf, 5).unwrap()).unwrap();
        let out = hybrid_resample(&train, &val, policy, &Rng::new(0), &Euclidean).unwrap();
        assert_eq!(out.n_s, 0);
        assert_eq!(out.data, train);
    }
}
