use crate::dataset::Dataset;
use crate::distance::{Distance, Euclidean};
use crate::error::{OpfError, Result};
use crate::rng::RandomSource;

/// Minimal SMOTE: each synthetic sample lies on the segment between a random
/// minority sample and one of its `k` nearest minority neighbours.
///
/// Per sample the generator draws the base sample, the neighbour rank and
/// the interpolation weight, in that order. `k` is clamped to the minority
/// size minus one.
pub fn smote_baseline<R: RandomSource>(
    train: &Dataset,
    n_s: usize,
    k: usize,
    rng: &mut R,
) -> Result<Dataset> {
    train.ensure_complete()?;
    if n_s == 0 {
        return Err(OpfError::InvalidArgument("n_s must be at least 1".into()));
    }
    if k == 0 {
        return Err(OpfError::InvalidArgument("k must be at least 1".into()));
    }
    let label = train.minority_label();
    let minority = train.indices_of(label);
    let m = minority.len();
    if m < 2 {
        return Err(OpfError::MinorityTooSmall(m));
    }
    let k = k.min(m - 1);

    let neighbours: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (Euclidean.distance(train.row(i), train.row(j)), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.truncate(k);
            others.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(n_s);
    for _ in 0..n_s {
        let base = rng.below(m);
        let x = train.row(minority[base]);
        let x_hat = train.row(neighbours[base][rng.below(k)]);
        let u = rng.next_f64();
        rows.push(x.iter().zip(x_hat).map(|(a, b)| a + u * (b - a)).collect());
    }
    train.with_synthetic(&rows, label)
}
