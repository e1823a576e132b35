//! Independent reference computations, written for clarity over speed.

use opf_imbalance::{Dataset, Distance, Euclidean, RandomSource, Rng};

pub fn random_labelled(rng: &mut Rng, n: usize, d: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.uniform(-3.0, 3.0)).collect()).collect();
    let mut labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
    labels[0] = 0;
    labels[1] = 1;
    Dataset::from_rows(&rows, labels).expect("valid rows")
}

/// Minimax path value between every pair of samples over the complete
/// graph, by Floyd–Warshall on the (min, max) semiring.
pub fn minimax_closure(ds: &Dataset) -> Vec<Vec<f64>> {
    let n = ds.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n).map(|j| if i == j { 0.0 } else { Euclidean.distance(ds.row(i), ds.row(j)) }).collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k].max(m[k][j]);
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m
}

/// Gaussian k-NN density with sigma a third of the largest k-NN arc weight.
pub fn literal_density(ds: &Dataset, k: usize) -> Vec<f64> {
    let n = ds.len();
    let lists: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut all: Vec<(f64, usize)> =
                (0..n).filter(|&j| j != i).map(|j| (Euclidean.distance(ds.row(i), ds.row(j)), j)).collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            all.into_iter().take(k).map(|e| e.0).collect()
        })
        .collect();
    let max_weight = lists.iter().flatten().copied().fold(0.0, f64::max);
    let sigma = max_weight / 3.0;
    lists
        .iter()
        .map(|l| {
            let sum: f64 = l.iter().map(|d| (-(d * d) / (2.0 * sigma * sigma)).exp()).sum();
            sum / ((2.0 * std::f64::consts::PI * sigma * sigma).sqrt() * k as f64)
        })
        .collect()
}

pub fn two_blobs(seed: u64) -> Dataset {
    let mut rng = Rng::new(seed);
    let mut rows = Vec::new();
    for blob in 0..2 {
        for _ in 0..5 {
            rows.push(vec![rng.next_f64() + 100.0 * blob as f64, rng.next_f64()]);
        }
    }
    Dataset::from_rows(&rows, vec![1; 10]).expect("valid rows")
}

/// Two-sided signed-rank p-value by enumerating all 2^n sign patterns.
/// Ranks are averaged over ties by counting; zero differences are dropped.
pub fn wilcoxon_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let rank: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| rank[i]).sum();
    let (mut lower, mut upper) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| rank[i]).sum();
        if w <= observed + 1e-9 {
            lower += 1;
        }
        if w >= observed - 1e-9 {
            upper += 1;
        }
    }
    (2.0 * lower.min(upper) as f64 / (1u64 << n) as f64).min(1.0)
}

pub fn confusion_vectors(tp: usize, fp: usize, fn_: usize, tn: usize) -> (Vec<u8>, Vec<u8>) {
    let mut truth = Vec::new();
    let mut pred = Vec::new();
    for (t, p, count) in [(1, 1, tp), (0, 1, fp), (1, 0, fn_), (0, 0, tn)] {
        truth.extend(std::iter::repeat_n(t, count));
        pred.extend(std::iter::repeat_n(p, count));
    }
    (truth, pred)
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1_by_hand(tp: usize, fp: usize, fn_: usize) -> f64 {
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}
