use statrs::function::erf::erfc;

use crate::error::{OpfError, Result};

/// F1 score of class `positive`. Zero when precision and recall are both 0.
pub fn f1_score(truth: &[u8], predicted: &[u8], positive: u8) -> Result<f64> {
    if truth.len() != predicted.len() {
        return Err(OpfError::LengthMismatch(truth.len(), predicted.len()));
    }
    if truth.is_empty() {
        return Err(OpfError::InvalidArgument("no labels to score".into()));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t == positive, p == positive) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN)
    let denom = 2 * tp + fp + fn_;
    Ok(if tp == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 })
}

/// Outcome of a two-sided Wilcoxon signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    pub p_value: f64,
    pub significant: bool,
    /// Number of non-zero differences.
    pub n: usize,
    /// Rank sum of the positive differences.
    pub w_plus: f64,
}

/// Largest sample size tested by exact enumeration.
pub const EXACT_MAX_N: usize = 10;

/// Paired two-sided test of `a` against `b`. Zero differences are dropped
/// and tied magnitudes share their average rank. Up to [`EXACT_MAX_N`]
/// pairs the null distribution is enumerated exactly; above, the normal
/// approximation with tie and continuity corrections is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<Wilcoxon> {
    let ranked = RankedDiffs::new(a, b)?;
    let p_value = if ranked.n() <= EXACT_MAX_N { ranked.exact_p() } else { ranked.normal_p() };
    Ok(ranked.outcome(p_value, alpha))
}

/// Exact-enumeration p-value regardless of sample size (`2^n` patterns).
pub fn wilcoxon_exact(a: &[f64], b: &[f64], alpha: f64) -> Result<Wilcoxon> {
    let ranked = RankedDiffs::new(a, b)?;
    if ranked.n() > 24 {
        return Err(OpfError::InvalidArgument(
            "exact enumeration is limited to 24 non-zero differences".into(),
        ));
    }
    let p = ranked.exact_p();
    Ok(ranked.outcome(p, alpha))
}

/// Normal-approximation p-value regardless of sample size.
pub fn wilcoxon_normal(a: &[f64], b: &[f64], alpha: f64) -> Result<Wilcoxon> {
    let ranked = RankedDiffs::new(a, b)?;
    let p = ranked.normal_p();
    Ok(ranked.outcome(p, alpha))
}

/// Non-zero differences with doubled ranks, so tied averages stay integral.
struct RankedDiffs {
    twice_rank: Vec<u64>,
    positive: Vec<bool>,
    tie_sizes: Vec<u64>,
}

impl RankedDiffs {
    fn new(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(OpfError::LengthMismatch(a.len(), b.len()));
        }
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return Err(OpfError::InvalidArgument("non-finite score".into()));
        }
        let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
        let n = diffs.len();
        let mut twice_rank = vec![0u64; n];
        let mut tie_sizes = Vec::new();
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
                j += 1;
            }
            // positions i..=j hold ranks i+1..=j+1; doubled average is i+j+2
            for r in &mut twice_rank[i..=j] {
                *r = (i + j + 2) as u64;
            }
            tie_sizes.push((j - i + 1) as u64);
            i = j + 1;
        }
        Ok(Self { twice_rank, positive: diffs.iter().map(|d| *d > 0.0).collect(), tie_sizes })
    }

    fn n(&self) -> usize {
        self.twice_rank.len()
    }

    fn twice_w_plus(&self) -> u64 {
        self.twice_rank.iter().zip(&self.positive).filter(|(_, &p)| p).map(|(r, _)| r).sum()
    }

    fn exact_p(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            return 1.0;
        }
        // counts[s] = number of sign patterns whose doubled W+ equals s
        let total: u64 = self.twice_rank.iter().sum();
        let mut counts = vec![0u64; total as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &self.twice_rank {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] > 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let w = self.twice_w_plus() as usize;
        let lower: u64 = counts[..=w].iter().sum();
        let upper: u64 = counts[w..].iter().sum();
        let patterns = 2f64.powi(n as i32);
        (2.0 * lower.min(upper) as f64 / patterns).min(1.0)
    }

    fn normal_p(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() == 0 {
            return 1.0;
        }
        let mean = n * (n + 1.0) / 4.0;
        let ties: f64 = self.tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ties / 48.0;
        if var <= 0.0 {
            return 1.0;
        }
        let w = self.twice_w_plus() as f64 / 2.0;
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    }

    fn outcome(&self, p_value: f64, alpha: f64) -> Wilcoxon {
        Wilcoxon {
            p_value,
            significant: p_value < alpha,
            n: self.n(),
            w_plus: self.twice_w_plus() as f64 / 2.0,
        }
    }
}

/// Mean and sample standard deviation (`n - 1`); the deviation of a single
/// value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
