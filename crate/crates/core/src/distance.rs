/// Symmetric, non-negative dissimilarity with `d(x, x) = 0`.
pub trait Distance: Sync {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Euclidean;

impl Distance for Euclidean {
    #[inline]
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

impl<F> Distance for F
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self(a, b)
    }
}

/// Pairwise distances among the rows of a feature buffer.
///
/// Up to [`PairwiseDistances::CACHE_LIMIT`] points the full symmetric matrix
/// is computed once, so that reading one row is a contiguous scan; above it,
/// distances are evaluated on demand.
pub(crate) struct PairwiseDistances<'a, D: ?Sized> {
    points: &'a [f64],
    dim: usize,
    n: usize,
    metric: &'a D,
    cache: Option<Vec<f64>>,
}

impl<'a, D: Distance + ?Sized> PairwiseDistances<'a, D> {
    pub const CACHE_LIMIT: usize = 3072;

    pub fn new(points: &'a [f64], dim: usize, metric: &'a D) -> Self {
        let n = points.len() / dim;
        let mut this = Self { points, dim, n, metric, cache: None };
        if n <= Self::CACHE_LIMIT {
            let mut cache = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = this.compute(i, j);
                    cache[i * n + j] = d;
                    cache[j * n + i] = d;
                }
            }
            this.cache = Some(cache);
        }
        this
    }

    #[inline]
    fn compute(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(self.row(i), self.row(j))
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.cache {
            Some(cache) => cache[i * self.n + j],
            None => self.compute(i, j),
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.n
    }
}
