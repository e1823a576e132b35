//! O²PF: cluster the minority class with the unsupervised OPF, fit a
//! Gaussian to every cluster and draw synthetic minority samples from it.
//!
//! The number of samples per cluster is proportional to its size. The
//! variants differ only in how a drawn point becomes the emitted sample.
//! For each synthetic sample the generator consumes, in order: `D` standard
//! normals (not for RI), then one uniform for the interpolation weight (MI,
//! WI). RI consumes one index draw and one uniform.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::clustering::{self, KnnGraph};
use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{OpfError, Result};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverVariant {
    /// Draw around the cluster mean.
    O2pf,
    /// Interpolate between the geometric median and a random member.
    Ri,
    /// Interpolate a Gaussian draw with its nearest cluster member.
    Mi,
    /// Draw around the cluster prototype.
    P,
    /// Draw around the density-weighted mean, then interpolate as MI.
    Wi,
}

impl OverVariant {
    pub const ALL: [OverVariant; 5] = [Self::O2pf, Self::Ri, Self::Mi, Self::P, Self::Wi];

    pub fn name(self) -> &'static str {
        match self {
            Self::O2pf => "O2PF",
            Self::Ri => "RI",
            Self::Mi => "MI",
            Self::P => "P",
            Self::Wi => "WI",
        }
    }
}

impl fmt::Display for OverVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OverVariant {
    type Err = OpfError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OpfError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverPolicy {
    pub variant: OverVariant,
    /// Largest neighbourhood size tried when clustering the minority class.
    pub k_max: usize,
}

impl OverPolicy {
    pub fn new(variant: OverVariant, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(OpfError::InvalidArgument("k_max must be at least 1".into()));
        }
        Ok(Self { variant, k_max })
    }
}

/// Splits `n_s` samples over clusters in proportion to their sizes.
///
/// Every cluster first gets `floor(size * n_s / total)`; what is left is
/// handed out one at a time by decreasing size, ties to the lower index.
pub fn allocate(sizes: &[usize], n_s: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let mut out: Vec<usize> =
        sizes.iter().map(|&s| ((s as u128 * n_s as u128) / total as u128) as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut left = n_s - out.iter().sum::<usize>();
    for &c in order.iter().cycle() {
        if left == 0 {
            break;
        }
        out[c] += 1;
        left -= 1;
    }
    out
}

/// Gaussian model of one minority cluster.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    /// Member feature vectors.
    pub members: Vec<DVector<f64>>,
    pub mean: DVector<f64>,
    /// Point the draws are centred on; depends on the variant.
    pub center: DVector<f64>,
    /// Sample covariance (denominator `n - 1`) before regularisation.
    pub covariance: DMatrix<f64>,
    /// Lower Cholesky factor of the (possibly regularised) covariance.
    pub chol: DMatrix<f64>,
    /// Ridge added to the covariance diagonal, zero when none was needed.
    pub ridge: f64,
    pub allocation: usize,
}

impl ClusterModel {
    /// Fits mean, covariance and Cholesky factor; the centre is the mean.
    pub fn fit(members: Vec<DVector<f64>>) -> Result<Self> {
        let n = members.len();
        let dim = members.first().map_or(0, |m| m.len());
        if n == 0 || dim == 0 {
            return Err(OpfError::InvalidArgument("cluster has no members".into()));
        }
        let mut mean = DVector::zeros(dim);
        for m in &members {
            mean += m;
        }
        mean /= n as f64;

        let mut covariance = DMatrix::zeros(dim, dim);
        if n > 1 {
            for m in &members {
                let c = m - &mean;
                covariance.syger(1.0, &c, &c, 1.0);
            }
            covariance /= (n - 1) as f64;
            covariance.fill_upper_triangle_with_lower_triangle();
        }
        let (chol, ridge) = regularized_cholesky(&covariance, n == 1);
        Ok(Self { center: mean.clone(), members, mean, covariance, chol, ridge, allocation: 0 })
    }

    /// `center + L g` for a vector `g` of standard normals.
    pub fn draw(&self, rng: &mut impl RandomSource) -> DVector<f64> {
        let g = DVector::from_fn(self.center.len(), |_, _| rng.standard_normal());
        &self.center + &self.chol * g
    }

    /// Member nearest to `z` under `metric`, ties to the lower position.
    pub fn nearest_member<D: Distance + ?Sized>(&self, z: &DVector<f64>, metric: &D) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, m) in self.members.iter().enumerate() {
            let d = metric.distance(m.as_slice(), z.as_slice());
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

fn ridge_for(covariance: &DMatrix<f64>) -> f64 {
    let dim = covariance.nrows() as f64;
    (1e-6 * covariance.trace() / dim).max(1e-9)
}

/// Cholesky factor of `covariance`, adding `eps * I` when the plain
/// factorisation fails (or always, for single-member clusters).
fn regularized_cholesky(covariance: &DMatrix<f64>, force: bool) -> (DMatrix<f64>, f64) {
    if !force {
        if let Some(ch) = covariance.clone().cholesky() {
            return (ch.l(), 0.0);
        }
    }
    let mut eps = ridge_for(covariance);
    loop {
        let shifted = covariance + DMatrix::identity(covariance.nrows(), covariance.ncols()) * eps;
        if let Some(ch) = shifted.cholesky() {
            return (ch.l(), eps);
        }
        // round-off on near-singular input; grow the ridge
        eps *= 10.0;
    }
}

/// Geometric median by Weiszfeld iteration started from `start`.
pub fn geometric_median(points: &[DVector<f64>], start: &DVector<f64>) -> DVector<f64> {
    const TOL: f64 = 1e-8;
    const MAX_ITER: usize = 1000;
    let mut y = start.clone();
    for _ in 0..MAX_ITER {
        let mut num = DVector::zeros(y.len());
        let mut den = 0.0;
        for p in points {
            let w = 1.0 / ((p - &y).norm() + 1e-12);
            num.axpy(w, p, 1.0);
            den += w;
        }
        let next = num / den;
        let step = (&next - &y).norm();
        y = next;
        if step < TOL {
            break;
        }
    }
    y
}

/// Outcome of [`oversample`].
#[derive(Debug, Clone)]
pub struct Oversampled {
    pub data: Dataset,
    /// Neighbourhood size chosen for the minority clustering.
    pub k: usize,
    /// Cluster sizes in clustering order.
    pub cluster_sizes: Vec<usize>,
    /// Synthetic samples assigned to each cluster.
    pub allocation: Vec<usize>,
}

/// Appends `n_s` synthetic samples of `train`'s minority class.
///
/// Cluster `c` draws from `rng.child(c)`, so changing one cluster's
/// allocation leaves the others' samples unchanged.
pub fn oversample<R: RandomSource, D: Distance + ?Sized>(
    train: &Dataset,
    n_s: usize,
    policy: OverPolicy,
    rng: &R,
    metric: &D,
) -> Result<Oversampled> {
    train.ensure_complete()?;
    if n_s == 0 {
        return Err(OpfError::InvalidArgument("n_s must be at least 1".into()));
    }
    if policy.k_max == 0 {
        return Err(OpfError::InvalidArgument("k_max must be at least 1".into()));
    }
    let label = train.minority_label();
    let positions = train.indices_of(label);
    if positions.len() < 2 {
        return Err(OpfError::MinorityTooSmall(positions.len()));
    }
    let minority = train.subset(&positions);
    let k_max = policy.k_max.min(minority.len() - 1);
    let best = clustering::best_k(&minority, k_max, metric)?;
    let groups = best.forest.members();
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let allocation = allocate(&sizes, n_s);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_s);
    for (c, members) in groups.iter().enumerate() {
        if allocation[c] == 0 {
            continue;
        }
        let points: Vec<DVector<f64>> =
            members.iter().map(|&i| DVector::from_column_slice(minority.row(i))).collect();
        let mut model = ClusterModel::fit(points)?;
        model.allocation = allocation[c];
        let mut crng = rng.child(c as u64);
        let prototype = best.forest.prototypes[c];
        emit(
            &model,
            policy.variant,
            &minority,
            prototype,
            members,
            &best.graph,
            &mut crng,
            metric,
            &mut rows,
        );
    }
    Ok(Oversampled { data: train.with_synthetic(&rows, label)?, k: best.k, cluster_sizes: sizes, allocation })
}

#[allow(clippy::too_many_arguments)]
fn emit<R: RandomSource, D: Distance + ?Sized>(
    model: &ClusterModel,
    variant: OverVariant,
    minority: &Dataset,
    prototype: usize,
    members: &[usize],
    graph: &KnnGraph,
    rng: &mut R,
    metric: &D,
    out: &mut Vec<Vec<f64>>,
) {
    let mut model = model.clone();
    match variant {
        OverVariant::O2pf => {
            for _ in 0..model.allocation {
                out.push(model.draw(rng).as_slice().to_vec());
            }
        }
        OverVariant::P => {
            model.center = DVector::from_column_slice(minority.row(prototype));
            for _ in 0..model.allocation {
                out.push(model.draw(rng).as_slice().to_vec());
            }
        }
        OverVariant::Mi | OverVariant::Wi => {
            if variant == OverVariant::Wi {
                let mut weighted = DVector::zeros(model.mean.len());
                let mut total = 0.0;
                for (m, &i) in model.members.iter().zip(members) {
                    weighted.axpy(graph.density[i], m, 1.0);
                    total += graph.density[i];
                }
                model.center = weighted / total;
            }
            for _ in 0..model.allocation {
                let z = model.draw(rng);
                let p = &model.members[model.nearest_member(&z, metric)];
                let alpha = rng.next_f64();
                out.push((p * (1.0 - alpha) + z * alpha).as_slice().to_vec());
            }
        }
        OverVariant::Ri => {
            let mut points = model.members.clone();
            let mut median = geometric_median(&points, &model.mean);
            for _ in 0..model.allocation {
                let x_r = &model.members[rng.below(model.members.len())];
                let reach = 1.0 / (1.0 + metric.distance(median.as_slice(), x_r.as_slice()));
                let beta = rng.uniform(0.0, reach);
                let z = x_r * beta + &median * (1.0 - beta);
                out.push(z.as_slice().to_vec());
                points.push(z);
                median = geometric_median(&points, &median);
            }
        }
    }
}

/// Geometric median of a cluster under the Euclidean metric, exposed for
/// callers that want the RI centre without sampling.
pub fn cluster_median(members: &[DVector<f64>]) -> DVector<f64> {
    let mut mean = DVector::zeros(members[0].len());
    for m in members {
        mean += m;
    }
    mean /= members.len() as f64;
    geometric_median(members, &mean)
}
