//! Unsupervised optimum-path forest.
//!
//! Samples become nodes of a k-nearest-neighbour graph and are weighted by a
//! Gaussian-kernel density over their k neighbours. Each density maximum
//! roots a tree; every other node joins the root offering the path whose
//! smallest density is largest (`f_min`). The neighbourhood size is chosen
//! by minimising a normalised graph cut over `1..=k_max`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{OpfError, Result};

/// Cap on the affinity `1/d` of a zero-length arc in the graph cut.
pub const MAX_ARC_AFFINITY: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct KnnGraph {
    pub k: usize,
    /// Directed k-NN lists, nearest first (ties by smaller index).
    pub neighbors: Vec<Vec<usize>>,
    /// Distances matching `neighbors`.
    pub neighbor_dist: Vec<Vec<f64>>,
    /// Propagation arcs: the k-NN lists plus reversed arcs between
    /// equal-density nodes.
    pub adjacency: Vec<Vec<usize>>,
    /// Largest arc weight in the graph.
    pub max_weight: f64,
    pub density: Vec<f64>,
}

impl KnnGraph {
    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ClusterForest {
    pub predecessor: Vec<Option<usize>>,
    pub cost: Vec<f64>,
    /// Cluster of each node, `0..n_clusters()` in discovery order.
    pub label: Vec<usize>,
    /// One root per cluster, indexed by cluster label.
    pub prototypes: Vec<usize>,
}

impl ClusterForest {
    pub fn n_clusters(&self) -> usize {
        self.prototypes.len()
    }

    /// Member node indices of every cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters()];
        for (node, &l) in self.label.iter().enumerate() {
            out[l].push(node);
        }
        out
    }
}

/// Sorted neighbour lists up to some `k_max`, reusable for every `k` below.
#[derive(Debug, Clone)]
pub(crate) struct NeighborTable {
    lists: Vec<Vec<(f64, usize)>>,
}

impl NeighborTable {
    pub fn build<D: Distance + ?Sized>(data: &Dataset, k_max: usize, metric: &D) -> Self {
        let n = data.len();
        let mut lists = Vec::with_capacity(n);
        let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n);
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        for i in 0..n {
            scratch.clear();
            let xi = data.row(i);
            scratch.extend((0..n).filter(|&j| j != i).map(|j| (metric.distance(xi, data.row(j)), j)));
            if k_max < scratch.len() {
                scratch.select_nth_unstable_by(k_max - 1, by_dist);
                scratch.truncate(k_max);
            }
            scratch.sort_unstable_by(by_dist);
            lists.push(scratch.clone());
        }
        Self { lists }
    }

    pub fn graph(&self, k: usize) -> KnnGraph {
        let n = self.lists.len();
        let neighbors: Vec<Vec<usize>> =
            self.lists.iter().map(|l| l[..k].iter().map(|&(_, j)| j).collect()).collect();
        let neighbor_dist: Vec<Vec<f64>> =
            self.lists.iter().map(|l| l[..k].iter().map(|&(d, _)| d).collect()).collect();
        let max_weight = neighbor_dist.iter().flatten().copied().fold(0.0_f64, f64::max);

        let density = if max_weight > 0.0 {
            let psi = max_weight / 3.0;
            let two_psi_sq = 2.0 * psi * psi;
            let norm = 1.0 / ((2.0 * std::f64::consts::PI * psi * psi).sqrt() * k as f64);
            neighbor_dist
                .iter()
                .map(|ds| norm * ds.iter().map(|d| (-d * d / two_psi_sq).exp()).sum::<f64>())
                .collect()
        } else {
            vec![1.0; n]
        };

        // Propagation follows the directed arcs; plateaus are made symmetric
        // so equal-density neighbours can reach each other.
        let mut adjacency = neighbors.clone();
        for (q, list) in neighbors.iter().enumerate() {
            for &u in list {
                if density[u] == density[q] {
                    adjacency[u].push(q);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }

        KnnGraph { k, neighbors, neighbor_dist, adjacency, max_weight, density }
    }
}

pub fn build_knn_graph<D: Distance + ?Sized>(data: &Dataset, k: usize, metric: &D) -> Result<KnnGraph> {
    data.ensure_complete()?;
    let max = data.len().saturating_sub(1);
    if k == 0 || k > max {
        return Err(OpfError::KOutOfRange { k, max });
    }
    Ok(NeighborTable::build(data, k, metric).graph(k))
}

/// Max-heap entry: larger cost first, smaller index on ties.
#[derive(Debug, Clone, Copy)]
struct MaxEntry {
    cost: f64,
    node: usize,
}

impl PartialEq for MaxEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for MaxEntry {}
impl PartialOrd for MaxEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MaxEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost.total_cmp(&other.cost).then(other.node.cmp(&self.node))
    }
}

/// Plateau offset applied to non-root initial costs.
pub fn plateau_delta(density: &[f64]) -> f64 {
    let (lo, hi) =
        density.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    (1e-6 * (hi - lo)).max(1e-12)
}

/// Optimum-path conquest maximising the minimum density along paths.
pub fn cluster(graph: &KnnGraph) -> ClusterForest {
    let n = graph.len();
    let rho = &graph.density;
    let delta = plateau_delta(rho);
    let mut cost: Vec<f64> = rho.iter().map(|r| r - delta).collect();
    let mut predecessor = vec![None; n];
    let mut label = vec![usize::MAX; n];
    let mut prototypes = Vec::new();
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<MaxEntry> = (0..n).map(|node| MaxEntry { cost: cost[node], node }).collect();

    while let Some(MaxEntry { cost: c, node: q }) = heap.pop() {
        if done[q] || c != cost[q] {
            continue;
        }
        done[q] = true;
        if predecessor[q].is_none() {
            label[q] = prototypes.len();
            prototypes.push(q);
            cost[q] = rho[q];
        }
        let cq = cost[q];
        for &u in &graph.adjacency[q] {
            if done[u] || cost[u] >= cq {
                continue;
            }
            let offered = cq.min(rho[u]);
            if offered > cost[u] {
                label[u] = label[q];
                predecessor[u] = Some(q);
                cost[u] = offered;
                heap.push(MaxEntry { cost: offered, node: u });
            }
        }
    }

    ClusterForest { predecessor, cost, label, prototypes }
}

/// Normalised cut `Σ_i W'_i / (W_i + W'_i)` over the directed k-NN arcs,
/// with arc affinity `1/d` (capped at [`MAX_ARC_AFFINITY`]).
pub fn normalized_cut(graph: &KnnGraph, forest: &ClusterForest) -> f64 {
    let c = forest.n_clusters();
    let mut intra = vec![0.0; c];
    let mut inter = vec![0.0; c];
    for (q, (list, dists)) in graph.neighbors.iter().zip(&graph.neighbor_dist).enumerate() {
        let lq = forest.label[q];
        for (&u, &d) in list.iter().zip(dists) {
            let w = if d > 0.0 { (1.0 / d).min(MAX_ARC_AFFINITY) } else { MAX_ARC_AFFINITY };
            if forest.label[u] == lq {
                intra[lq] += w;
            } else {
                inter[lq] += w;
            }
        }
    }
    intra.iter().zip(&inter).filter(|(a, b)| *a + *b > 0.0).map(|(a, b)| b / (a + b)).sum()
}

#[derive(Debug, Clone)]
pub struct BestK {
    pub k: usize,
    pub cut: f64,
    pub graph: KnnGraph,
    pub forest: ClusterForest,
}

/// Clusters with every `k` in `1..=k_max` and keeps the smallest cut
/// (ties go to the smaller `k`).
pub fn best_k<D: Distance + ?Sized>(data: &Dataset, k_max: usize, metric: &D) -> Result<BestK> {
    data.ensure_complete()?;
    let max = data.len().saturating_sub(1);
    if k_max == 0 || k_max > max {
        return Err(OpfError::KOutOfRange { k: k_max, max });
    }
    let table = NeighborTable::build(data, k_max, metric);
    let mut best: Option<BestK> = None;
    for k in 1..=k_max {
        let graph = table.graph(k);
        let forest = cluster(&graph);
        let cut = normalized_cut(&graph, &forest);
        if best.as_ref().is_none_or(|b| cut < b.cut) {
            best = Some(BestK { k, cut, graph, forest });
        }
    }
    Ok(best.expect("k_max >= 1"))
}
