//! Supervised optimum-path forest over the complete graph.
//!
//! Prototypes are the endpoints of minimum-spanning-tree edges joining
//! samples of different classes. Training grows optimum-path trees from the
//! prototypes under the `f_max` path cost (largest arc along the path), and
//! a new sample is assigned the label of the training node offering it the
//! lowest `max(C(q), d(q, x))`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::dataset::Dataset;
use crate::distance::{Distance, PairwiseDistances};
use crate::error::{OpfError, Result};

/// Heap entry ordered by cost, then by node index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub cost: f64,
    pub node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost.total_cmp(&other.cost).then(self.node.cmp(&other.node))
    }
}

/// A trained classifier. Node indices refer to rows of [`TrainedOpf::nodes`].
#[derive(Debug, Clone)]
pub struct TrainedOpf {
    pub nodes: Dataset,
    /// Sorted prototype node indices.
    pub prototypes: Vec<usize>,
    pub predecessor: Vec<Option<usize>>,
    pub cost: Vec<f64>,
    pub out_label: Vec<u8>,
    /// All nodes sorted by `(cost, index)`.
    pub ordered: Vec<usize>,
}

/// Outcome of classifying one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: u8,
    /// Training node that offered the optimum path.
    pub conqueror: usize,
    /// The offered cost `max(C(conqueror), d(conqueror, x))`.
    pub cost: f64,
}

/// MST-based prototype election. Returns sorted node indices.
pub fn elect_prototypes<D: Distance + ?Sized>(train: &Dataset, metric: &D) -> Result<Vec<usize>> {
    check_trainable(train)?;
    let dist = PairwiseDistances::new(train.features(), train.n_features(), metric);
    Ok(prototypes_from_mst(train, &dist))
}

/// Runs the optimum-path conquest from the given prototypes.
pub fn train<D: Distance + ?Sized>(train: &Dataset, prototypes: &[usize], metric: &D) -> Result<TrainedOpf> {
    train.ensure_complete()?;
    if prototypes.is_empty() {
        return Err(OpfError::InvalidArgument("prototype set is empty".into()));
    }
    if let Some(&p) = prototypes.iter().find(|&&p| p >= train.len()) {
        return Err(OpfError::InvalidArgument(format!("prototype {p} is not a training node")));
    }
    let dist = PairwiseDistances::new(train.features(), train.n_features(), metric);
    Ok(conquer(train, prototypes, &dist))
}

/// Prototype election followed by training, sharing one distance table.
pub fn fit<D: Distance + ?Sized>(train: &Dataset, metric: &D) -> Result<TrainedOpf> {
    check_trainable(train)?;
    let dist = PairwiseDistances::new(train.features(), train.n_features(), metric);
    let prototypes = prototypes_from_mst(train, &dist);
    Ok(conquer(train, &prototypes, &dist))
}

fn check_trainable(train: &Dataset) -> Result<()> {
    train.ensure_complete()?;
    if !train.has_both_classes() {
        return Err(OpfError::SingleClass("prototype election needs samples of both classes".into()));
    }
    Ok(())
}

/// Tie order on MST edges: weight, then `(min endpoint, max endpoint)`.
fn edge_key(w: f64, a: usize, b: usize) -> (f64, usize, usize) {
    (w, a.min(b), a.max(b))
}

fn edge_less(x: (f64, usize, usize), y: (f64, usize, usize)) -> bool {
    x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))) == Ordering::Less
}

fn prototypes_from_mst<D: Distance + ?Sized>(train: &Dataset, dist: &PairwiseDistances<'_, D>) -> Vec<usize> {
    let n = train.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, usize::MAX, usize::MAX); n];
    let mut parent = vec![0usize; n];
    let mut is_proto = vec![false; n];

    in_tree[0] = true;
    for (v, b) in best.iter_mut().enumerate().skip(1) {
        *b = edge_key(dist.get(0, v), 0, v);
    }
    for _ in 1..n {
        let mut next = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (next == usize::MAX || edge_less(best[v], best[next])) {
                next = v;
            }
        }
        in_tree[next] = true;
        let from = parent[next];
        if train.label(from) != train.label(next) {
            is_proto[from] = true;
            is_proto[next] = true;
        }
        for u in 0..n {
            if !in_tree[u] {
                let cand = edge_key(dist.get(next, u), next, u);
                if edge_less(cand, best[u]) {
                    best[u] = cand;
                    parent[u] = next;
                }
            }
        }
    }
    (0..n).filter(|&i| is_proto[i]).collect()
}

fn conquer<D: Distance + ?Sized>(
    train: &Dataset,
    prototypes: &[usize],
    dist: &PairwiseDistances<'_, D>,
) -> TrainedOpf {
    let n = train.len();
    let mut cost = vec![f64::INFINITY; n];
    let mut predecessor = vec![None; n];
    let mut out_label = train.labels().to_vec();
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(n);

    let mut protos = prototypes.to_vec();
    protos.sort_unstable();
    protos.dedup();
    for &p in &protos {
        cost[p] = 0.0;
        out_label[p] = train.label(p);
        heap.push(Reverse(Entry { cost: 0.0, node: p }));
    }

    while let Some(Reverse(Entry { cost: c, node: q })) = heap.pop() {
        if done[q] || c != cost[q] {
            continue;
        }
        done[q] = true;
        let cq = cost[q];
        for u in 0..n {
            if u == q || cost[u] <= cq {
                continue;
            }
            let offered = cq.max(dist.get(q, u));
            if offered < cost[u] {
                out_label[u] = out_label[q];
                predecessor[u] = Some(q);
                cost[u] = offered;
                heap.push(Reverse(Entry { cost: offered, node: u }));
            }
        }
    }

    let mut ordered: Vec<usize> = (0..n).collect();
    ordered.sort_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(a.cmp(&b)));
    TrainedOpf { nodes: train.clone(), prototypes: protos, predecessor, cost, out_label, ordered }
}

impl TrainedOpf {
    /// Optimum-path assignment of one sample, scanning nodes by increasing
    /// cost and stopping once no remaining node can offer less.
    pub fn classify<D: Distance + ?Sized>(&self, sample: &[f64], metric: &D) -> Classification {
        let mut best_cost = f64::INFINITY;
        let mut best_node = self.ordered[0];
        for &q in &self.ordered {
            let cq = self.cost[q];
            if cq >= best_cost {
                break;
            }
            let offered = cq.max(metric.distance(self.nodes.row(q), sample));
            if offered < best_cost {
                best_cost = offered;
                best_node = q;
            }
        }
        Classification { label: self.out_label[best_node], conqueror: best_node, cost: best_cost }
    }

    pub fn predict<D: Distance + ?Sized>(&self, samples: &Dataset, metric: &D) -> Vec<u8> {
        samples.rows().map(|x| self.classify(x, metric).label).collect()
    }

    /// Prototype at the root of `node`'s tree.
    pub fn root_of(&self, node: usize) -> usize {
        let mut cur = node;
        while let Some(p) = self.predecessor[cur] {
            cur = p;
        }
        cur
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Euclidean;

    fn line(points: &[(f64, u8)]) -> Dataset {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        Dataset::from_rows(&rows, points.iter().map(|p| p.1).collect()).unwrap()
    }

    #[test]
    fn two_samples_are_both_prototypes() {
        let ds = line(&[(0.0, 0), (1.0, 1)]);
        assert_eq!(elect_prototypes(&ds, &Euclidean).unwrap(), vec![0, 1]);
    }

    #[test]
    fn boundary_pair_elected() {
        let ds = line(&[(0.0, 0), (1.0, 0), (5.0, 1), (6.0, 1)]);
        assert_eq!(elect_prototypes(&ds, &Euclidean).unwrap(), vec![1, 2]);
    }

    #[test]
    fn alternating_equidistant_all_prototypes() {
        let ds = line(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)]);
        assert_eq!(elect_prototypes(&ds, &Euclidean).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_class_rejected() {
        let ds = line(&[(0.0, 0), (1.0, 0)]);
        assert!(matches!(elect_prototypes(&ds, &Euclidean), Err(OpfError::SingleClass(_))));
    }

    #[test]
    fn chain_costs() {
        // P at 0, a at 2, b at 5: P-a = 2, a-b = 3, P-b = 5
        let ds = line(&[(0.0, 1), (2.0, 0), (5.0, 0)]);
        let m = train(&ds, &[0], &Euclidean).unwrap();
        assert_eq!(m.cost, vec![0.0, 2.0, 3.0]);
        assert_eq!(m.predecessor, vec![None, Some(0), Some(1)]);
        assert_eq!(m.out_label[2], 1);
        assert_eq!(m.ordered, vec![0, 1, 2]);
    }

    #[test]
    fn prototypes_have_zero_cost() {
        let ds = line(&[(0.0, 0), (1.0, 0), (5.0, 1), (6.0, 1)]);
        let m = fit(&ds, &Euclidean).unwrap();
        for &p in &m.prototypes {
            assert_eq!(m.cost[p], 0.0);
            assert_eq!(m.predecessor[p], None);
        }
        assert_eq!(m.out_label, vec![0, 0, 1, 1]);
    }

    #[test]
    fn nearer_prototype_wins() {
        let ds = line(&[(0.0, 0), (10.0, 1)]);
        let m = fit(&ds, &Euclidean).unwrap();
        let c = m.classify(&[2.0], &Euclidean);
        assert_eq!(c.label, 0);
        assert_eq!(c.conqueror, 0);
        assert_eq!(c.cost, 2.0);
    }

    #[test]
    fn training_point_is_offered_its_own_cost() {
        let ds = line(&[(0.0, 0), (1.0, 0), (2.5, 0), (5.0, 1), (6.0, 1)]);
        let m = fit(&ds, &Euclidean).unwrap();
        for i in 0..ds.len() {
            let c = m.classify(ds.row(i), &Euclidean);
            assert!(c.cost <= m.cost[i]);
            assert_eq!(c.label, m.out_label[i]);
        }
    }

    #[test]
    fn bad_prototype_index_rejected() {
        let ds = line(&[(0.0, 0), (1.0, 1)]);
        assert!(train(&ds, &[5], &Euclidean).is_err());
        assert!(train(&ds, &[], &Euclidean).is_err());
    }
}
