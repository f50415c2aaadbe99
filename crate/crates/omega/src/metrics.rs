//! Layout faithfulness metrics: stress ratio against a reference optimum,
//! Jaccard k-NN neighborhood preservation, and the clustering-quality
//! pipeline (greedy modularity ground truth, agglomerative layout
//! clustering, Fowlkes-Mallows score).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::distances::shortest_path_distances;
use crate::graph::Graph;
use crate::layout::{
    all_pairs_set, full_sgd_layout, stress, stress_majorization, FullSgdInit, Layout2D, Metric,
    ScheduleParams,
};
use crate::{Error, Result};

/// A hard partition of the vertex set into `k` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    /// Builds an assignment from arbitrary labels, compacting them to
    /// `0..k-1` in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> ClusterAssignment {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &l in raw {
            let next = remap.len();
            labels.push(*remap.entry(l).or_insert(next));
        }
        ClusterAssignment { k: remap.len(), labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Ratio of achieved stress to a known reference optimum.
pub fn stress_ratio(achieved: f64, reference: f64) -> Result<f64> {
    if reference <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "stress ratio needs a positive reference, got {reference}"
        )));
    }
    Ok(achieved / reference)
}

fn k_nearest(dist: &[f64], center: usize, k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..dist.len()).filter(|&v| v != center).collect();
    ids.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    ids.truncate(k);
    ids
}

/// Mean Jaccard overlap between graph-space and layout-space k-nearest
/// neighbor sets. Graph space uses shortest-path distance; ties in either
/// space break by ascending vertex id.
pub fn neighborhood_preservation(g: &Graph, layout: &Layout2D, k: usize) -> Result<f64> {
    let n = g.vertex_count();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "neighborhood size k={k} must satisfy 1 <= k < n={n}"
        )));
    }
    let mut total = 0.0;
    for v in 0..n {
        let graph_dist = shortest_path_distances(g, v).dist;
        let layout_dist: Vec<f64> = (0..n).map(|u| layout.distance(v, u)).collect();
        let a = k_nearest(&graph_dist, v, k);
        let b = k_nearest(&layout_dist, v, k);
        let inter = a.iter().filter(|x| b.contains(x)).count();
        total += inter as f64 / (2 * k - inter) as f64;
    }
    Ok(total / n as f64)
}

/// Weighted Newman modularity of an assignment.
pub fn modularity(g: &Graph, assignment: &ClusterAssignment) -> f64 {
    let m = g.total_weight();
    if m <= 0.0 {
        return 0.0;
    }
    let labels = assignment.labels();
    let mut internal = vec![0.0f64; assignment.cluster_count()];
    let mut tot = vec![0.0f64; assignment.cluster_count()];
    for e in g.edges() {
        if labels[e.u] == labels[e.v] {
            internal[labels[e.u]] += e.w;
        }
        tot[labels[e.u]] += e.w;
        tot[labels[e.v]] += e.w;
    }
    internal
        .iter()
        .zip(&tot)
        .map(|(&win, &wtot)| win / m - (wtot / (2.0 * m)).powi(2))
        .sum()
}

/// Greedy agglomerative modularity maximization (Clauset-Newman-Moore
/// style): start from singleton communities and repeatedly apply the merge
/// with the largest positive modularity gain. Ties break toward the
/// lexicographically smallest community-id pair; the merged community keeps
/// the smaller id, so the procedure is deterministic.
pub fn greedy_modularity(g: &Graph) -> Result<ClusterAssignment> {
    if !g.is_connected() {
        return Err(Error::InvalidInput(
            "greedy modularity requires a connected graph".into(),
        ));
    }
    let n = g.vertex_count();
    let m = g.total_weight();
    let mut community: Vec<usize> = (0..n).collect();
    // Between-community weight, keyed by (smaller id, larger id).
    let mut between: HashMap<(usize, usize), f64> = HashMap::new();
    let mut tot = vec![0.0f64; n];
    for e in g.edges() {
        *between.entry((e.u, e.v)).or_insert(0.0) += e.w;
        tot[e.u] += e.w;
        tot[e.v] += e.w;
    }
    loop {
        // Only adjacent community pairs can have positive gain.
        let mut keys: Vec<(usize, usize)> = between.keys().copied().collect();
        keys.sort_unstable();
        let mut best: Option<((usize, usize), f64)> = None;
        for key in keys {
            let (a, b) = key;
            let gain = between[&key] / m - tot[a] * tot[b] / (2.0 * m * m);
            if best.map_or(true, |(_, g0)| gain > g0) {
                best = Some((key, gain));
            }
        }
        let Some(((a, b), gain)) = best else { break };
        if gain <= 1e-12 {
            break;
        }
        // Merge b into a (a < b by key construction).
        tot[a] += tot[b];
        tot[b] = 0.0;
        for c in &mut community {
            if *c == b {
                *c = a;
            }
        }
        let moved: Vec<((usize, usize), f64)> = between
            .iter()
            .filter(|((x, y), _)| *x == b || *y == b)
            .map(|(&k, &w)| (k, w))
            .collect();
        for ((x, y), w) in moved {
            between.remove(&(x, y));
            let other = if x == b { y } else { x };
            if other != a {
                *between.entry((other.min(a), other.max(a))).or_insert(0.0) += w;
            }
        }
    }
    Ok(ClusterAssignment::from_labels(&community))
}

/// Linkage rule for agglomerative clustering of layout coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Ward,
    Single,
    Complete,
}

/// Hierarchical agglomerative clustering of layout coordinates, cut at `k`
/// clusters. Merge ties break toward the lexicographically smallest
/// cluster-id pair; merged clusters keep the smaller id.
pub fn agglomerative_clustering_with_linkage(
    layout: &Layout2D,
    k: usize,
    linkage: Linkage,
) -> Result<ClusterAssignment> {
    let n = layout.vertex_count();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "cluster count k={k} must satisfy 1 <= k <= n={n}"
        )));
    }
    // Lance-Williams updates over a dense dissimilarity matrix. Ward starts
    // from squared distances; single/complete from plain distances.
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let dist = layout.distance(i, j);
            let v = if linkage == Linkage::Ward { dist * dist } else { dist };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    let mut active = vec![true; n];
    let mut size = vec![1.0f64; n];
    let mut cluster: Vec<usize> = (0..n).collect();
    for _ in 0..n - k {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if !active[j] {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| d[i][j] < d[bi][bj]) {
                    best = Some((i, j));
                }
            }
        }
        let (a, b) = best.expect("at least two active clusters remain");
        for x in 0..n {
            if !active[x] || x == a || x == b {
                continue;
            }
            let updated = match linkage {
                Linkage::Single => d[a][x].min(d[b][x]),
                Linkage::Complete => d[a][x].max(d[b][x]),
                Linkage::Ward => {
                    let (na, nb, nx) = (size[a], size[b], size[x]);
                    ((na + nx) * d[a][x] + (nb + nx) * d[b][x] - nx * d[a][b])
                        / (na + nb + nx)
                }
            };
            d[a][x] = updated;
            d[x][a] = updated;
        }
        size[a] += size[b];
        active[b] = false;
        for c in &mut cluster {
            if *c == b {
                *c = a;
            }
        }
    }
    Ok(ClusterAssignment::from_labels(&cluster))
}

/// [`agglomerative_clustering_with_linkage`] with Ward linkage.
pub fn agglomerative_layout_clustering(layout: &Layout2D, k: usize) -> Result<ClusterAssignment> {
    agglomerative_clustering_with_linkage(layout, k, Linkage::Ward)
}

/// Pair-counting Fowlkes-Mallows similarity `TP / sqrt((TP+FP)(TP+FN))`,
/// defined as 0 when either factor of the denominator is 0.
pub fn fowlkes_mallows(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "assignment lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let choose2 = |c: f64| c * (c - 1.0) / 2.0;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut in_a = vec![0.0f64; a.cluster_count()];
    let mut in_b = vec![0.0f64; b.cluster_count()];
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        *joint.entry((la, lb)).or_insert(0.0) += 1.0;
        in_a[la] += 1.0;
        in_b[lb] += 1.0;
    }
    let tp: f64 = joint.values().map(|&c| choose2(c)).sum();
    let same_a: f64 = in_a.iter().map(|&c| choose2(c)).sum();
    let same_b: f64 = in_b.iter().map(|&c| choose2(c)).sum();
    if same_a == 0.0 || same_b == 0.0 {
        return Ok(0.0);
    }
    Ok(tp / (same_a * same_b).sqrt())
}

/// Reference near-optimal layout: full-pair SGD for 1000 iterations followed
/// by stress majorization to convergence. Returns the layout and its stress
/// over all pairs.
pub fn reference_optimum(g: &Graph, metric: &Metric, seed: u64) -> Result<(Layout2D, f64)> {
    let schedule = ScheduleParams { iterations: 1000, eps: 0.1 };
    let sgd = full_sgd_layout(g, metric, &schedule, seed, FullSgdInit::MetricDefault)?;
    let pairs = all_pairs_set(g, metric)?;
    let refined = stress_majorization(&sgd, &pairs, 1e-7, 500);
    let value = stress(&refined, &pairs);
    Ok((refined, value))
}

/// One metric evaluation, serialized into experiment reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRecord {
    pub graph: String,
    pub metric_params: serde_json::Value,
    pub value: f64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stress_ratio_examples() {
        assert_eq!(stress_ratio(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(stress_ratio(3.0, 2.0).unwrap(), 1.5);
        assert_eq!(stress_ratio(0.0, 2.0).unwrap(), 0.0);
        assert!(stress_ratio(1.0, 0.0).is_err());
    }

    #[test]
    fn neighborhood_preservation_is_one_for_isometric_line() {
        let g = Graph::path(6).unwrap();
        let layout = Layout2D::new((0..6).map(|i| [i as f64, 0.0]).collect());
        assert_eq!(neighborhood_preservation(&g, &layout, 2).unwrap(), 1.0);
        // Reversing the line is also isometric.
        let rev = Layout2D::new((0..6).map(|i| [-(i as f64), 0.0]).collect());
        assert_eq!(neighborhood_preservation(&g, &rev, 2).unwrap(), 1.0);
    }

    #[test]
    fn neighborhood_preservation_matches_brute_force_on_scrambled_path() {
        let g = Graph::path(4).unwrap();
        let layout = Layout2D::new(vec![[0.0, 0.0], [3.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let got = neighborhood_preservation(&g, &layout, 1).unwrap();
        // Brute-force oracle, independent of k_nearest.
        let sp = crate::distances::all_pairs_shortest(&g);
        let mut total = 0.0;
        for v in 0..4 {
            let nn = |dist: &dyn Fn(usize) -> f64| {
                (0..4)
                    .filter(|&u| u != v)
                    .min_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)))
                    .unwrap()
            };
            let a = nn(&|u| sp[v][u]);
            let b = nn(&|u| layout.distance(v, u));
            total += if a == b { 1.0 } else { 0.0 };
        }
        assert!((got - total / 4.0).abs() < 1e-15);
    }

    #[test]
    fn neighborhood_preservation_is_one_at_full_k() {
        let g = Graph::cycle(7).unwrap();
        let layout = Layout2D::random_unit_square(7, 3);
        assert_eq!(neighborhood_preservation(&g, &layout, 6).unwrap(), 1.0);
    }

    #[test]
    fn greedy_modularity_splits_bridged_triangles() {
        let g = Graph::from_edge_list(&[
            (0, 1, None),
            (0, 2, None),
            (1, 2, None),
            (3, 4, None),
            (3, 5, None),
            (4, 5, None),
            (2, 3, None),
        ])
        .unwrap();
        let c = greedy_modularity(&g).unwrap();
        assert_eq!(c.cluster_count(), 2);
        let l = c.labels();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[1], l[2]);
        assert_eq!(l[3], l[4]);
        assert_eq!(l[4], l[5]);
        assert_ne!(l[0], l[3]);
    }

    #[test]
    fn greedy_modularity_keeps_k4_whole() {
        let g = Graph::complete(4).unwrap();
        let c = greedy_modularity(&g).unwrap();
        assert_eq!(c.cluster_count(), 1);
    }

    #[test]
    fn greedy_modularity_recovers_planted_partition() {
        let g = Graph::random_partition(3, 10, 0.9, 0.01, 4).unwrap();
        let c = greedy_modularity(&g).unwrap();
        let planted: Vec<usize> = (0..30).map(|v| Graph::partition_label(v, 10)).collect();
        let p = ClusterAssignment::from_labels(&planted);
        assert_eq!(c.cluster_count(), 3);
        assert_eq!(fowlkes_mallows(&c, &p).unwrap(), 1.0);
    }

    #[test]
    fn greedy_modularity_rejects_disconnected() {
        let g = Graph::from_edge_list(&[(0, 1, None), (2, 3, None)]).unwrap();
        assert!(greedy_modularity(&g).is_err());
    }

    #[test]
    fn agglomerative_trivial_cuts() {
        let layout = Layout2D::random_unit_square(5, 1);
        let singles = agglomerative_layout_clustering(&layout, 5).unwrap();
        assert_eq!(singles.cluster_count(), 5);
        let whole = agglomerative_layout_clustering(&layout, 1).unwrap();
        assert_eq!(whole.cluster_count(), 1);
        assert!(whole.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn agglomerative_separates_distant_clouds() {
        let mut coords = Vec::new();
        for i in 0..4 {
            coords.push([i as f64 * 0.1, 0.0]);
        }
        for i in 0..4 {
            coords.push([100.0 + i as f64 * 0.1, 0.05]);
        }
        let layout = Layout2D::new(coords);
        for linkage in [Linkage::Ward, Linkage::Single, Linkage::Complete] {
            let c = agglomerative_clustering_with_linkage(&layout, 2, linkage).unwrap();
            let l = c.labels();
            assert!(l[..4].iter().all(|&x| x == l[0]));
            assert!(l[4..].iter().all(|&x| x == l[4]));
            assert_ne!(l[0], l[4]);
        }
    }

    #[test]
    fn fowlkes_mallows_examples() {
        let a = ClusterAssignment::from_labels(&[0, 0, 1]);
        assert_eq!(fowlkes_mallows(&a, &a).unwrap(), 1.0);

        let b = ClusterAssignment::from_labels(&[0, 1, 1]);
        assert_eq!(fowlkes_mallows(&a, &b).unwrap(), 0.0);

        let singles = ClusterAssignment::from_labels(&[0, 1, 2]);
        assert_eq!(fowlkes_mallows(&singles, &a).unwrap(), 0.0);
        assert_eq!(fowlkes_mallows(&a, &singles).unwrap(), 0.0);

        // Symmetry on a non-trivial pair.
        let c = ClusterAssignment::from_labels(&[0, 0, 1, 1, 2]);
        let d = ClusterAssignment::from_labels(&[0, 1, 1, 0, 0]);
        assert_eq!(
            fowlkes_mallows(&c, &d).unwrap(),
            fowlkes_mallows(&d, &c).unwrap()
        );

        let short = ClusterAssignment::from_labels(&[0, 0]);
        assert!(fowlkes_mallows(&a, &short).is_err());
    }

    #[test]
    fn reference_optimum_on_two_nodes_is_exact() {
        let g = Graph::path(2).unwrap();
        let (_, s) = reference_optimum(&g, &Metric::ShortestPath, 0).unwrap();
        assert!(s < 1e-20, "stress {s}");
    }

    #[test]
    fn reference_optimum_is_stable_across_seeds() {
        let g = Graph::path(4).unwrap();
        let values: Vec<f64> = (0..5)
            .map(|s| reference_optimum(&g, &Metric::ShortestPath, s).unwrap().1)
            .collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(0.0f64, f64::max);
        // The optimum for a path is exactly zero, so all runs should land
        // within the majorization tolerance of zero.
        assert!(hi <= lo * 1.01 + 1e-6, "unstable references: {values:?}");
    }

    #[test]
    fn metric_record_round_trips() {
        let rec = MetricRecord {
            graph: "grid(3,4)".into(),
            metric_params: serde_json::json!({"k": 10}),
            value: 0.5,
            seed: 7,
            wall_time_ms: 1.25,
        };
        let text = serde_json::to_string(&rec).unwrap();
        let back: MetricRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.graph, rec.graph);
        assert_eq!(back.value, rec.value);
    }
}
