//! Graph-theoretic distance baselines and the dense exact-resistance oracle.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use nalgebra::DMatrix;

use crate::graph::Graph;
use crate::{Error, Result};

/// Distances from a single source vertex.
#[derive(Debug, Clone)]
pub struct DistanceVector {
    pub source: usize,
    pub dist: Vec<f64>,
}

/// Hop-count distances (weights ignored).
pub fn bfs_distances(g: &Graph, source: usize) -> DistanceVector {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut queue = VecDeque::new();
    dist[source] = 0.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if dist[u].is_infinite() {
                dist[u] = dist[v] + 1.0;
                queue.push_back(u);
            }
        }
    }
    DistanceVector { source, dist }
}

/// Weighted shortest-path distances.
pub fn dijkstra_distances(g: &Graph, source: usize) -> DistanceVector {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap: BinaryHeap<Reverse<(ordered::F64, usize)>> = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((ordered::F64(0.0), source)));
    while let Some(Reverse((ordered::F64(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            let cand = d + w;
            if cand < dist[u] {
                dist[u] = cand;
                heap.push(Reverse((ordered::F64(cand), u)));
            }
        }
    }
    DistanceVector { source, dist }
}

/// Single-source shortest-path distances, using BFS when all weights are 1.
pub fn shortest_path_distances(g: &Graph, source: usize) -> DistanceVector {
    if g.has_unit_weights() {
        bfs_distances(g, source)
    } else {
        dijkstra_distances(g, source)
    }
}

/// All-pairs shortest-path matrix; intended for desk-scale graphs.
pub fn all_pairs_shortest(g: &Graph) -> Vec<Vec<f64>> {
    (0..g.vertex_count())
        .map(|s| shortest_path_distances(g, s).dist)
        .collect()
}

pub const DEFAULT_RESISTANCE_CAP: usize = 2000;

/// Exact resistance distance matrix from a dense eigendecomposition of the
/// Laplacian, with eigenvalues below `1e-9 * lambda_max` treated as zero.
///
/// This is a testing oracle; graphs above `cap` vertices are rejected.
pub fn exact_resistance_matrix(g: &Graph, cap: usize) -> Result<Vec<Vec<f64>>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::LimitExceeded(format!(
            "resistance oracle limited to {cap} vertices, got {n}"
        )));
    }
    let l = g.laplacian();
    let mut dense = DMatrix::zeros(n, n);
    for i in 0..n {
        let (cols, vals) = l.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            dense[(i, j)] = v;
        }
    }
    let eig = dense.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-9 * lambda_max;
    // Pseudoinverse via U diag(1/lambda) U^T with the zero mode dropped,
    // then r_ij = Lp_ii + Lp_jj - 2 Lp_ij.
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let factor = if lambda <= cutoff { 0.0 } else { 1.0 / lambda };
        scaled.column_mut(k).scale_mut(factor);
    }
    let pinv = &scaled * eig.eigenvectors.transpose();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            r[i][j] = (pinv[(i, i)] + pinv[(j, j)] - 2.0 * pinv[(i, j)]).max(0.0);
        }
    }
    Ok(r)
}

/// Total-order wrapper for finite f64 keys in the Dijkstra heap.
mod ordered {
    #[derive(PartialEq, Clone, Copy)]
    pub struct F64(pub f64);
    impl Eq for F64 {}
    impl PartialOrd for F64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for F64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}
