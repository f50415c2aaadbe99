//! Undirected weighted graphs: ingestion, generators, component extraction,
//! and Laplacian construction.
//!
//! Vertex ids are dense integers `0..n-1`. Edge weights are interpreted as
//! conductances, so parallel edges merge by summing weights and the Laplacian
//! is the standard `L = D - A` with weighted adjacency.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::SparseSymmetricMatrix;
use crate::{Error, Result};

/// A single undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected weighted graph with contiguous vertex ids.
///
/// Invariants: no self-loops, no duplicate edges, strictly positive weights.
/// Construction normalizes input (drops self-loops, merges parallel edges by
/// weight summation, compacts ids) so every held `Graph` satisfies them.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph from raw `(u, v, weight)` entries.
    ///
    /// Missing weights default to 1.0. Self-loops are dropped, parallel edges
    /// merge by summing weights, and vertex ids are compacted to `0..n-1`
    /// preserving first-appearance order. Non-positive weights and an empty
    /// edge list are rejected.
    pub fn from_edge_list(edges: &[(usize, usize, Option<f64>)]) -> Result<Graph> {
        Self::from_edge_list_with_labels(edges).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edge_list`] but also returns the original id for
    /// each compacted vertex (`labels[new_id] = original_id`).
    pub fn from_edge_list_with_labels(
        edges: &[(usize, usize, Option<f64>)],
    ) -> Result<(Graph, Vec<usize>)> {
        if edges.is_empty() {
            return Err(Error::InvalidInput("empty edge list".into()));
        }
        let mut id_map: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut compact = |raw: usize, labels: &mut Vec<usize>| -> usize {
            *id_map.entry(raw).or_insert_with(|| {
                labels.push(raw);
                labels.len() - 1
            })
        };
        let mut merged: HashMap<(usize, usize), f64> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (line, &(raw_u, raw_v, w)) in edges.iter().enumerate() {
            let w = w.unwrap_or(1.0);
            if !(w > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "non-positive weight {} on edge {} ({}, {})",
                    w, line, raw_u, raw_v
                )));
            }
            let u = compact(raw_u, &mut labels);
            let v = compact(raw_v, &mut labels);
            if u == v {
                continue; // self-loop
            }
            let key = (u.min(v), u.max(v));
            match merged.entry(key) {
                std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(w);
                    order.push(key);
                }
            }
        }
        let n = labels.len();
        let edge_vec: Vec<Edge> = order
            .iter()
            .map(|&(u, v)| Edge { u, v, w: merged[&(u, v)] })
            .collect();
        Ok((Graph::from_normalized(n, edge_vec), labels))
    }

    /// Internal constructor for edges already satisfying the invariants.
    fn from_normalized(n: usize, edges: Vec<Edge>) -> Graph {
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Graph { n, edges, adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Weighted degree (sum of incident edge weights).
    pub fn degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, w)| w).sum()
    }

    /// Total edge weight.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.component_of(0).len() == self.n
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        let mut members = Vec::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &(u, _) in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        members
    }

    /// Extracts the largest connected component.
    ///
    /// Ties are broken in favor of the component containing the smallest
    /// vertex id. Returns the sub-graph and the old-to-new id map (`None` for
    /// vertices outside the kept component). Kept vertices stay in ascending
    /// id order.
    pub fn largest_connected_component(&self) -> (Graph, Vec<Option<usize>>) {
        let mut best: Option<Vec<usize>> = None;
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let comp = self.component_of(start);
            for &v in &comp {
                seen[v] = true;
            }
            // Components are discovered in order of their minimum vertex id,
            // so a strict size comparison implements the tie-break.
            let better = match &best {
                Some(b) => comp.len() > b.len(),
                None => true,
            };
            if better {
                best = Some(comp);
            }
        }
        let mut members = best.unwrap_or_default();
        members.sort_unstable();
        let mut map = vec![None; self.n];
        for (new, &old) in members.iter().enumerate() {
            map[old] = Some(new);
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (map[e.u], map[e.v]) {
                (Some(u), Some(v)) => Some(Edge { u: u.min(v), v: u.max(v), w: e.w }),
                _ => None,
            })
            .collect();
        (Graph::from_normalized(members.len(), edges), map)
    }

    /// Graph Laplacian `L = D - A` in compressed sparse row form.
    pub fn laplacian(&self) -> SparseSymmetricMatrix {
        let mut triplets = Vec::with_capacity(self.n + 2 * self.edges.len());
        for v in 0..self.n {
            triplets.push((v, v, self.degree(v)));
        }
        for e in &self.edges {
            triplets.push((e.u, e.v, -e.w));
            triplets.push((e.v, e.u, -e.w));
        }
        SparseSymmetricMatrix::from_triplets(self.n, &triplets)
            .expect("Laplacian triplets are well-formed by construction")
    }

    // ---- generators ----

    pub fn path(n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::InvalidInput("path requires n >= 2".into()));
        }
        let edges = (0..n - 1).map(|i| Edge { u: i, v: i + 1, w: 1.0 }).collect();
        Ok(Graph::from_normalized(n, edges))
    }

    /// Path graph with explicit edge weights (`weights[i]` joins `i` and `i+1`).
    pub fn weighted_path(weights: &[f64]) -> Result<Graph> {
        let raw: Vec<_> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i, i + 1, Some(w)))
            .collect();
        Graph::from_edge_list(&raw)
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidInput("cycle requires n >= 3".into()));
        }
        let edges = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                Edge { u: i.min(j), v: i.max(j), w: 1.0 }
            })
            .collect();
        Ok(Graph::from_normalized(n, edges))
    }

    pub fn complete(n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::InvalidInput("complete graph requires n >= 2".into()));
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push(Edge { u, v, w: 1.0 });
            }
        }
        Ok(Graph::from_normalized(n, edges))
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(Error::InvalidInput("grid requires at least two vertices".into()));
        }
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push(Edge { u: id(r, c), v: id(r, c + 1), w: 1.0 });
                }
                if r + 1 < rows {
                    edges.push(Edge { u: id(r, c), v: id(r + 1, c), w: 1.0 });
                }
            }
        }
        Ok(Graph::from_normalized(rows * cols, edges))
    }

    /// Binomial tree of the given order: 2^order vertices, 2^order - 1 edges.
    pub fn binomial_tree(order: u32) -> Result<Graph> {
        if order > 24 {
            return Err(Error::InvalidInput("binomial tree order too large".into()));
        }
        let n = 1usize << order;
        let mut edges = Vec::with_capacity(n - 1);
        // B_k is two copies of B_{k-1} with their roots (vertex 0 and the
        // first vertex of the second copy) joined.
        for k in 0..order {
            let offset = 1usize << k;
            let existing = edges.len();
            for i in 0..existing {
                let Edge { u, v, w } = edges[i];
                edges.push(Edge { u: u + offset, v: v + offset, w });
            }
            edges.push(Edge { u: 0, v: offset, w: 1.0 });
        }
        Ok(Graph::from_normalized(n, edges))
    }

    /// Planted-partition random graph: `clusters` groups of `cluster_size`
    /// vertices, edge probability `p_in` within a group and `p_out` across.
    ///
    /// Resamples with derived seeds until the graph is connected; fails after
    /// a bounded number of attempts rather than returning a disconnected
    /// graph.
    pub fn random_partition(
        clusters: usize,
        cluster_size: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    ) -> Result<Graph> {
        if clusters == 0 || cluster_size == 0 || clusters * cluster_size < 2 {
            return Err(Error::InvalidInput("random_partition requires at least two vertices".into()));
        }
        if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
            return Err(Error::InvalidInput("edge probabilities must lie in [0, 1]".into()));
        }
        const MAX_ATTEMPTS: u64 = 50;
        let n = clusters * cluster_size;
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    let p = if u / cluster_size == v / cluster_size { p_in } else { p_out };
                    if rng.random::<f64>() < p {
                        edges.push(Edge { u, v, w: 1.0 });
                    }
                }
            }
            let g = Graph::from_normalized(n, edges);
            if g.is_connected() {
                return Ok(g);
            }
        }
        Err(Error::Numerical(format!(
            "random_partition({clusters}, {cluster_size}, {p_in}, {p_out}) failed to \
             produce a connected graph after {MAX_ATTEMPTS} attempts"
        )))
    }

    /// Planted cluster label of a `random_partition` vertex.
    pub fn partition_label(vertex: usize, cluster_size: usize) -> usize {
        vertex / cluster_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edge_list_defaults_to_unit_weights() {
        let g = Graph::from_edge_list(&[(0, 1, None), (1, 2, None)]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.edges().iter().all(|e| e.w == 1.0));
    }

    #[test]
    fn parallel_edges_merge_by_weight_sum() {
        let g = Graph::from_edge_list(&[(0, 1, Some(2.0)), (0, 1, Some(3.0))]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].w, 5.0);
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = Graph::from_edge_list(&[(0, 0, None), (0, 1, None)]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_non_positive_weight_and_empty_list() {
        let err = Graph::from_edge_list(&[(0, 1, Some(0.0))]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        assert!(Graph::from_edge_list(&[]).is_err());
    }

    #[test]
    fn compaction_preserves_first_appearance_order() {
        let (g, labels) = Graph::from_edge_list_with_labels(&[(7, 3, None), (3, 9, None)]).unwrap();
        assert_eq!(labels, vec![7, 3, 9]);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn lcc_keeps_largest_component() {
        // P3 plus a separate K2.
        let g = Graph::from_edge_list(&[(0, 1, None), (1, 2, None), (10, 11, None)]).unwrap();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc.vertex_count(), 3);
        assert_eq!(map[0], Some(0));
        assert_eq!(map[3], None);
    }

    #[test]
    fn lcc_tie_break_prefers_smallest_vertex_id() {
        let g = Graph::from_edge_list(&[
            (0, 1, None),
            (1, 2, None),
            (0, 2, None),
            (5, 6, None),
            (6, 7, None),
            (5, 7, None),
        ])
        .unwrap();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc.vertex_count(), 3);
        assert_eq!(map[0], Some(0));
        assert_eq!(map[5], None);
    }

    #[test]
    fn lcc_is_identity_on_connected_graphs() {
        let g = Graph::path(3).unwrap();
        let (lcc, map) = g.largest_connected_component();
        assert_eq!(lcc.vertex_count(), 3);
        assert_eq!(map, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn laplacian_of_p3() {
        let g = Graph::path(3).unwrap();
        let l = g.laplacian();
        let expect = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), expect[i][j], "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn laplacian_of_single_weighted_edge() {
        let g = Graph::from_edge_list(&[(0, 1, Some(5.0))]).unwrap();
        let l = g.laplacian();
        assert_eq!(l.get(0, 0), 5.0);
        assert_eq!(l.get(0, 1), -5.0);
    }

    #[test]
    fn laplacian_of_k3() {
        let g = Graph::complete(3).unwrap();
        let l = g.laplacian();
        for i in 0..3 {
            assert_eq!(l.get(i, i), 2.0);
            for j in 0..3 {
                if i != j {
                    assert_eq!(l.get(i, j), -1.0);
                }
            }
        }
    }

    #[test]
    fn binomial_tree_13_has_expected_size() {
        let g = Graph::binomial_tree(13).unwrap();
        assert_eq!(g.vertex_count(), 8192);
        assert_eq!(g.edge_count(), 8191);
        assert!(g.is_connected());
    }

    #[test]
    fn complete_4_has_six_edges() {
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
    }

    #[test]
    fn random_partition_disconnected_fails() {
        // p_out = 0 with two fully-connected clusters can never be connected.
        let err = Graph::random_partition(2, 3, 1.0, 0.0, 42).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn random_partition_is_deterministic_per_seed() {
        let a = Graph::random_partition(3, 10, 0.5, 0.05, 7).unwrap();
        let b = Graph::random_partition(3, 10, 0.5, 0.05, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
    }
}
