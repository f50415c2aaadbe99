//! Stress model assembly and optimization: pair-set construction (random and
//! pivot-based), ideal distances with the minimum-distance floor, SGD with an
//! annealing schedule, full-pair SGD, and stress majorization.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distances::shortest_path_distances;
use crate::graph::Graph;
use crate::rdmds::{compute_embedding, SpectralEmbedding};
use crate::{Error, Result};

/// Largest vertex count for which all-pair enumeration is allowed.
pub const FULL_PAIR_VERTEX_CAP: usize = 5000;

/// A sampled constraint: canonical `i < j`, ideal distance `delta`, weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePair {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
    pub weight: f64,
}

/// Deduplicated list of node pairs.
#[derive(Debug, Clone)]
pub struct PairSet {
    pairs: Vec<NodePair>,
}

impl PairSet {
    pub fn new(pairs: Vec<NodePair>) -> Self {
        PairSet { pairs }
    }

    pub fn pairs(&self) -> &[NodePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.pairs.iter().any(|p| (p.i, p.j) == key)
    }

    /// Minimum and maximum pair weight.
    pub fn weight_range(&self) -> (f64, f64) {
        let mut w_min = f64::INFINITY;
        let mut w_max = 0.0f64;
        for p in &self.pairs {
            w_min = w_min.min(p.weight);
            w_max = w_max.max(p.weight);
        }
        (w_min, w_max)
    }
}

/// 2D layout coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout2D {
    coords: Vec<[f64; 2]>,
}

impl Layout2D {
    pub fn new(coords: Vec<[f64; 2]>) -> Self {
        Layout2D { coords }
    }

    /// First two embedding columns, the aspect-ratio balanced spectral
    /// drawing.
    pub fn from_embedding(e: &SpectralEmbedding) -> Result<Layout2D> {
        if e.dimension() < 2 {
            return Err(Error::InvalidInput(
                "2D initialization needs an embedding of dimension >= 2".into(),
            ));
        }
        let coords = (0..e.vertex_count())
            .map(|i| {
                let row = e.row(i);
                [row[0], row[1]]
            })
            .collect();
        Ok(Layout2D { coords })
    }

    /// Seeded uniform layout in the unit square.
    pub fn random_unit_square(n: usize, seed: u64) -> Layout2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n)
            .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        Layout2D { coords }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn position(&self, i: usize) -> [f64; 2] {
        self.coords[i]
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn set_position(&mut self, i: usize, p: [f64; 2]) {
        self.coords[i] = p;
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }
}

/// Ideal-distance metric for pair construction and stress evaluation.
#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    /// Graph-theoretic shortest-path distance.
    ShortestPath,
    /// Low-rank resistance distance from a precomputed embedding, floored at
    /// `min_distance`.
    Resistance {
        embedding: &'a SpectralEmbedding,
        min_distance: f64,
    },
}

impl Metric<'_> {
    /// Distances from `source` to every vertex under this metric (no floor).
    fn row(&self, g: &Graph, source: usize) -> Vec<f64> {
        match self {
            Metric::ShortestPath => shortest_path_distances(g, source).dist,
            Metric::Resistance { embedding, .. } => (0..g.vertex_count())
                .map(|j| embedding.distance(source, j))
                .collect(),
        }
    }

    fn floor(&self) -> f64 {
        match self {
            Metric::ShortestPath => 0.0,
            Metric::Resistance { min_distance, .. } => *min_distance,
        }
    }
}

/// Stress of a layout against a pair set: sum of `w (||p_i - p_j|| - delta)^2`.
pub fn stress(layout: &Layout2D, pairs: &PairSet) -> f64 {
    pairs
        .pairs()
        .iter()
        .map(|p| {
            let diff = layout.distance(p.i, p.j) - p.delta;
            p.weight * diff * diff
        })
        .sum()
}

fn floored_pair(i: usize, j: usize, raw: f64, floor: f64) -> NodePair {
    let delta = raw.max(floor);
    NodePair { i: i.min(j), j: i.max(j), delta, weight: 1.0 / (delta * delta) }
}

/// Random node-pair sampling from a resistance-distance embedding: every
/// graph edge plus up to `h` uniform random partners per vertex (colliding
/// draws are simply dropped), with `delta = max(embedding distance, eps_d)`
/// and `w = delta^-2`.
pub fn build_pair_set_random(
    g: &Graph,
    embedding: &SpectralEmbedding,
    h: usize,
    min_distance: f64,
    seed: u64,
) -> PairSet {
    build_pair_set_random_metric(g, &Metric::Resistance { embedding, min_distance }, h, seed)
}

/// [`build_pair_set_random`] generalized over the ideal-distance metric.
pub fn build_pair_set_random_metric(g: &Graph, metric: &Metric, h: usize, seed: u64) -> PairSet {
    let n = g.vertex_count();
    let floor = metric.floor();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut sampled: Vec<(usize, usize)> = Vec::new();
    for e in g.edges() {
        if seen.insert((e.u, e.v)) {
            sampled.push((e.u, e.v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        for _ in 0..h {
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let key = (i.min(j), i.max(j));
            if seen.insert(key) {
                sampled.push(key);
            }
        }
    }
    // Group by first endpoint so shortest-path rows are computed once per
    // source.
    sampled.sort_unstable();
    let mut pairs = Vec::with_capacity(sampled.len());
    let mut current_row: Option<(usize, Vec<f64>)> = None;
    for (i, j) in sampled {
        let raw = match metric {
            Metric::Resistance { embedding, .. } => embedding.distance(i, j),
            Metric::ShortestPath => {
                if current_row.as_ref().map(|(s, _)| *s) != Some(i) {
                    current_row = Some((i, metric.row(g, i)));
                }
                current_row.as_ref().unwrap().1[j]
            }
        };
        pairs.push(floored_pair(i, j, raw, floor));
    }
    PairSet::new(pairs)
}

/// Pivot-based sparse sampling: `h` pivots chosen by max-min farthest-point
/// sampling (first pivot seeded randomly), pairing every vertex with every
/// pivot on top of the edge set. Returns the pair set and the chosen pivots.
///
/// With `adapted_weights`, vertex-pivot pairs get the sparse-stress region
/// weight `w_ip = s_p / delta_ip^2`, where `s_p` counts the vertices of
/// pivot `p`'s region at distance at most `delta_ip / 2` from `p`; otherwise
/// plain `delta^-2` is used. `h > n` is clamped to `n` with a warning.
pub fn build_pair_set_pivot(
    g: &Graph,
    metric: &Metric,
    h: usize,
    seed: u64,
    adapted_weights: bool,
) -> Result<(PairSet, Vec<usize>)> {
    let n = g.vertex_count();
    let h = if h > n {
        eprintln!("warning: pivot count {h} exceeds vertex count {n}; clamping");
        n
    } else {
        h
    };
    let floor = metric.floor();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pivots = Vec::with_capacity(h);
    let mut pivot_rows: Vec<Vec<f64>> = Vec::with_capacity(h);
    let mut min_dist = vec![f64::INFINITY; n];
    if h > 0 {
        let first = rng.random_range(0..n);
        pivots.push(first);
        pivot_rows.push(metric.row(g, first));
        for (v, &d) in pivot_rows[0].iter().enumerate() {
            min_dist[v] = d;
        }
        while pivots.len() < h {
            // Farthest vertex from the current pivot set; ties to smaller id.
            let mut best = 0;
            for v in 1..n {
                if min_dist[v] > min_dist[best] {
                    best = v;
                }
            }
            pivots.push(best);
            let row = metric.row(g, best);
            for (v, &d) in row.iter().enumerate() {
                if d < min_dist[v] {
                    min_dist[v] = d;
                }
            }
            pivot_rows.push(row);
        }
    }

    // Region of each pivot: vertices for which it is the nearest pivot
    // (ties to the earliest pivot), as sorted distance lists.
    let mut regions: Vec<Vec<f64>> = vec![Vec::new(); pivots.len()];
    if adapted_weights && !pivots.is_empty() {
        for v in 0..n {
            let mut owner = 0;
            for p in 1..pivots.len() {
                if pivot_rows[p][v] < pivot_rows[owner][v] {
                    owner = p;
                }
            }
            regions[owner].push(pivot_rows[owner][v]);
        }
        for r in &mut regions {
            r.sort_by(f64::total_cmp);
        }
    }

    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut pairs = Vec::new();
    // Edge distances under the shortest-path metric need per-source rows;
    // group edges by endpoint.
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    edges.sort_unstable();
    let mut current_row: Option<(usize, Vec<f64>)> = None;
    for (u, v) in edges {
        if !seen.insert((u, v)) {
            continue;
        }
        let raw = match metric {
            Metric::Resistance { embedding, .. } => embedding.distance(u, v),
            Metric::ShortestPath => {
                if current_row.as_ref().map(|(s, _)| *s) != Some(u) {
                    current_row = Some((u, metric.row(g, u)));
                }
                current_row.as_ref().unwrap().1[v]
            }
        };
        pairs.push(floored_pair(u, v, raw, floor));
    }
    for (p_idx, &p) in pivots.iter().enumerate() {
        for v in 0..n {
            if v == p {
                continue;
            }
            let key = (v.min(p), v.max(p));
            if !seen.insert(key) {
                continue;
            }
            let delta = pivot_rows[p_idx][v].max(floor);
            let weight = if adapted_weights {
                let half = delta / 2.0;
                let region = &regions[p_idx];
                let s = region.partition_point(|&d| d <= half).max(1);
                s as f64 / (delta * delta)
            } else {
                1.0 / (delta * delta)
            };
            pairs.push(NodePair { i: key.0, j: key.1, delta, weight });
        }
    }
    Ok((PairSet::new(pairs), pivots))
}

/// Every vertex pair under the given metric. Rejected above
/// [`FULL_PAIR_VERTEX_CAP`] vertices.
pub fn all_pairs_set(g: &Graph, metric: &Metric) -> Result<PairSet> {
    let n = g.vertex_count();
    if n > FULL_PAIR_VERTEX_CAP {
        return Err(Error::LimitExceeded(format!(
            "all-pair enumeration limited to {FULL_PAIR_VERTEX_CAP} vertices, got {n}"
        )));
    }
    let floor = metric.floor();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let row = metric.row(g, i);
        for j in i + 1..n {
            pairs.push(floored_pair(i, j, row[j], floor));
        }
    }
    Ok(PairSet::new(pairs))
}

/// Annealing schedule shape: number of SGD passes and terminal step fraction.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleParams {
    pub iterations: usize,
    pub eps: f64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams { iterations: 15, eps: 0.1 }
    }
}

/// Geometrically decreasing step sizes `tau_1 = 1/w_min` down to
/// `tau_T = eps/w_max` over the active pair set.
#[derive(Debug, Clone)]
pub struct AnnealingSchedule {
    steps: Vec<f64>,
}

impl AnnealingSchedule {
    pub fn from_pairs(params: &ScheduleParams, pairs: &PairSet) -> AnnealingSchedule {
        let (w_min, w_max) = pairs.weight_range();
        AnnealingSchedule::from_weight_range(params, w_min, w_max)
    }

    pub fn from_weight_range(params: &ScheduleParams, w_min: f64, w_max: f64) -> AnnealingSchedule {
        let t = params.iterations;
        if t == 0 {
            return AnnealingSchedule { steps: Vec::new() };
        }
        let tau_first = 1.0 / w_min;
        let tau_last = params.eps / w_max;
        if t == 1 {
            return AnnealingSchedule { steps: vec![tau_first] };
        }
        let rate = (tau_first / tau_last).ln() / (t - 1) as f64;
        let steps = (0..t).map(|k| tau_first * (-rate * k as f64).exp()).collect();
        AnnealingSchedule { steps }
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}

/// One SGD run: for each step size, a full pass over a freshly shuffled pair
/// list applying the capped displacement update. Deterministic per seed.
pub fn sgd_optimize(
    layout: &Layout2D,
    pairs: &PairSet,
    schedule: &AnnealingSchedule,
    seed: u64,
) -> Layout2D {
    let mut out = layout.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    for &tau in schedule.steps() {
        order.shuffle(&mut rng);
        for &idx in &order {
            let p = pairs.pairs()[idx];
            let mu = (p.weight * tau).min(1.0);
            let mut a = out.position(p.i);
            let b = out.position(p.j);
            let mut dx = a[0] - b[0];
            let mut dy = a[1] - b[1];
            let mut dist = (dx * dx + dy * dy).sqrt();
            if dist < 1e-12 {
                // Coincident endpoints: nudge one along a seeded random
                // direction so the displacement is defined.
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                a[0] += 1e-9 * angle.cos();
                a[1] += 1e-9 * angle.sin();
                dx = a[0] - b[0];
                dy = a[1] - b[1];
                dist = (dx * dx + dy * dy).sqrt();
            }
            let scale = mu * (dist - p.delta) / (2.0 * dist);
            let rx = scale * dx;
            let ry = scale * dy;
            out.set_position(p.i, [a[0] - rx, a[1] - ry]);
            out.set_position(p.j, [b[0] + rx, b[1] + ry]);
        }
    }
    out
}

/// Parameters of the sampled resistance-distance pipeline.
#[derive(Debug, Clone)]
pub struct OmegaParams {
    /// Random partner draws per vertex (`h`).
    pub samples_per_vertex: usize,
    /// Minimum ideal distance (`eps_d`).
    pub min_distance: f64,
    pub rdmds: crate::rdmds::RdmdsParams,
    pub schedule: ScheduleParams,
    pub rng_seed: u64,
}

impl Default for OmegaParams {
    fn default() -> Self {
        OmegaParams {
            samples_per_vertex: 50,
            min_distance: 0.01,
            rdmds: crate::rdmds::RdmdsParams::default(),
            schedule: ScheduleParams::default(),
            rng_seed: 0,
        }
    }
}

/// Full sampled pipeline: RDMDS embedding, random pair sampling, spectral 2D
/// initialization, then SGD refinement.
pub fn omega_layout(
    g: &Graph,
    params: &OmegaParams,
) -> Result<(Layout2D, SpectralEmbedding, PairSet)> {
    if !g.is_connected() {
        return Err(Error::InvalidInput("layout requires a connected graph".into()));
    }
    let embedding = compute_embedding(g, &params.rdmds)?;
    let pairs = build_pair_set_random(
        g,
        &embedding,
        params.samples_per_vertex,
        params.min_distance,
        params.rng_seed,
    );
    let initial = Layout2D::from_embedding(&embedding)?;
    let schedule = AnnealingSchedule::from_pairs(&params.schedule, &pairs);
    let final_layout = sgd_optimize(
        &initial,
        &pairs,
        &schedule,
        params.rng_seed.wrapping_add(0x9E37_79B9_7F4A_7C15),
    );
    Ok((final_layout, embedding, pairs))
}

/// Initialization rule for [`full_sgd_layout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullSgdInit {
    /// Embedding columns for the resistance metric, seeded random layout for
    /// shortest-path.
    MetricDefault,
    /// Seeded random layout regardless of metric (isolates metric effects).
    ForceRandom,
}

/// SGD over every vertex pair under the chosen metric.
pub fn full_sgd_layout(
    g: &Graph,
    metric: &Metric,
    schedule_params: &ScheduleParams,
    seed: u64,
    init: FullSgdInit,
) -> Result<Layout2D> {
    let pairs = all_pairs_set(g, metric)?;
    let initial = match (init, metric) {
        (FullSgdInit::MetricDefault, Metric::Resistance { embedding, .. }) => {
            Layout2D::from_embedding(embedding)?
        }
        _ => Layout2D::random_unit_square(g.vertex_count(), seed),
    };
    if pairs.is_empty() {
        return Ok(initial);
    }
    let schedule = AnnealingSchedule::from_pairs(schedule_params, &pairs);
    Ok(sgd_optimize(&initial, &pairs, &schedule, seed))
}

/// Stress majorization with localized Gauss-Seidel sweeps.
///
/// Stress is non-increasing across iterations; stops when the relative
/// decrease falls below `tol` or after `max_iter` sweeps.
pub fn stress_majorization(
    layout: &Layout2D,
    pairs: &PairSet,
    tol: f64,
    max_iter: usize,
) -> Layout2D {
    stress_majorization_with_history(layout, pairs, tol, max_iter).0
}

/// [`stress_majorization`] variant exposing the per-sweep stress values
/// (starting with the initial stress).
pub fn stress_majorization_with_history(
    layout: &Layout2D,
    pairs: &PairSet,
    tol: f64,
    max_iter: usize,
) -> (Layout2D, Vec<f64>) {
    let n = layout.vertex_count();
    let mut neighbors: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); n];
    for p in pairs.pairs() {
        neighbors[p.i].push((p.j, p.delta, p.weight));
        neighbors[p.j].push((p.i, p.delta, p.weight));
    }
    let mut out = layout.clone();
    let mut history = vec![stress(&out, pairs)];
    for _ in 0..max_iter {
        for i in 0..n {
            if neighbors[i].is_empty() {
                continue;
            }
            let pi = out.position(i);
            let mut num = [0.0f64; 2];
            let mut den = 0.0f64;
            for &(j, delta, w) in &neighbors[i] {
                let pj = out.position(j);
                let dx = pi[0] - pj[0];
                let dy = pi[1] - pj[1];
                let dist = (dx * dx + dy * dy).sqrt();
                let (ux, uy) = if dist > 1e-12 {
                    (dx / dist, dy / dist)
                } else {
                    // Deterministic fallback direction for coincident points.
                    let angle = ((i.wrapping_mul(2654435761).wrapping_add(j)) % 628) as f64 / 100.0;
                    (angle.cos(), angle.sin())
                };
                num[0] += w * (pj[0] + delta * ux);
                num[1] += w * (pj[1] + delta * uy);
                den += w;
            }
            out.set_position(i, [num[0] / den, num[1] / den]);
        }
        let s = stress(&out, pairs);
        let prev = *history.last().unwrap();
        history.push(s);
        if prev - s < tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (out, history)
}
