//! Desk-scale experiment harness shared by the acceptance suite and the
//! bench CLI: corpus generation, the sampling-strategy comparison (random
//! node-pair sampling vs pivot-based sampling, both metrics), and runtime
//! probes.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::layout::{
    all_pairs_set, build_pair_set_pivot, build_pair_set_random_metric, sgd_optimize, stress,
    stress_majorization, AnnealingSchedule, Layout2D, Metric, OmegaParams, ScheduleParams,
};
use crate::metrics::stress_ratio;
use crate::layout::omega_layout;
use crate::rdmds::{compute_embedding, RdmdsParams};
use crate::Result;

/// Sparse pair-sampling strategy under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    Random,
    Pivot,
}

/// Ideal-distance metric selector (owned counterpart of [`Metric`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Resistance,
    ShortestPath,
}

/// One sparse-layout run measured against the per-graph reference optimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingRun {
    pub graph: String,
    pub strategy: SamplingStrategy,
    pub metric: MetricKind,
    pub h: usize,
    pub seed: u64,
    pub stress_ratio: f64,
}

/// Connected corpus with vertex counts in [100, 500]: paths, cycles, grids,
/// binomial trees, a complete graph, and planted partitions.
pub fn sampling_corpus() -> Vec<(String, Graph)> {
    let mut graphs: Vec<(String, Graph)> = vec![
        ("path(100)".into(), Graph::path(100).unwrap()),
        ("path(250)".into(), Graph::path(250).unwrap()),
        ("path(500)".into(), Graph::path(500).unwrap()),
        ("cycle(120)".into(), Graph::cycle(120).unwrap()),
        ("cycle(200)".into(), Graph::cycle(200).unwrap()),
        ("cycle(300)".into(), Graph::cycle(300).unwrap()),
        ("grid(10,10)".into(), Graph::grid(10, 10).unwrap()),
        ("grid(12,20)".into(), Graph::grid(12, 20).unwrap()),
        ("grid(15,15)".into(), Graph::grid(15, 15).unwrap()),
        ("grid(20,25)".into(), Graph::grid(20, 25).unwrap()),
        ("btree(7)".into(), Graph::binomial_tree(7).unwrap()),
        ("btree(8)".into(), Graph::binomial_tree(8).unwrap()),
        ("complete(100)".into(), Graph::complete(100).unwrap()),
    ];
    let partitions: &[(usize, usize, f64, f64, u64)] = &[
        (4, 30, 0.30, 0.010, 11),
        (5, 40, 0.25, 0.010, 12),
        (8, 40, 0.20, 0.005, 13),
        (10, 50, 0.15, 0.004, 14),
        (3, 50, 0.30, 0.020, 15),
        (6, 25, 0.30, 0.010, 16),
        (4, 60, 0.20, 0.010, 17),
        (5, 30, 0.35, 0.015, 18),
        (7, 30, 0.20, 0.010, 19),
    ];
    for &(c, s, p_in, p_out, seed) in partitions {
        let name = format!("partition({c},{s},{p_in},{p_out},{seed})");
        graphs.push((name, Graph::random_partition(c, s, p_in, p_out, seed).unwrap()));
    }
    graphs
}

/// Stress-ratio comparison of random vs pivot sampling on one graph, both
/// strategies sharing one embedding, one reference optimum per metric, and
/// the same evaluation pair set (all pairs).
pub fn compare_sampling_on_graph(
    name: &str,
    g: &Graph,
    h: usize,
    seeds: &[u64],
    schedule_params: &ScheduleParams,
) -> Result<Vec<SamplingRun>> {
    let embedding = compute_embedding(g, &RdmdsParams::default())?;
    let mut runs = Vec::new();
    for metric_kind in [MetricKind::Resistance, MetricKind::ShortestPath] {
        let metric = match metric_kind {
            MetricKind::Resistance => Metric::Resistance { embedding: &embedding, min_distance: 0.01 },
            MetricKind::ShortestPath => Metric::ShortestPath,
        };
        let eval_pairs = all_pairs_set(g, &metric)?;

        // Reference optimum: long FullSGD then majorization to convergence.
        let ref_init = match metric_kind {
            MetricKind::Resistance => Layout2D::from_embedding(&embedding)?,
            MetricKind::ShortestPath => Layout2D::random_unit_square(g.vertex_count(), 0),
        };
        let ref_schedule = AnnealingSchedule::from_pairs(
            &ScheduleParams { iterations: 1000, eps: 0.1 },
            &eval_pairs,
        );
        let ref_sgd = sgd_optimize(&ref_init, &eval_pairs, &ref_schedule, 0);
        let reference = stress_majorization(&ref_sgd, &eval_pairs, 1e-7, 500);
        let ref_stress = stress(&reference, &eval_pairs);

        for &seed in seeds {
            for strategy in [SamplingStrategy::Random, SamplingStrategy::Pivot] {
                let pairs = match strategy {
                    SamplingStrategy::Random => build_pair_set_random_metric(g, &metric, h, seed),
                    SamplingStrategy::Pivot => build_pair_set_pivot(g, &metric, h, seed, true)?.0,
                };
                let init = match metric_kind {
                    MetricKind::Resistance => Layout2D::from_embedding(&embedding)?,
                    MetricKind::ShortestPath => {
                        Layout2D::random_unit_square(g.vertex_count(), seed)
                    }
                };
                let sched = AnnealingSchedule::from_pairs(schedule_params, &pairs);
                let out = sgd_optimize(&init, &pairs, &sched, seed);
                let achieved = stress(&out, &eval_pairs);
                runs.push(SamplingRun {
                    graph: name.to_string(),
                    strategy,
                    metric: metric_kind,
                    h,
                    seed,
                    stress_ratio: stress_ratio(achieved, ref_stress)?,
                });
            }
        }
    }
    Ok(runs)
}

/// Median of a sample (mean of the middle two for even lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Grid instances whose edge counts sit near 10^3, 10^4, and 10^5.
pub fn scaling_graphs() -> Vec<(String, Graph)> {
    [(23usize, 23usize), (72, 71), (225, 224)]
        .iter()
        .map(|&(r, c)| (format!("grid({r},{c})"), Graph::grid(r, c).unwrap()))
        .collect()
}

/// Wall-clock seconds for one full Omega run.
pub fn measure_omega_runtime(g: &Graph, params: &OmegaParams) -> Result<f64> {
    let start = Instant::now();
    omega_layout(g, params)?;
    Ok(start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_connected_and_in_size_band() {
        let corpus = sampling_corpus();
        assert!(corpus.len() >= 20);
        for (name, g) in &corpus {
            assert!(g.is_connected(), "{name} disconnected");
            assert!(
                (100..=500).contains(&g.vertex_count()),
                "{name} has n={}",
                g.vertex_count()
            );
        }
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn scaling_graphs_hit_edge_decades() {
        let gs = scaling_graphs();
        let targets = [1e3, 1e4, 1e5];
        for ((name, g), target) in gs.iter().zip(targets) {
            let m = g.edge_count() as f64;
            assert!(
                m >= target && m < target * 1.05,
                "{name} has {m} edges, wanted about {target}"
            );
        }
    }

    #[test]
    fn sampling_comparison_produces_full_grid_of_runs() {
        let g = Graph::grid(10, 10).unwrap();
        let runs = compare_sampling_on_graph(
            "grid(10,10)",
            &g,
            10,
            &[1, 2],
            &ScheduleParams::default(),
        )
        .unwrap();
        assert_eq!(runs.len(), 2 * 2 * 2); // metric x seed x strategy
        for r in &runs {
            assert!(r.stress_ratio.is_finite());
            assert!(r.stress_ratio >= 0.0);
        }
    }
}
