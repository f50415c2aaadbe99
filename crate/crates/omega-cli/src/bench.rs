//! The `bench` command: experiment harness over the built-in corpora,
//! emitting machine-readable JSON and a human-readable table.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use omega::experiments::{
    compare_sampling_on_graph, measure_omega_runtime, median, sampling_corpus, scaling_graphs,
    MetricKind, SamplingRun, SamplingStrategy,
};
use omega::layout::{OmegaParams, ScheduleParams};
use omega::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Random vs pivot pair sampling, stress ratios against per-graph
    /// reference optima.
    Sampling,
    /// Wall-clock runtime of the sampled pipeline at growing edge counts.
    Scaling,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Suite::Sampling)]
    pub suite: Suite,
    /// Base RNG seed; runs use seed, seed+1, ... (required for reproducibility).
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated sampling counts h (sampling suite).
    #[arg(long, default_value = "50", value_delimiter = ',')]
    pub h: Vec<usize>,
    /// Seeds per configuration.
    #[arg(long, default_value_t = 3)]
    pub seeds: usize,
    /// Timing repetitions per graph; the median is reported (scaling suite).
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Restrict to the first N corpus graphs (0 = all).
    #[arg(long, default_value_t = 0)]
    pub graph_limit: usize,
    /// JSON output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SamplingSummary {
    strategy: SamplingStrategy,
    metric: MetricKind,
    h: usize,
    runs: usize,
    median_stress_ratio: f64,
}

fn emit(args: &BenchArgs, value: &serde_json::Value) -> Result<()> {
    if let Some(path) = &args.output {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::InvalidInput(format!("JSON serialization: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_sampling(args: &BenchArgs) -> Result<()> {
    if args.seeds == 0 {
        return Err(Error::InvalidInput("--seeds must be at least 1".into()));
    }
    let mut corpus = sampling_corpus();
    if args.graph_limit > 0 {
        corpus.truncate(args.graph_limit);
    }
    let seeds: Vec<u64> = (0..args.seeds as u64).map(|k| args.seed + k).collect();
    let schedule = ScheduleParams::default();
    let mut runs: Vec<SamplingRun> = Vec::new();
    for &h in &args.h {
        for (name, g) in &corpus {
            runs.extend(compare_sampling_on_graph(name, g, h, &seeds, &schedule)?);
        }
    }

    let mut summary = Vec::new();
    for &h in &args.h {
        for metric in [MetricKind::Resistance, MetricKind::ShortestPath] {
            for strategy in [SamplingStrategy::Random, SamplingStrategy::Pivot] {
                let ratios: Vec<f64> = runs
                    .iter()
                    .filter(|r| r.h == h && r.metric == metric && r.strategy == strategy)
                    .map(|r| r.stress_ratio)
                    .collect();
                summary.push(SamplingSummary {
                    strategy,
                    metric,
                    h,
                    runs: ratios.len(),
                    median_stress_ratio: median(&ratios),
                });
            }
        }
    }

    println!("suite: sampling ({} graphs, {} seeds from {})", corpus.len(), args.seeds, args.seed);
    println!("{:<10} {:<14} {:>5} {:>6} {:>14}", "strategy", "metric", "h", "runs", "median-ratio");
    for s in &summary {
        let metric = match s.metric {
            MetricKind::Resistance => "resistance",
            MetricKind::ShortestPath => "shortest-path",
        };
        let strategy = match s.strategy {
            SamplingStrategy::Random => "random",
            SamplingStrategy::Pivot => "pivot",
        };
        println!(
            "{strategy:<10} {metric:<14} {:>5} {:>6} {:>14.4}",
            s.h, s.runs, s.median_stress_ratio
        );
    }

    emit(
        args,
        &json!({
            "suite": "sampling",
            "seed": args.seed,
            "seeds": args.seeds,
            "h": args.h,
            "graphs": corpus.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "runs": runs,
            "summary": summary,
        }),
    )
}

fn run_scaling(args: &BenchArgs) -> Result<()> {
    if args.repeats == 0 {
        return Err(Error::InvalidInput("--repeats must be at least 1".into()));
    }
    let mut graphs = scaling_graphs();
    if args.graph_limit > 0 {
        graphs.truncate(args.graph_limit);
    }
    let mut rows = Vec::new();
    println!("suite: scaling ({} repeats, median reported)", args.repeats);
    println!("{:<14} {:>9} {:>9} {:>12}", "graph", "vertices", "edges", "median-sec");
    for (name, g) in &graphs {
        let params = OmegaParams { rng_seed: args.seed, ..Default::default() };
        let times: Vec<f64> = (0..args.repeats)
            .map(|_| measure_omega_runtime(g, &params))
            .collect::<Result<_>>()?;
        let med = median(&times);
        println!("{:<14} {:>9} {:>9} {:>12.3}", name, g.vertex_count(), g.edge_count(), med);
        rows.push(json!({
            "graph": name,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "median_seconds": med,
            "samples": times,
        }));
    }
    emit(
        args,
        &json!({
            "suite": "scaling",
            "seed": args.seed,
            "repeats": args.repeats,
            "rows": rows,
        }),
    )
}

pub fn execute(args: &BenchArgs) -> Result<()> {
    match args.suite {
        Suite::Sampling => run_sampling(args),
        Suite::Scaling => run_scaling(args),
    }
}
