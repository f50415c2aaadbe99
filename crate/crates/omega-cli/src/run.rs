//! The `run` command: load a graph, compute a layout with the selected
//! algorithm, and emit coordinates, optional SVG, metrics, and run metadata.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use omega::graph::Graph;
use omega::layout::{
    all_pairs_set, build_pair_set_pivot, build_pair_set_random_metric, stress, AnnealingSchedule,
    Layout2D, Metric, PairSet, ScheduleParams, sgd_optimize, FULL_PAIR_VERTEX_CAP,
};
use omega::metrics::{
    agglomerative_layout_clustering, fowlkes_mallows, greedy_modularity,
    neighborhood_preservation, reference_optimum, MetricRecord,
};
use omega::rdmds::{compute_embedding, RdmdsParams, SpectralEmbedding};
use omega::sparse::PcgParams;
use omega::{Error, Result};

use crate::input::{parse_edge_list, parse_generator, parse_matrix_market, LoadedGraph};
use crate::output::{render_svg, write_coordinates_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    MatrixMarket,
    EdgeList,
    Generator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Sampled pipeline: embedding, random node-pair sampling, SGD.
    Omega,
    /// Pivot-based sparse sampling followed by SGD.
    SparsePivot,
    /// SGD over every vertex pair.
    FullSgd,
    /// Spectral initialization only (first two embedding columns).
    RdmdsOnly,
    /// Full-pair SGD refined by stress majorization (reference optimum).
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricChoice {
    Resistance,
    ShortestPath,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input path, or a generator spec like 'grid(10,20)' with --format generator.
    #[arg(long)]
    pub input: String,
    /// Input format; defaults to matrix-market for .mtx files, edge-list otherwise.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long, value_enum, default_value_t = Algorithm::Omega)]
    pub algo: Algorithm,
    /// Ideal-distance metric for pair construction.
    #[arg(long, value_enum, default_value_t = MetricChoice::Resistance)]
    pub metric: MetricChoice,
    /// Embedding dimension d (clamped to n-1).
    #[arg(short = 'd', long, default_value_t = 10)]
    pub dimension: usize,
    /// Random partner samples per vertex, or pivot count, h.
    #[arg(long, default_value_t = 50)]
    pub h: usize,
    /// Ideal-distance floor eps_d for the resistance metric.
    #[arg(long, default_value_t = 0.01)]
    pub min_distance: f64,
    /// SGD annealing iterations T.
    #[arg(long, default_value_t = 15)]
    pub iterations: usize,
    /// Terminal step-size fraction eps of the annealing schedule.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Laplacian shift sigma.
    #[arg(long, default_value_t = 1e-6)]
    pub sigma: f64,
    /// Rayleigh-change eigensolver tolerance tau_eig.
    #[arg(long, default_value_t = 1e-5)]
    pub eig_tolerance: f64,
    /// Inverse-power iteration cap M_eig.
    #[arg(long, default_value_t = 100)]
    pub max_eig_iterations: usize,
    /// PCG tolerance tau_CG.
    #[arg(long, default_value_t = 0.1)]
    pub cg_tolerance: f64,
    /// PCG iteration cap M_CG.
    #[arg(long, default_value_t = 100)]
    pub max_cg_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use plain 1/delta^2 weights for pivot pairs instead of adapted
    /// region weights.
    #[arg(long, default_value_t = false)]
    pub plain_pivot_weights: bool,
    /// Neighborhood size k for the Jaccard k-NN preservation metric.
    #[arg(long, default_value_t = 10)]
    pub knn_k: usize,
    /// Coordinates CSV output path.
    #[arg(long, default_value = "coords.csv")]
    pub coords: PathBuf,
    /// Optional SVG output path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Optional metrics JSON output path.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Optional run-metadata JSON output path.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// Color SVG nodes by greedy-modularity communities.
    #[arg(long, default_value_t = false)]
    pub color_communities: bool,
}

impl RunArgs {
    fn effective_format(&self) -> InputFormat {
        self.format.unwrap_or({
            if self.input.ends_with(".mtx") {
                InputFormat::MatrixMarket
            } else {
                InputFormat::EdgeList
            }
        })
    }

    fn rdmds_params(&self, n: usize) -> RdmdsParams {
        RdmdsParams {
            d: self.dimension.min(n.saturating_sub(1)).max(1),
            sigma: self.sigma,
            eig_tolerance: self.eig_tolerance,
            max_eig_iterations: self.max_eig_iterations,
            pcg: PcgParams {
                tolerance: self.cg_tolerance,
                max_iterations: self.max_cg_iterations,
            },
            rng_seed: self.seed,
        }
    }

    fn schedule_params(&self) -> ScheduleParams {
        ScheduleParams { iterations: self.iterations, eps: self.eps }
    }
}

fn load(args: &RunArgs) -> Result<LoadedGraph> {
    match args.effective_format() {
        InputFormat::MatrixMarket => parse_matrix_market(Path::new(&args.input)),
        InputFormat::EdgeList => parse_edge_list(Path::new(&args.input)),
        InputFormat::Generator => parse_generator(&args.input),
    }
}

/// Layout plus the timing split required by the run metadata.
struct Computed {
    layout: Layout2D,
    embedding: Option<SpectralEmbedding>,
    /// Pair set the optimizer worked on (None for rdmds-only).
    pairs: Option<PairSet>,
    preprocessing_ms: f64,
    sgd_ms: f64,
}

fn compute(args: &RunArgs, g: &Graph) -> Result<Computed> {
    let n = g.vertex_count();
    let rdmds = args.rdmds_params(n);
    let schedule_params = args.schedule_params();
    let needs_embedding = matches!(args.metric, MetricChoice::Resistance)
        || matches!(args.algo, Algorithm::Omega | Algorithm::RdmdsOnly);

    let prep_start = Instant::now();
    let embedding = if needs_embedding { Some(compute_embedding(g, &rdmds)?) } else { None };
    let metric = match (args.metric, &embedding) {
        (MetricChoice::Resistance, Some(e)) => {
            Metric::Resistance { embedding: e, min_distance: args.min_distance }
        }
        _ => Metric::ShortestPath,
    };

    let pairs = match args.algo {
        Algorithm::Omega => Some(build_pair_set_random_metric(g, &metric, args.h, args.seed)),
        Algorithm::SparsePivot => {
            let (ps, _pivots) =
                build_pair_set_pivot(g, &metric, args.h, args.seed, !args.plain_pivot_weights)?;
            Some(ps)
        }
        Algorithm::FullSgd | Algorithm::Reference => Some(all_pairs_set(g, &metric)?),
        Algorithm::RdmdsOnly => None,
    };
    let preprocessing_ms = prep_start.elapsed().as_secs_f64() * 1e3;

    let initial = match (&embedding, args.metric) {
        (Some(e), MetricChoice::Resistance) => Layout2D::from_embedding(e)?,
        (Some(e), _) if matches!(args.algo, Algorithm::RdmdsOnly) => Layout2D::from_embedding(e)?,
        _ => Layout2D::random_unit_square(n, args.seed),
    };

    let sgd_start = Instant::now();
    let layout = match (args.algo, &pairs) {
        (Algorithm::RdmdsOnly, _) => initial,
        (Algorithm::Reference, _) => reference_optimum(g, &metric, args.seed)?.0,
        (_, Some(ps)) if !ps.is_empty() => {
            let schedule = AnnealingSchedule::from_pairs(&schedule_params, ps);
            sgd_optimize(&initial, ps, &schedule, args.seed)
        }
        _ => initial,
    };
    let sgd_ms = sgd_start.elapsed().as_secs_f64() * 1e3;

    Ok(Computed { layout, embedding, pairs, preprocessing_ms, sgd_ms })
}

fn metric_records(
    args: &RunArgs,
    g: &Graph,
    computed: &Computed,
) -> Result<Vec<MetricRecord>> {
    let n = g.vertex_count();
    let metric = match (args.metric, &computed.embedding) {
        (MetricChoice::Resistance, Some(e)) => {
            Metric::Resistance { embedding: e, min_distance: args.min_distance }
        }
        _ => Metric::ShortestPath,
    };
    let mut records = Vec::new();
    let timed = |f: &mut dyn FnMut() -> Result<(serde_json::Value, f64)>| -> Result<MetricRecord> {
        let start = Instant::now();
        let (params, value) = f()?;
        Ok(MetricRecord {
            graph: args.input.clone(),
            metric_params: params,
            value,
            seed: args.seed,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    };

    // Stress over the full pair set when enumerable, else over the
    // optimizer's own pair set.
    let eval_pairs = if n <= FULL_PAIR_VERTEX_CAP {
        Some(all_pairs_set(g, &metric)?)
    } else {
        computed.pairs.clone()
    };
    if let Some(ps) = &eval_pairs {
        records.push(timed(&mut || {
            let scope = if n <= FULL_PAIR_VERTEX_CAP { "all-pairs" } else { "sampled-pairs" };
            Ok((
                json!({"name": "stress", "metric": args.metric, "pairs": scope}),
                stress(&computed.layout, ps),
            ))
        })?);
    }

    let k = args.knn_k.min(n - 1).max(1);
    records.push(timed(&mut || {
        Ok((
            json!({"name": "neighborhood_preservation", "k": k}),
            neighborhood_preservation(g, &computed.layout, k)?,
        ))
    })?);

    records.push(timed(&mut || {
        let truth = greedy_modularity(g)?;
        let clusters = agglomerative_layout_clustering(&computed.layout, truth.cluster_count())?;
        Ok((
            json!({"name": "fowlkes_mallows", "clusters": truth.cluster_count(),
                   "truth": "greedy-modularity", "layout_clustering": "ward"}),
            fowlkes_mallows(&truth, &clusters)?,
        ))
    })?);

    Ok(records)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("JSON serialization: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn execute(args: &RunArgs) -> Result<()> {
    let loaded = load(args)?;
    let g = &loaded.graph;
    let computed = compute(args, g)?;

    write_coordinates_csv(&args.coords, &loaded.labels, &computed.layout)?;

    if let Some(svg_path) = &args.svg {
        let colors = if args.color_communities {
            Some(greedy_modularity(g)?.labels().to_vec())
        } else {
            None
        };
        let doc = render_svg(g, &computed.layout, colors.as_deref());
        std::fs::write(svg_path, doc)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", svg_path.display())))?;
    }

    if let Some(metrics_path) = &args.metrics {
        let records = metric_records(args, g, &computed)?;
        write_json(metrics_path, &serde_json::to_value(&records).unwrap())?;
    }

    if let Some(meta_path) = &args.metadata {
        let rdmds = args.rdmds_params(g.vertex_count());
        let meta = json!({
            "parameters": {
                "input": args.input,
                "format": args.effective_format(),
                "algorithm": args.algo,
                "metric": args.metric,
                "dimension": rdmds.d,
                "h": args.h,
                "min_distance": args.min_distance,
                "iterations": args.iterations,
                "eps": args.eps,
                "sigma": args.sigma,
                "eig_tolerance": args.eig_tolerance,
                "max_eig_iterations": args.max_eig_iterations,
                "cg_tolerance": args.cg_tolerance,
                "max_cg_iterations": args.max_cg_iterations,
                "seed": args.seed,
                "plain_pivot_weights": args.plain_pivot_weights,
                "knn_k": args.knn_k,
                "color_communities": args.color_communities,
            },
            "graph": {
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "dropped_vertices": loaded.dropped_vertices,
                "pairs": computed.pairs.as_ref().map(|p| p.len()),
            },
            "timings_ms": {
                "preprocessing": computed.preprocessing_ms,
                "sgd": computed.sgd_ms,
            },
            "outputs": {
                "coords": args.coords,
                "svg": args.svg,
                "metrics": args.metrics,
            },
        });
        write_json(meta_path, &meta)?;
    }

    println!(
        "laid out {} vertices / {} edges with {:?} (coords: {})",
        g.vertex_count(),
        g.edge_count(),
        args.algo,
        args.coords.display()
    );
    Ok(())
}
