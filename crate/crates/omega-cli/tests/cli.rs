//! Integration tests: parsers, output round trips, SVG shape, and
//! end-to-end binary runs (determinism, exit codes).

use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

use omega::graph::Graph;
use omega::layout::Layout2D;
use omega::rdmds::{compute_embedding, RdmdsParams};
use omega_cli::input::{parse_edge_list, parse_generator, parse_matrix_market};
use omega_cli::output::{coordinates_csv_string, read_coordinates_csv, render_svg};

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omega"))
}

// ---- Matrix Market parsing ----

#[test]
fn matrix_market_pattern_file_becomes_p3() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("p3.mtx");
    write(&path, "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n1 2\n2 3\n");
    let loaded = parse_matrix_market(&path).unwrap();
    assert_eq!(loaded.graph.vertex_count(), 3);
    assert_eq!(loaded.graph.edge_count(), 2);
    assert!(loaded.graph.has_unit_weights());
    assert_eq!(loaded.labels, vec!["1", "2", "3"]);
    assert_eq!(loaded.dropped_vertices, 0);
}

#[test]
fn matrix_market_drops_self_loops_zeros_and_takes_magnitudes() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("vals.mtx");
    write(
        &path,
        "%%MatrixMarket matrix coordinate real general\n\
         3 3 3\n2 2 5.0\n1 3 -4.0\n1 2 0.0\n",
    );
    let loaded = parse_matrix_market(&path).unwrap();
    // The self-loop and the explicit zero vanish; only 1-3 with |−4| remains.
    assert_eq!(loaded.graph.vertex_count(), 2);
    assert_eq!(loaded.graph.edge_count(), 1);
    assert_eq!(loaded.graph.edges()[0].w, 4.0);
    assert_eq!(loaded.labels, vec!["1", "3"]);
}

#[test]
fn matrix_market_rejects_complex_and_array() {
    let dir = tempdir().unwrap();
    let complex = dir.path().join("c.mtx");
    write(&complex, "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 2 1.0 0.0\n");
    let err = parse_matrix_market(&complex).unwrap_err().to_string();
    assert!(err.contains("complex"), "{err}");

    let array = dir.path().join("a.mtx");
    write(&array, "%%MatrixMarket matrix array real general\n2 2\n1.0\n0.0\n0.0\n1.0\n");
    let err = parse_matrix_market(&array).unwrap_err().to_string();
    assert!(err.contains("coordinate"), "{err}");
}

#[test]
fn matrix_market_errors_carry_line_numbers() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    write(&path, "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1.0\n1 oops 1.0\n");
    let err = parse_matrix_market(&path).unwrap_err().to_string();
    assert!(err.contains("line 4"), "{err}");

    let out_of_range = dir.path().join("range.mtx");
    write(&out_of_range, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 5 1.0\n");
    let err = parse_matrix_market(&out_of_range).unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");

    let truncated = dir.path().join("short.mtx");
    write(&truncated, "%%MatrixMarket matrix coordinate pattern general\n3 3 5\n1 2\n");
    let err = parse_matrix_market(&truncated).unwrap_err().to_string();
    assert!(err.contains("declared 5 entries"), "{err}");
}

#[test]
fn matrix_market_disconnected_input_keeps_largest_component() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("two.mtx");
    // Component {1,2,3} (a triangle) and component {4,5}.
    write(
        &path,
        "%%MatrixMarket matrix coordinate pattern general\n\
         5 5 4\n1 2\n2 3\n1 3\n4 5\n",
    );
    let loaded = parse_matrix_market(&path).unwrap();
    assert_eq!(loaded.graph.vertex_count(), 3);
    assert!(loaded.graph.is_connected());
    assert_eq!(loaded.dropped_vertices, 2);
    assert_eq!(loaded.labels, vec!["1", "2", "3"]);
}

// ---- edge lists and generators ----

#[test]
fn edge_list_supports_comments_and_weights() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("g.edges");
    write(&path, "# a comment\n7 9\n9 11 2.5 # trailing note\n\n11 7\n");
    let loaded = parse_edge_list(&path).unwrap();
    assert_eq!(loaded.graph.vertex_count(), 3);
    assert_eq!(loaded.graph.edge_count(), 3);
    assert_eq!(loaded.labels, vec!["7", "9", "11"]);
    let w: f64 = loaded
        .graph
        .edges()
        .iter()
        .map(|e| e.w)
        .sum();
    assert_eq!(w, 1.0 + 2.5 + 1.0);
}

#[test]
fn generator_specs_build_expected_graphs() {
    assert_eq!(parse_generator("grid(3,4)").unwrap().graph.vertex_count(), 12);
    assert_eq!(parse_generator("path(9)").unwrap().graph.edge_count(), 8);
    assert_eq!(parse_generator("btree(4)").unwrap().graph.vertex_count(), 16);
    let p = parse_generator("partition(3,8,0.8,0.05,1)").unwrap();
    assert!(p.graph.is_connected());
    assert!(parse_generator("ring(5)").is_err());
    assert!(parse_generator("grid(3)").is_err());
    assert!(parse_generator("grid(a,b)").is_err());
}

// ---- coordinate CSV round trip ----

#[test]
fn coordinates_csv_round_trip_is_bit_identical() {
    let layout = Layout2D::new(vec![
        [1.0 / 3.0, -1.23456789012345e10],
        [1e-20, 0.1 + 0.2],
        [-0.0, f64::MIN_POSITIVE],
    ]);
    let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let text = coordinates_csv_string(&labels, &layout);

    let dir = tempdir().unwrap();
    let path = dir.path().join("coords.csv");
    fs::write(&path, &text).unwrap();
    let rows = read_coordinates_csv(&path).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, (label, p)) in rows.iter().zip(labels.iter().zip(layout.positions())) {
        assert_eq!(&row.0, label);
        assert_eq!(row.1.to_bits(), p[0].to_bits());
        assert_eq!(row.2.to_bits(), p[1].to_bits());
    }
    // Re-serializing the parsed rows reproduces the file byte for byte.
    let reparsed = Layout2D::new(rows.iter().map(|r| [r.1, r.2]).collect());
    assert_eq!(coordinates_csv_string(&labels, &reparsed), text);
}

// ---- SVG rendering ----

#[test]
fn svg_has_one_line_and_two_circles_for_a_single_edge() {
    let g = Graph::from_edge_list(&[(0, 1, None)]).unwrap();
    let layout = Layout2D::new(vec![[0.0, 0.0], [1.0, 1.0]]);
    let svg = render_svg(&g, &layout, None);
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("viewBox="));
    assert_eq!(svg.matches("<line ").count(), 1);
    assert_eq!(svg.matches("<circle ").count(), 2);
    // Color labels map through the palette.
    let colored = render_svg(&g, &layout, Some(&[0, 1]));
    assert!(colored.contains(omega_cli::output::PALETTE[0]));
    assert!(colored.contains(omega_cli::output::PALETTE[1]));
}

// ---- end-to-end binary runs ----

#[test]
fn rdmds_only_writes_the_first_two_embedding_columns() {
    let dir = tempdir().unwrap();
    let coords = dir.path().join("c.csv");
    let status = bin()
        .args([
            "run",
            "--format",
            "generator",
            "--input",
            "path(12)",
            "--algo",
            "rdmds-only",
            "-d",
            "2",
            "--seed",
            "5",
            "--coords",
        ])
        .arg(&coords)
        .status()
        .unwrap();
    assert!(status.success());

    let g = Graph::path(12).unwrap();
    let params = RdmdsParams { d: 2, rng_seed: 5, ..Default::default() };
    let e = compute_embedding(&g, &params).unwrap();
    let rows = read_coordinates_csv(&coords).unwrap();
    assert_eq!(rows.len(), 12);
    for (v, row) in rows.iter().enumerate() {
        assert_eq!(row.1.to_bits(), e.row(v)[0].to_bits());
        assert_eq!(row.2.to_bits(), e.row(v)[1].to_bits());
    }
}

#[test]
fn identical_seeds_give_identical_outputs_and_metadata() {
    let dir = tempdir().unwrap();
    let run = |tag: &str| {
        let coords = dir.path().join(format!("{tag}.csv"));
        let meta = dir.path().join(format!("{tag}.json"));
        let status = bin()
            .args([
                "run",
                "--format",
                "generator",
                "--input",
                "grid(5,6)",
                "--algo",
                "omega",
                "--seed",
                "7",
            ])
            .arg("--coords")
            .arg(&coords)
            .arg("--metadata")
            .arg(&meta)
            .status()
            .unwrap();
        assert!(status.success());
        (fs::read(&coords).unwrap(), fs::read_to_string(&meta).unwrap())
    };
    let (coords_a, meta_a) = run("a");
    let (coords_b, meta_b) = run("b");
    assert_eq!(coords_a, coords_b);

    let va: serde_json::Value = serde_json::from_str(&meta_a).unwrap();
    let vb: serde_json::Value = serde_json::from_str(&meta_b).unwrap();
    assert_eq!(va["parameters"], vb["parameters"]);
    assert_eq!(va["graph"], vb["graph"]);
    // Timings are environmental, not result-bearing; everything else matches.
    assert_eq!(va["outputs"]["coords"], serde_json::json!(dir.path().join("a.csv")));
}

#[test]
fn svg_output_from_binary_matches_graph_shape() {
    let dir = tempdir().unwrap();
    let coords = dir.path().join("c.csv");
    let svg = dir.path().join("g.svg");
    let status = bin()
        .args([
            "run",
            "--format",
            "generator",
            "--input",
            "cycle(8)",
            "--algo",
            "full-sgd",
            "--metric",
            "shortest-path",
            "--seed",
            "2",
        ])
        .arg("--coords")
        .arg(&coords)
        .arg("--svg")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    let doc = fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<line ").count(), 8);
    assert_eq!(doc.matches("<circle ").count(), 8);
}

#[test]
fn metrics_json_contains_the_three_records() {
    let dir = tempdir().unwrap();
    let coords = dir.path().join("c.csv");
    let metrics = dir.path().join("m.json");
    let status = bin()
        .args([
            "run",
            "--format",
            "generator",
            "--input",
            "partition(3,8,0.8,0.05,1)",
            "--seed",
            "4",
            "--knn-k",
            "5",
        ])
        .arg("--coords")
        .arg(&coords)
        .arg("--metrics")
        .arg(&metrics)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    let names: Vec<&str> =
        v.as_array().unwrap().iter().map(|r| r["metric_params"]["name"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["stress", "neighborhood_preservation", "fowlkes_mallows"]);
    for record in v.as_array().unwrap() {
        assert!(record["value"].as_f64().unwrap().is_finite());
        assert_eq!(record["seed"].as_u64().unwrap(), 4);
    }
}

#[test]
fn exit_codes_match_error_classes() {
    // Missing input file: input error.
    let status = bin().args(["run", "--input", "definitely-missing.mtx"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));

    // All-pair enumeration above the cap: limit violation.
    let status = bin()
        .args([
            "run",
            "--format",
            "generator",
            "--input",
            "path(5001)",
            "--algo",
            "full-sgd",
            "--metric",
            "shortest-path",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));

    // Unknown flag: usage = input error.
    let status = bin().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));

    // Help exits 0.
    let status = bin().arg("--help").output().unwrap();
    assert_eq!(status.status.code(), Some(0));

    // Bench requires --seed.
    let status = bin().args(["bench", "--suite", "sampling"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn bench_sampling_emits_json_with_summary() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("bench.json");
    let status = bin()
        .args([
            "bench",
            "--suite",
            "sampling",
            "--seed",
            "9",
            "--h",
            "10",
            "--seeds",
            "1",
            "--graph-limit",
            "1",
        ])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["suite"], "sampling");
    assert_eq!(v["seed"], 9);
    // 1 graph x 1 seed x 2 metrics x 2 strategies.
    assert_eq!(v["runs"].as_array().unwrap().len(), 4);
    assert_eq!(v["summary"].as_array().unwrap().len(), 4);
    for s in v["summary"].as_array().unwrap() {
        assert!(s["median_stress_ratio"].as_f64().unwrap() > 0.0);
    }
}
