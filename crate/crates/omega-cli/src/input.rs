//! Graph ingestion: Matrix Market coordinate files, plain edge lists, and
//! generator specs. All loaders return the graph together with an external
//! label per compacted vertex, and automatically reduce disconnected inputs
//! to their largest connected component (with a notice on stderr).

use std::fs;
use std::path::Path;

use omega::graph::Graph;
use omega::{Error, Result};

/// A loaded graph plus the external label of each compacted vertex id.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `labels[v]` is the original identifier of compacted vertex `v`.
    pub labels: Vec<String>,
    /// Vertices discarded by largest-component extraction (0 if connected).
    pub dropped_vertices: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Reduces to the largest connected component when necessary, remapping the
/// label table accordingly.
fn finalize(graph: Graph, labels: Vec<String>, origin: &str) -> LoadedGraph {
    if graph.is_connected() {
        return LoadedGraph { graph, labels, dropped_vertices: 0 };
    }
    let n = graph.vertex_count();
    let (lcc, map) = graph.largest_connected_component();
    let mut kept = vec![String::new(); lcc.vertex_count()];
    for (old, slot) in map.iter().enumerate() {
        if let Some(new) = slot {
            kept[*new] = labels[old].clone();
        }
    }
    eprintln!(
        "notice: {origin} is disconnected; keeping the largest connected component \
         ({} of {n} vertices)",
        lcc.vertex_count()
    );
    LoadedGraph { dropped_vertices: n - lcc.vertex_count(), graph: lcc, labels: kept }
}

fn labelled(edges: &[(usize, usize, Option<f64>)], origin: &str) -> Result<LoadedGraph> {
    let (graph, raw_labels) = Graph::from_edge_list_with_labels(edges)?;
    let labels = raw_labels.iter().map(|id| id.to_string()).collect();
    Ok(finalize(graph, labels, origin))
}

/// Parses a Matrix Market coordinate file into an undirected graph.
///
/// Entries `(i, j)` with `i != j` become edges; `pattern` files get weight 1
/// and valued files use `|value|` (zeros dropped). Complex fields and array
/// format are rejected. Self-loops are dropped and duplicate entries merge
/// by weight summation (the graph core's normalization).
pub fn parse_matrix_market(path: &Path) -> Result<LoadedGraph> {
    let text = read_file(path)?;
    let err_at = |line: usize, msg: &str| invalid(format!("{}: line {line}: {msg}", path.display()));

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| err_at(1, "empty file; expected a %%MatrixMarket header"))?;
    let tokens: Vec<String> =
        header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 4 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err_at(1, "expected header '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[2] != "coordinate" {
        return Err(err_at(1, &format!("unsupported format '{}': only 'coordinate' is supported", tokens[2])));
    }
    let field = tokens[3].as_str();
    match field {
        "real" | "double" | "integer" | "pattern" => {}
        "complex" => return Err(err_at(1, "complex matrices are not supported")),
        other => return Err(err_at(1, &format!("unknown field type '{other}'"))),
    }
    let is_pattern = field == "pattern";

    // Size line: first non-comment, non-blank line after the header.
    let mut size: Option<(usize, usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    let mut entries_seen = 0usize;
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(err_at(lineno, "size line must be 'rows cols nnz'"));
                }
                let mut dims = [0usize; 3];
                for (slot, f) in dims.iter_mut().zip(&fields) {
                    *slot = f
                        .parse()
                        .map_err(|_| err_at(lineno, &format!("invalid size entry '{f}'")))?;
                }
                if dims[0] == 0 || dims[1] == 0 {
                    return Err(err_at(lineno, "matrix dimensions must be positive"));
                }
                size = Some((dims[0], dims[1], dims[2], lineno));
            }
            Some((rows, cols, nnz, _)) => {
                entries_seen += 1;
                if entries_seen > nnz {
                    return Err(err_at(lineno, &format!("more than the declared {nnz} entries")));
                }
                let expected = if is_pattern { 2 } else { 3 };
                if fields.len() != expected {
                    return Err(err_at(lineno, &format!("expected {expected} fields, found {}", fields.len())));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| err_at(lineno, &format!("invalid row index '{}'", fields[0])))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| err_at(lineno, &format!("invalid column index '{}'", fields[1])))?;
                if i < 1 || i > rows || j < 1 || j > cols {
                    return Err(err_at(lineno, &format!("entry ({i}, {j}) outside {rows}x{cols}")));
                }
                let weight = if is_pattern {
                    1.0
                } else {
                    let v: f64 = fields[2]
                        .parse()
                        .map_err(|_| err_at(lineno, &format!("invalid value '{}'", fields[2])))?;
                    v.abs()
                };
                if i == j || weight == 0.0 {
                    continue; // self-loop or explicit zero
                }
                edges.push((i, j, Some(weight)));
            }
        }
    }
    let (_, _, nnz, size_line) = size.ok_or_else(|| invalid(format!("{}: missing size line", path.display())))?;
    if entries_seen < nnz {
        return Err(err_at(size_line, &format!("declared {nnz} entries but found {entries_seen}")));
    }
    if edges.is_empty() {
        return Err(invalid(format!("{}: no off-diagonal non-zero entries", path.display())));
    }
    labelled(&edges, &path.display().to_string())
}

/// Parses an edge-list file: one `u v [w]` per line, `#` starts a comment.
pub fn parse_edge_list(path: &Path) -> Result<LoadedGraph> {
    let text = read_file(path)?;
    let err_at = |line: usize, msg: &str| invalid(format!("{}: line {line}: {msg}", path.display()));
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(err_at(lineno, "expected 'u v' or 'u v w'"));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| err_at(lineno, &format!("invalid vertex id '{}'", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| err_at(lineno, &format!("invalid vertex id '{}'", fields[1])))?;
        let w = match fields.get(2) {
            Some(f) => Some(
                f.parse::<f64>()
                    .map_err(|_| err_at(lineno, &format!("invalid weight '{f}'")))?,
            ),
            None => None,
        };
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(invalid(format!("{}: no edges", path.display())));
    }
    labelled(&edges, &path.display().to_string())
}

/// Builds a graph from a generator spec such as `path(100)`, `cycle(50)`,
/// `grid(10,20)`, `btree(5)`, `complete(30)`, or
/// `partition(clusters,size,p_in,p_out,seed)`.
pub fn parse_generator(spec: &str) -> Result<LoadedGraph> {
    let bad = |msg: &str| invalid(format!("generator spec '{spec}': {msg}"));
    let open = spec.find('(').ok_or_else(|| bad("expected 'name(args)'"))?;
    let close = spec.rfind(')').filter(|&c| c > open).ok_or_else(|| bad("missing ')'"))?;
    let name = spec[..open].trim();
    let args: Vec<&str> = spec[open + 1..close].split(',').map(str::trim).collect();
    let need = |k: usize| -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(bad(&format!("'{name}' takes {k} argument(s), got {}", args.len())))
        }
    };
    let int = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| bad(&format!("invalid integer '{s}'")))
    };
    let float = |s: &str| -> Result<f64> {
        s.parse().map_err(|_| bad(&format!("invalid number '{s}'")))
    };
    let graph = match name {
        "path" => {
            need(1)?;
            Graph::path(int(args[0])?)?
        }
        "cycle" => {
            need(1)?;
            Graph::cycle(int(args[0])?)?
        }
        "complete" => {
            need(1)?;
            Graph::complete(int(args[0])?)?
        }
        "grid" => {
            need(2)?;
            Graph::grid(int(args[0])?, int(args[1])?)?
        }
        "btree" => {
            need(1)?;
            let order = int(args[0])?;
            Graph::binomial_tree(u32::try_from(order).map_err(|_| bad("order too large"))?)?
        }
        "partition" => {
            need(5)?;
            Graph::random_partition(
                int(args[0])?,
                int(args[1])?,
                float(args[2])?,
                float(args[3])?,
                int(args[4])? as u64,
            )?
        }
        other => return Err(bad(&format!("unknown generator '{other}'"))),
    };
    let labels = (0..graph.vertex_count()).map(|v| v.to_string()).collect();
    Ok(finalize(graph, labels, spec))
}
