//! Output rendering: coordinates CSV (full-precision round trip) and a
//! minimal SVG 1.1 view of a layout.

use std::fs;
use std::path::Path;

use omega::graph::Graph;
use omega::layout::Layout2D;
use omega::{Error, Result};

/// Fixed categorical palette for per-node coloring (cycled when there are
/// more categories than colors).
pub const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];

const DEFAULT_NODE_COLOR: &str = "#4e79a7";

/// Serializes a layout as `id,x,y` CSV. Coordinates use Rust's shortest
/// round-trip decimal formatting, so re-reading reproduces the exact bits.
pub fn coordinates_csv_string(labels: &[String], layout: &Layout2D) -> String {
    let mut out = String::from("id,x,y\n");
    for (label, p) in labels.iter().zip(layout.positions()) {
        out.push_str(&format!("{label},{:?},{:?}\n", p[0], p[1]));
    }
    out
}

pub fn write_coordinates_csv(path: &Path, labels: &[String], layout: &Layout2D) -> Result<()> {
    fs::write(path, coordinates_csv_string(labels, layout))
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Reads a coordinates CSV back into `(label, x, y)` rows.
pub fn read_coordinates_csv(path: &Path) -> Result<Vec<(String, f64, f64)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let err_at =
        |line: usize, msg: &str| Error::InvalidInput(format!("{}: line {line}: {msg}", path.display()));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "id,x,y" => {}
        _ => return Err(err_at(1, "expected header 'id,x,y'")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(err_at(lineno, "expected 'id,x,y'"));
        }
        let x: f64 = fields[1]
            .parse()
            .map_err(|_| err_at(lineno, &format!("invalid x '{}'", fields[1])))?;
        let y: f64 = fields[2]
            .parse()
            .map_err(|_| err_at(lineno, &format!("invalid y '{}'", fields[2])))?;
        rows.push((fields[0].to_string(), x, y));
    }
    Ok(rows)
}

/// Renders the layout as an SVG document: edges as line segments under nodes
/// as circles, viewport fitted to the drawing with a 5% margin. `colors`
/// optionally assigns a categorical label per node, mapped through
/// [`PALETTE`].
pub fn render_svg(g: &Graph, layout: &Layout2D, colors: Option<&[usize]>) -> String {
    let ps = layout.positions();
    let (mut min_x, mut max_x, mut min_y, mut max_y) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in ps {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let margin = 0.05 * span_x.max(span_y);
    let view_w = span_x + 2.0 * margin;
    let view_h = span_y + 2.0 * margin;
    let width = 800.0;
    let height = (width * view_h / view_w).max(1.0);
    let node_r = 0.008 * span_x.max(span_y);
    let stroke_w = 0.4 * node_r;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"{} {} {view_w} {view_h}\">\n",
        min_x - margin,
        min_y - margin,
    ));
    svg.push_str(&format!(
        "<g stroke=\"#999999\" stroke-width=\"{stroke_w}\" stroke-opacity=\"0.6\">\n"
    ));
    for e in g.edges() {
        let (a, b) = (ps[e.u], ps[e.v]);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            a[0], a[1], b[0], b[1]
        ));
    }
    svg.push_str("</g>\n<g>\n");
    for (v, p) in ps.iter().enumerate() {
        let fill = match colors {
            Some(c) => PALETTE[c[v] % PALETTE.len()],
            None => DEFAULT_NODE_COLOR,
        };
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{node_r}\" fill=\"{fill}\"/>\n",
            p[0], p[1]
        ));
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
