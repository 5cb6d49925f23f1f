//! Plain-text graph format.
//!
//! ```text
//! # comment lines start with '#', blank lines are ignored
//! n m
//! u v      (m lines, 0 <= u < v < n)
//! ```

use std::fmt::Write as _;

use super::{Graph, GraphError};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

fn numbers(line_no: usize, line: &str, expected: usize) -> Result<Vec<usize>, GraphError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(parse_err(
            line_no,
            format!("expected {expected} integers, found {} fields", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| f.parse::<usize>().map_err(|_| parse_err(line_no, format!("not a non-negative integer: {f:?}"))))
        .collect()
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match header {
            None => {
                let v = numbers(line_no, line, 2)?;
                if v[0] == 0 {
                    return Err(parse_err(line_no, "vertex count must be positive"));
                }
                header = Some((v[0], v[1]));
            }
            Some((n, m)) => {
                let v = numbers(line_no, line, 2)?;
                let (u, w) = (v[0], v[1]);
                if !(u < w && w < n) {
                    return Err(parse_err(line_no, format!("edge {u} {w} violates 0 <= u < v < {n}")));
                }
                if edges.len() == m {
                    return Err(parse_err(line_no, format!("more than the declared {m} edges")));
                }
                edges.push((line_no, u, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `n m` header"))?;
    if edges.len() != m {
        return Err(parse_err(last_line.max(1), format!("declared {m} edges, found {}", edges.len())));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(line_no, u, w) in &edges {
        if !seen.insert((u, w)) {
            return Err(parse_err(line_no, format!("duplicate edge {u} {w}")));
        }
    }
    Graph::new(n, edges.into_iter().map(|(_, u, w)| (u, w)))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.edge_count()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Graph text followed by `# label v <text>` comment lines, which
/// [`parse_graph`] ignores.
pub fn write_graph_with_labels(g: &Graph) -> String {
    let mut out = write_graph(g);
    if let Some(labels) = g.labels() {
        for (v, l) in labels.iter().enumerate() {
            writeln!(out, "# label {v} {l}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::petersen_graph;

    #[test]
    fn round_trip() {
        let p = petersen_graph();
        let text = write_graph(&p);
        assert_eq!(parse_graph(&text).unwrap(), p);
        assert!(text.starts_with("10 15\n0 1\n0 4\n0 5\n"));
    }

    #[test]
    fn comments_and_blanks() {
        let g = parse_graph("# triangle\n\n3 3\n0 1\n# mid\n0 2\n\n1 2\n").unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = |s: &str| match parse_graph(s) {
            Err(GraphError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(err("3 1\n1 0\n"), 2);
        assert_eq!(err("3 2\n0 1\n0 1\n"), 3);
        assert_eq!(err("3 1\n0 x\n"), 2);
        assert_eq!(err("3 2\n0 1\n"), 2);
        assert_eq!(err("# nothing\n"), 1);
        assert_eq!(err("3 1\n0 3\n"), 2);
    }
}
