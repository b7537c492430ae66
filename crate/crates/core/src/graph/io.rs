//! Plain-text edge lists: a header line `n m`, then `m` lines `u v [w]`.
//! Blank lines and `#` comments are ignored; ids are 0-based.

use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, GraphError, NodeId};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(parse_err(line_no, "expected header `n m`"));
                }
                let n = fields[0].parse().map_err(|_| parse_err(line_no, "n is not an integer"))?;
                let m = fields[1].parse().map_err(|_| parse_err(line_no, "m is not an integer"))?;
                header = Some((n, m));
            }
            Some((n, _)) => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(parse_err(line_no, "expected `u v [w]`"));
                }
                let id = |s: &str| -> Result<NodeId, GraphError> {
                    let v: NodeId =
                        s.parse().map_err(|_| parse_err(line_no, format!("bad node id `{s}`")))?;
                    if v >= n {
                        return Err(parse_err(line_no, format!("node {v} out of range [0, {n})")));
                    }
                    Ok(v)
                };
                let u = id(fields[0])?;
                let v = id(fields[1])?;
                let w = match fields.get(2) {
                    Some(s) => s.parse().map_err(|_| parse_err(line_no, format!("bad weight `{s}`")))?,
                    None => 1.0,
                };
                edges.push((u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if edges.len() != m {
        return Err(parse_err(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    let g = Graph::from_weighted_edges(n, edges)?;
    g.check_symmetry()?;
    Ok(g)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| GraphError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_edge_list(&text)
}

/// Serializes `g` with edges as `u v` (`u < v`) and an explicit weight only
/// when it differs from 1. Each comment becomes a leading `# ` line.
pub fn write_edge_list(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let loops: Vec<NodeId> = (0..g.n()).filter(|&u| g.self_loop(u) > 0.0).collect();
    let _ = writeln!(out, "{} {}", g.n(), g.m() + loops.len());
    for (u, v, w) in g.edges() {
        if w == 1.0 {
            let _ = writeln!(out, "{u} {v}");
        } else {
            let _ = writeln!(out, "{u} {v} {w}");
        }
    }
    for u in loops {
        let _ = writeln!(out, "{u} {u} {}", g.self_loop(u) / 2.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn parses_comments_and_weights() {
        let g = parse_edge_list("# triangle\n3 3\n\n0 1\n1 2 2.5 # heavy\n2 0\n").unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.weight(2, 1), 2.5);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_list("3 2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(err, GraphError::Parse { line: 3, message: "bad node id `x`".into() });
        assert!(matches!(parse_edge_list("3 2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_edge_list("2 1\n0 5\n"), Err(GraphError::Parse { line: 2, .. })));
    }

    #[test]
    fn write_then_read() {
        let g = generate(&Family::ErdosRenyi { n: 30, p: 0.2, seed: 4 }).unwrap();
        let text = write_edge_list(&g, &["generated".to_string()]);
        assert!(text.starts_with("# generated\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        let looped = Graph::from_weighted_edges(2, [(0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(parse_edge_list(&write_edge_list(&looped, &[])).unwrap(), looped);
    }
}
