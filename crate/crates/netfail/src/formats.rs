//! File formats: edge-list text ("n <count>" header, "u v" lines, '#'
//! comments), graph JSON {"n": .., "edges": [[u, v], ..]}, and matrix CSV
//! with a "rows=<n>" header line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::Matrix;

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().to_vec(),
        }
    }
}

/// Parse a graph from either format; JSON is detected by a leading '{'.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_edge_list(text)
    }
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let parsed: GraphJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
    Graph::from_edge_list(parsed.n, &parsed.edges)
}

/// First non-comment line must be "n <count>"; every further line "u v".
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match n {
            None => {
                let tag = fields.next();
                let count = fields.next();
                match (tag, count, fields.next()) {
                    (Some("n"), Some(c), None) => {
                        n = Some(c.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad vertex count {c:?}", lineno + 1))
                        })?);
                    }
                    _ => {
                        return Err(Error::Parse(format!(
                            "line {}: expected header \"n <count>\"",
                            lineno + 1
                        )))
                    }
                }
            }
            Some(_) => {
                let parse = |s: Option<&str>| -> Result<usize> {
                    s.ok_or_else(|| {
                        Error::Parse(format!("line {}: expected \"u v\"", lineno + 1))
                    })?
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad vertex id", lineno + 1)))
                };
                let u = parse(fields.next())?;
                let v = parse(fields.next())?;
                if fields.next().is_some() {
                    return Err(Error::Parse(format!(
                        "line {}: trailing fields after edge",
                        lineno + 1
                    )));
                }
                pairs.push((u, v));
            }
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing \"n <count>\" header".into()))?;
    Graph::from_edge_list(n, &pairs)
}

pub fn graph_to_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Square matrix CSV: header line "rows=<n>", then n comma-separated rows.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .trim();
    let n: usize = header
        .strip_prefix("rows=")
        .ok_or_else(|| Error::Parse(format!("expected \"rows=<n>\" header, got {header:?}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad row count in header {header:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for line in lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {f:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "matrix row has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!(
            "matrix has {} rows, expected {n}",
            rows.len()
        )));
    }
    Ok(Matrix::from_rows(rows))
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = format!("rows={}\n", m.rows());
    for i in 0..m.rows() {
        let fields: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
