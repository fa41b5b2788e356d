//! Text formats for graph input: an edge-list file with one `u v length`
//! per line and a measure file with one `v mu` per line. Blank lines and
//! `#` comments are ignored.

use crate::error::{Error, Result};

/// `(vertex_count, edges)` as read from an edge-list file.
pub type ParsedEdgeList = (usize, Vec<(usize, usize, f64)>);

/// Parses edge-list text. Returns `(vertex_count, edges)` where
/// `vertex_count` is one past the largest vertex id mentioned.
pub fn parse_edge_list(text: &str) -> Result<ParsedEdgeList> {
    let mut edges = Vec::new();
    let mut max_vertex = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "edge file line {}: expected `u v length`, got {raw:?}",
                lineno + 1
            )));
        }
        let u: usize = fields[0].parse().map_err(|_| {
            Error::InvalidArgument(format!("edge file line {}: bad vertex id", lineno + 1))
        })?;
        let v: usize = fields[1].parse().map_err(|_| {
            Error::InvalidArgument(format!("edge file line {}: bad vertex id", lineno + 1))
        })?;
        let len: f64 = fields[2].parse().map_err(|_| {
            Error::InvalidArgument(format!("edge file line {}: bad length", lineno + 1))
        })?;
        max_vertex = max_vertex.max(u).max(v);
        edges.push((u, v, len));
    }
    if edges.is_empty() {
        return Err(Error::InvalidArgument("edge file has no edges".into()));
    }
    Ok((max_vertex + 1, edges))
}

/// Parses measure text (`v mu` per line) into a dense per-vertex vector.
/// Vertices not mentioned default to `1.0`.
pub fn parse_measure(text: &str, vertex_count: usize) -> Result<Vec<f64>> {
    let mut measure = vec![1.0; vertex_count];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "measure file line {}: expected `v mu`, got {raw:?}",
                lineno + 1
            )));
        }
        let v: usize = fields[0].parse().map_err(|_| {
            Error::InvalidArgument(format!("measure file line {}: bad vertex id", lineno + 1))
        })?;
        let mu: f64 = fields[1].parse().map_err(|_| {
            Error::InvalidArgument(format!("measure file line {}: bad measure", lineno + 1))
        })?;
        if v >= vertex_count {
            return Err(Error::InvalidArgument(format!(
                "measure file line {}: vertex {v} out of range",
                lineno + 1
            )));
        }
        measure[v] = mu;
    }
    Ok(measure)
}

pub fn format_edge_list(edges: &[(usize, usize, f64)]) -> String {
    let mut out = String::new();
    for &(u, v, len) in edges {
        out.push_str(&format!("{u} {v} {len}\n"));
    }
    out
}

pub fn format_measure(measure: &[f64]) -> String {
    let mut out = String::new();
    for (v, mu) in measure.iter().enumerate() {
        out.push_str(&format!("{v} {mu}\n"));
    }
    out
}
