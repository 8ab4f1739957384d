//! DIMACS edge format: `c` comments, one `p edge <n> <m>` header, `e <u> <v>`
//! lines with 1-based endpoints.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use log::warn;

use super::Graph;
use crate::error::{Error, Result};

/// Counters for input irregularities that were dropped during parsing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub declared_edges: usize,
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

pub fn parse_dimacs<R: Read>(mut reader: R) -> Result<(Graph, ParseStats)> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_str(&text)
}

pub fn read_dimacs_file(path: &Path) -> Result<(Graph, ParseStats)> {
    let file = std::fs::File::open(path)?;
    parse_dimacs(std::io::BufReader::new(file))
}

fn parse_str(text: &str) -> Result<(Graph, ParseStats)> {
    let mut graph: Option<Graph> = None;
    let mut stats = ParseStats::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        match tag {
            "c" => {}
            "p" => {
                if graph.is_some() {
                    return Err(parse_err(line_no, "duplicate problem line"));
                }
                let format = tokens.next();
                if !matches!(format, Some("edge") | Some("col")) {
                    return Err(parse_err(line_no, "expected `p edge <n> <m>`"));
                }
                let n = parse_count(tokens.next(), line_no, "vertex count")?;
                stats.declared_edges = parse_count(tokens.next(), line_no, "edge count")?;
                graph = Some(Graph::empty(n));
            }
            "e" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_err(line_no, "edge line before problem line"))?;
                let n = g.n();
                let u = parse_endpoint(tokens.next(), n, line_no)?;
                let v = parse_endpoint(tokens.next(), n, line_no)?;
                if u == v {
                    stats.self_loops += 1;
                } else if !g.add_edge(u, v) {
                    stats.duplicate_edges += 1;
                }
            }
            other => {
                return Err(parse_err(line_no, &format!("unknown line type `{other}`")));
            }
        }
    }

    let graph = graph.ok_or_else(|| parse_err(0, "missing `p edge` header"))?;
    if stats.duplicate_edges > 0 || stats.self_loops > 0 {
        warn!(
            "dropped {} duplicate edges and {} self-loops",
            stats.duplicate_edges, stats.self_loops
        );
    }
    Ok((graph, stats))
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(line, &format!("malformed {what}")))
}

fn parse_endpoint(tok: Option<&str>, n: usize, line: usize) -> Result<usize> {
    let id: usize = tok
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(line, "malformed edge endpoint"))?;
    if id == 0 || id > n {
        return Err(parse_err(
            line,
            &format!("endpoint {id} out of range [1, {n}]"),
        ));
    }
    Ok(id - 1)
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

/// Serializes with sorted edges so equal graphs give identical text.
pub fn write_dimacs(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p edge {} {}", g.n(), g.m());
    for (u, v) in g.sorted_edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}
