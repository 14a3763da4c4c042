//! File formats and diagnostics for the command-line tools.
//!
//! Graphs travel either as JSON, `{"n": 4, "edges": [[0, 1], [1, 2]]}` with
//! 0-based endpoints, or in the DIMACS edge-list dialect, a `p edge n m`
//! header followed by `e u v` lines with 1-based endpoints and `c` comments.
//! [`read_graph`] sniffs the format from the first non-blank byte. Parse
//! failures name the file, the line, and the offending token, so callers can
//! surface them verbatim as usage errors.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// JSON schema for a graph: vertex count plus 0-based edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphData {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphData {
    pub fn from_graph(g: &Graph) -> Self {
        GraphData { n: g.n(), edges: g.edges() }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, &self.edges)
    }
}

fn slurp(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Io(format!("stdin: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// Reads a JSON value, mapping failures to diagnostics that include the
/// file name and serde's line and column.
pub fn read_json<T: DeserializeOwned>(path: &str) -> Result<T> {
    let text = slurp(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// Writes a value as pretty JSON, to stdout when `path` is `-`.
pub fn write_json<T: Serialize>(path: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(format!("{path}: {e}")))?;
    text.push('\n');
    if path == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(format!("stdout: {e}")))
    } else {
        if let Some(dir) = Path::new(path).parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        }
        fs::write(path, text).map_err(|e| Error::Io(format!("{path}: {e}")))
    }
}

/// Reads a graph from JSON or DIMACS, deciding by the first non-blank byte.
pub fn read_graph(path: &str) -> Result<Graph> {
    let text = slurp(path)?;
    if text.trim_start().starts_with('{') {
        let data: GraphData =
            serde_json::from_str(&text).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        data.to_graph()
    } else {
        parse_dimacs(path, &text)
    }
}

/// Parses the DIMACS edge-list dialect. `label` names the source in
/// diagnostics; every error carries a 1-based line number.
pub fn parse_dimacs(label: &str, text: &str) -> Result<Graph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if declared.is_some() {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: repeated problem line"
                    )));
                }
                if fields.len() != 4 || (fields[1] != "edge" && fields[1] != "col") {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: expected 'p edge <n> <m>', found '{line}'"
                    )));
                }
                let n = parse_field(label, line_no, "vertex count", fields[2])?;
                let m = parse_field(label, line_no, "edge count", fields[3])?;
                declared = Some((n, m));
            }
            "e" => {
                let Some((n, _)) = declared else {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: edge before the problem line"
                    )));
                };
                if fields.len() != 3 {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: expected 'e <u> <v>', found '{line}'"
                    )));
                }
                let u: usize = parse_field(label, line_no, "endpoint", fields[1])?;
                let v: usize = parse_field(label, line_no, "endpoint", fields[2])?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: endpoint out of range 1..={n} in '{line}'"
                    )));
                }
                if u == v {
                    return Err(Error::Io(format!(
                        "{label}:{line_no}: self-loop '{line}'"
                    )));
                }
                edges.push((u.min(v) - 1, u.max(v) - 1));
            }
            other => {
                return Err(Error::Io(format!(
                    "{label}:{line_no}: unknown line type '{other}', expected 'c', 'p' or 'e'"
                )));
            }
        }
    }
    let Some((n, m)) = declared else {
        return Err(Error::Io(format!("{label}: missing 'p edge <n> <m>' line")));
    };
    edges.sort_unstable();
    edges.dedup();
    if edges.len() != m {
        return Err(Error::Io(format!(
            "{label}: problem line declares {m} edges but the file holds {} distinct ones",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

fn parse_field(label: &str, line_no: usize, what: &str, field: &str) -> Result<usize> {
    field.parse().map_err(|_| {
        Error::Io(format!("{label}:{line_no}: {what} '{field}' is not a number"))
    })
}
