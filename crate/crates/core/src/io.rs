//! Edge-list and no-strike file formats, plus the JSON run manifest.
//!
//! An edge list holds one pair per line, separated by whitespace or a comma.
//! A line with a single label declares an isolated node. `#` starts a comment
//! anywhere on a line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, NoStrikeSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: self-loop on `{label}`")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: unknown node `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("label `{0}` cannot be written to an edge list")]
    UnwritableLabel(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// A parsed edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListDocument {
    pub graph: Graph,
    /// Repeated pairs that were collapsed into one edge.
    pub duplicate_edges: usize,
}

fn content(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|f| !f.is_empty())
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListDocument, IoError> {
    let mut builder = GraphBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let parts: Vec<&str> = fields(content(raw)).collect();
        match parts.as_slice() {
            [] => {}
            [label] => {
                builder.add_node(label);
            }
            [a, b] => {
                if a == b {
                    return Err(IoError::SelfLoop {
                        line,
                        label: (*a).to_owned(),
                    });
                }
                builder
                    .add_labeled_edge(a, b)
                    .map_err(|e| IoError::Malformed {
                        line,
                        message: e.to_string(),
                    })?;
            }
            _ => {
                return Err(IoError::Malformed {
                    line,
                    message: format!("expected one or two labels, found {}", parts.len()),
                })
            }
        }
    }
    let duplicate_edges = builder.duplicate_edges();
    Ok(EdgeListDocument {
        graph: builder.build(),
        duplicate_edges,
    })
}

fn writable(label: &str) -> bool {
    !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || c == ',' || c == '#')
}

/// Writes every node on its own line first, so that ids and isolated nodes
/// survive a round trip, then one line per edge.
pub fn emit_edge_list(graph: &Graph) -> Result<String, IoError> {
    if let Some(bad) = graph.labels().iter().find(|l| !writable(l)) {
        return Err(IoError::UnwritableLabel(bad.clone()));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    );
    for label in graph.labels() {
        let _ = writeln!(out, "{label}");
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", graph.label(u), graph.label(v));
    }
    Ok(out)
}

pub fn parse_no_strike(text: &str, graph: &Graph) -> Result<NoStrikeSet, IoError> {
    let mut ids = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        for label in fields(content(raw)) {
            let id = graph.node_id(label).ok_or_else(|| IoError::UnknownLabel {
                line: idx + 1,
                label: label.to_owned(),
            })?;
            ids.push(id);
        }
    }
    Ok(NoStrikeSet::new(graph, ids).expect("ids come from the graph"))
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeListDocument, IoError> {
    parse_edge_list(&read_text(path)?)
}

pub fn read_no_strike(path: &Path, graph: &Graph) -> Result<NoStrikeSet, IoError> {
    parse_no_strike(&read_text(path)?, graph)
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub graph: Option<PathBuf>,
    pub no_strike: Option<PathBuf>,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn to_json(&self) -> Result<String, IoError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_text(path, &(self.to_json()? + "\n"))
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
