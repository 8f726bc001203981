//! Strict JSON graph documents, schema `lapflow-graph/1`.

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::netmodel::ComplexGraph;
use crate::numkernel::c;

pub const GRAPH_SCHEMA: &str = "lapflow-graph/1";

/// On-disk graph document. Unknown fields are rejected; the `schema` field
/// may be omitted on input and defaults to [`GRAPH_SCHEMA`]. For undirected
/// graphs each edge may be listed in one or both directions (weights must
/// match); serialization emits each undirected edge once with `from < to`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<EdgeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: usize,
    pub to: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn default_schema() -> String {
    GRAPH_SCHEMA.to_string()
}

impl GraphDocument {
    pub fn to_graph(&self) -> Result<ComplexGraph, IngestError> {
        if self.schema != GRAPH_SCHEMA {
            return Err(IngestError::Schema(format!(
                "unsupported schema `{}`, expected `{GRAPH_SCHEMA}`",
                self.schema
            )));
        }
        let edges: Vec<(usize, usize, crate::Scalar)> = self
            .edges
            .iter()
            .map(|e| (e.from, e.to, c(e.re, e.im)))
            .collect();
        Ok(ComplexGraph::new(
            self.n,
            self.directed,
            &edges,
            self.labels.clone(),
        )?)
    }

    pub fn from_graph(graph: &ComplexGraph) -> Self {
        let mut edges = Vec::new();
        for e in graph.edges() {
            if !graph.directed() && e.from > e.to {
                continue; // one document edge per undirected pair
            }
            edges.push(EdgeDocument {
                from: e.from,
                to: e.to,
                re: e.weight.re,
                im: e.weight.im,
            });
        }
        Self {
            schema: GRAPH_SCHEMA.to_string(),
            n: graph.n(),
            directed: graph.directed(),
            edges,
            labels: graph.node_labels().map(|l| l.to_vec()),
        }
    }
}

/// Strict parse; JSON syntax errors carry line/column context and schema
/// violations name the offending field.
pub fn parse_graph_json(text: &str) -> Result<ComplexGraph, IngestError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    doc.to_graph()
}

/// Deterministic serialization that [`parse_graph_json`] round-trips.
pub fn serialize_graph(graph: &ComplexGraph) -> String {
    serde_json::to_string_pretty(&GraphDocument::from_graph(graph))
        .expect("graph document serialization cannot fail")
}
