//! External data ingestion: the canonical JSON graph format, a MATPOWER
//! case-file subset producing admittance Laplacians, and an
//! impedance-network builder.
//!
//! Units: MATPOWER admittances are per-unit, impedance-graph weights are
//! siemens, time is seconds. Every parser returns a structured error on
//! malformed input; none of them panic on arbitrary bytes.

mod graph_json;
mod impedance;
mod matpower;

pub use graph_json::{parse_graph_json, serialize_graph, EdgeDocument, GraphDocument, GRAPH_SCHEMA};
pub use impedance::{
    impedance_to_graph, parse_impedance_json, ImpedanceBranch, ImpedanceSpec, IMPEDANCE_SCHEMA,
};
pub use matpower::{matpower_to_graph, parse_matpower, MatpowerBranch, MatpowerBus, MatpowerCase};

use thiserror::Error;

use crate::netmodel::GraphError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("MATPOWER parse error at line {line}: {detail}")]
    Matpower { line: usize, detail: String },
    #[error("MATPOWER block `{0}` not found")]
    MissingBlock(&'static str),
    #[error("duplicate bus id {0}")]
    DuplicateBusId(i64),
    #[error("branch references unknown bus {0}")]
    UnknownBus(i64),
    #[error("branch {from}-{to} has zero impedance")]
    ZeroImpedance { from: i64, to: i64 },
    #[error("invalid impedance network: {0}")]
    InvalidImpedance(String),
}
