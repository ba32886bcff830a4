use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("edge homophily is undefined for a graph without edges")]
    EmptyEdgeSet,

    #[error("mask is empty")]
    EmptyMask,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("model is not a GCNH model")]
    NotGcnh,

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}:{line}: {message}", .file.display())]
    Malformed {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("label {label} of node {node} is out of range for {num_classes} classes")]
    LabelOutOfRange {
        node: String,
        label: i64,
        num_classes: usize,
    },

    #[error("split {split}: index {index} is out of range for {num_nodes} nodes")]
    SplitIndexOutOfRange {
        split: usize,
        index: usize,
        num_nodes: usize,
    },

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
