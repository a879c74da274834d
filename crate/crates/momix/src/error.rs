use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by parsing, validation, and the estimation pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("line {line}: malformed token `{token}`")]
    ParseToken { line: usize, token: String },

    #[error("line {line}: node index {index} out of range (node_count {node_count})")]
    IndexRange {
        line: usize,
        index: usize,
        node_count: usize,
    },

    #[error("self-loop ({u}, {u}) is not allowed")]
    SelfLoop { u: usize },

    #[error("edge endpoint {index} exceeds node_count {node_count}")]
    EndpointRange { index: usize, node_count: usize },

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    InvalidDataset(String),

    #[error("unsupported motif family size {0}; expected 4 or 5")]
    UnsupportedFamily(usize),

    #[error("graph with {node_count} nodes exceeds brute-force cap {cap}")]
    BruteForceCap { node_count: usize, cap: usize },

    #[error("graphon index {0} out of range 0..=6")]
    GraphonIndex(usize),

    #[error("mixing weight {0} outside [0, 1]")]
    MixWeight(f64),

    #[error("quadrature unsupported for motifs with {k} vertices; use Monte Carlo")]
    QuadratureArity { k: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("k-means requires K <= number of points ({k} > {points})")]
    TooManyClusters { k: usize, points: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate batch: every anchor was skipped")]
    DegenerateBatch,

    #[error("{0}")]
    InvalidBatch(String),

    #[error("bound spec invalid: {0}")]
    InvalidBoundSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
