use thiserror::Error;

/// Errors produced while building, analysing or optimizing SC codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid cutting vector: {0}")]
    InvalidCuttingVector(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix entry ({row}, {col}) is out of range for a {rows}x{cols} matrix")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate matrix entry ({0}, {1})")]
    DuplicateEntry(usize, usize),

    #[error("window out of range: replica {r}, span {k}, coupling length {l}")]
    WindowOutOfRange { r: usize, k: usize, l: usize },

    #[error("span {k} exceeds the maximum cycle-6 span {max}")]
    SpanTooLarge { k: usize, max: usize },

    #[error("overlap vector is not realizable: {0}")]
    NotRealizable(String),

    #[error("no balanced partition exists: {0}")]
    Infeasible(String),

    #[error("initial circulant powers give the lifted matrix {0} cycles-4")]
    InitialCycle4(usize),

    #[error("object search exceeds the subset-search cap: {0}")]
    CapExceeded(String),

    #[error("disconnected configuration template")]
    Disconnected,

    #[error("empty variable-node set")]
    EmptySet,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
