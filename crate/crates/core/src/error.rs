use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad category of a failure, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Parse,
    Validation,
    Numeric,
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{row}:{column}: {message}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid hierarchy: {}", join_violations(.0))]
    InvalidHierarchy(Vec<Violation>),

    #[error("pairwise matrix cell ({row}, {col}): {message}")]
    InvalidMatrix {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("unsupported matrix order {0} (random index known for 1..=15)")]
    UnsupportedOrder(usize),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("cannot form {classes} classes from {distinct} distinct values")]
    InfeasibleClassing { classes: usize, distinct: usize },

    #[error("record {record}: unknown category level {value:?}")]
    UnknownLevel { record: String, value: String },

    #[error("record {record}: missing value for index {index}")]
    MissingIndex { record: String, index: String },

    #[error("value {value} outside domain: {message}")]
    Domain { value: f64, message: String },

    #[error("column {0} is all zeros and cannot be normalized")]
    ZeroColumn(String),

    #[error("row {0}: both ideal distances are zero")]
    DegenerateRow(String),

    #[error("grids are not aligned: {0}")]
    Misaligned(String),

    #[error("{0}")]
    Invalid(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Parse { .. } | Error::UnknownLevel { .. } => ErrorKind::Parse,
            Error::InvalidHierarchy(_)
            | Error::InvalidMatrix { .. }
            | Error::MissingIndex { .. }
            | Error::Misaligned(_)
            | Error::Invalid(_) => ErrorKind::Validation,
            Error::UnsupportedOrder(_)
            | Error::NotConverged { .. }
            | Error::InfeasibleClassing { .. }
            | Error::Domain { .. }
            | Error::ZeroColumn(_)
            | Error::DegenerateRow(_) => ErrorKind::Numeric,
        }
    }

    pub(crate) fn parse(
        file: impl Into<String>,
        row: usize,
        column: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            file: file.into(),
            row,
            column: column.into(),
            message: message.into(),
        }
    }

    pub(crate) fn domain(value: f64, message: impl Into<String>) -> Self {
        Error::Domain {
            value,
            message: message.into(),
        }
    }
}
