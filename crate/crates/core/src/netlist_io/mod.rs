//! Reading and writing circuits: text netlists for headless use and a
//! versioned document for saved boards.

mod layout;
mod number;
mod text;

use thiserror::Error;

use crate::circuit::ComponentId;

pub use layout::{load_layout, save_layout, BoardSpec, LayoutDocument, ParamMap, PlacementRecord, SCHEMA_VERSION};
pub use text::{format_netlist, format_record, parse_netlist, parse_netlist_bytes};

/// A problem in a text netlist. Lines and columns count from 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown component kind in '{token}'")]
    UnknownKind { line: usize, column: usize, token: String },
    #[error("line {line}, column {column}: component {id} is defined twice")]
    DuplicateId { line: usize, column: usize, id: ComponentId },
    #[error("line {line}, column {column}: bad number '{token}'")]
    BadNumber { line: usize, column: usize, token: String },
    #[error("line {line}, column {column}: {message}")]
    InvalidParam { line: usize, column: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::SyntaxError { line, column, .. }
            | ParseError::UnknownKind { line, column, .. }
            | ParseError::DuplicateId { line, column, .. }
            | ParseError::BadNumber { line, column, .. }
            | ParseError::InvalidParam { line, column, .. } => (*line, *column),
        }
    }

    /// Variant name, used as an error code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::SyntaxError { .. } => "SyntaxError",
            ParseError::UnknownKind { .. } => "UnknownKind",
            ParseError::DuplicateId { .. } => "DuplicateId",
            ParseError::BadNumber { .. } => "BadNumber",
            ParseError::InvalidParam { .. } => "InvalidParam",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("layout schema version {0} is not supported")]
    SchemaVersionUnsupported(u64),
    #[error("malformed layout document: {0}")]
    MalformedDocument(String),
}

impl LayoutError {
    pub fn code(&self) -> &'static str {
        match self {
            LayoutError::SchemaVersionUnsupported(_) => "SchemaVersionUnsupported",
            LayoutError::MalformedDocument(_) => "MalformedDocument",
        }
    }
}
