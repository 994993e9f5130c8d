use thiserror::Error;

use crate::term::Var;

/// Errors raised while building or evaluating over finite algebras.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("designated point `{0}` is not an arity-0 symbol")]
    BadPoint(String),
    #[error("table for `{symbol}` has {got} entries, expected {expected}")]
    BadTableSize {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("table entry {value} for `{symbol}` is out of range 0..{size}")]
    TableEntryOutOfRange {
        symbol: String,
        value: usize,
        size: usize,
    },
    #[error("element {0} is out of range 0..{1}")]
    ElementOutOfRange(usize, usize),
    #[error("variable {0} is unbound")]
    UnboundVariable(Var),
    #[error("algebras do not share a signature")]
    SignatureMismatch,
    #[error("empty variety presentation")]
    EmptyVariety,
    #[error("partition is not compatible with the algebra")]
    IncompatiblePartition,
    #[error("missing role binding `{0}`")]
    MissingBinding(String),
    #[error("view is not {0}")]
    ViewNotValid(String),
    #[error("an ideal term needs at least one y-slot")]
    NoYSlot,
    #[error("free variable {0} is outside the declared slots")]
    SlotMismatch(Var),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid algebra file: {0}")]
    File(String),
}

pub type Result<T> = std::result::Result<T, Error>;
