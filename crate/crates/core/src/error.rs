use thiserror::Error;

use crate::zigzag::Crown;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("order would contain a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("invalid element name `{0}` (expected [A-Za-z0-9_]+)")]
    InvalidName(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("posets are limited to {max} elements, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("posets must have at least one element")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sequence is empty")]
    EmptySequence,
    #[error("subset is empty")]
    EmptySubset,
    #[error("sequence is not a crown: {0}")]
    NotACrown(String),
    #[error("sequence is not a 4-crown")]
    NotA4Crown,
    #[error("crown has only four points; lifting needs at least six")]
    CrownTooShort,

    #[error("map does not match the carriers of its posets: {0}")]
    CarrierMismatch(String),
    #[error("map is not an order homomorphism")]
    NotHomomorphism,
    #[error("map is not a retraction")]
    NotRetraction,
    #[error("`{x}` is not I-retractable to `{z}`")]
    NotIrreducible { x: String, z: String },
    #[error("precondition failed at `{element}`: {reason}")]
    PreconditionFailed { element: String, reason: String },
    #[error("poset is not flat")]
    NotFlat,
    #[error("a shorter crown joins the same endpoints")]
    MinimalityViolated(Crown),
    #[error("poset is not connected")]
    NotConnected,
    #[error("(`{0}`, `{1}`) is not a minmax covering pair")]
    NotMinMaxCover(String, String),

    #[error("search budget of {max_nodes} nodes exhausted")]
    BudgetExceeded { max_nodes: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}
