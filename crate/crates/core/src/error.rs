use thiserror::Error;

/// Errors raised by the constructions in this crate.
///
/// Variants marked as "bug signals" should never surface for inputs that
/// satisfy the documented preconditions; they exist so that a broken
/// invariant is reported instead of silently producing a wrong object.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty ground set")]
    EmptyGround,

    #[error("ground set mismatch: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },

    #[error("ground set of {0} points exceeds the 64-point subset limit")]
    GroundTooLarge(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("base size {0} is not supported here")]
    UnsupportedBase(usize),

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: usize, right: usize },

    #[error("invalid function table: {0}")]
    InvalidTable(String),

    #[error("arity mismatch for {name}: expected {expected}, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("element {0} is not in the carrier")]
    NotInCarrier(usize),

    #[error("operation result escapes the carrier (closure violation)")]
    ClosureViolation,

    #[error("constant {0} is missing from the carrier")]
    MissingConstant(usize),

    #[error("partition is not compatible with the operations")]
    Incompatible,

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("round trip failed: {0}")]
    RoundTrip(String),

    #[error("value depends on the chosen representation: {0}")]
    RepresentationDependence(String),

    #[error("map is not uniformly continuous: {0}")]
    NotUniformlyContinuous(String),

    #[error("generator order violated: {0}")]
    NotBelow(String),

    #[error("directed system is invalid: {0}")]
    InvalidSystem(String),

    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("formula has free variables: {0:?}")]
    FreeVariables(Vec<String>),

    #[error("limit reduced power is not an ultrapower")]
    NotUltra,

    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
