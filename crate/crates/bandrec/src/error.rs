//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A ring division left a remainder where exactness was required.
    #[error("non-exact division: {0}")]
    NonExactDivision(String),
    /// A substitution was attempted with no value bound to a band symbol.
    #[error("missing symbol value: {0}")]
    MissingSymbol(String),
    /// A first-row entry beyond column R was nonzero during expansion.
    #[error("band leak: {0}")]
    BandLeak(String),
    /// A reduction produced an operator outside the encountered set.
    #[error("unsuccessful reduction: {0}")]
    UnsuccessfulReduction(String),
    /// An operator or matrix failed a shape assertion.
    #[error("structure violation: {0}")]
    StructureViolation(String),
    /// The expansion queue was not exhausted after the final round.
    #[error("non-termination: {0}")]
    NonTermination(String),
    /// An equation referenced an operator missing from the index.
    #[error("unknown operator: {0}")]
    UnknownOperator(String),
    /// Sequential elimination could not clear the remaining operator terms.
    #[error("elimination stuck: {0}")]
    EliminationStuck(String),
    /// A row or column index fell outside the matrix it addresses.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// Row or column lists do not form a valid minor operator.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    /// Textual input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
