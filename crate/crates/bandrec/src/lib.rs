//! Derivation and verification of linear recursions satisfied by the
//! determinants of banded, square Toeplitz matrix families with symbolic
//! band entries.
//!
//! The pipeline: expand first-row minors of the symbolic family until the
//! set of operators closes ([`engine`]), assemble the resulting first-order
//! system ([`solver`]), extract a single scalar recursion, and check every
//! identity against exact determinant evaluation ([`oracle`]).

pub mod cli;
pub mod engine;
pub mod error;
pub mod operator;
pub mod oracle;
pub mod output;
pub mod poly;
pub mod shift;
pub mod solver;
pub mod symbols;

pub use engine::{Equation, EquationTerm, ExpansionResult};
pub use error::{Error, Result};
pub use operator::{compose, minor_entry, MinorOp, Reduction};
pub use oracle::{CheckReport, DetCache, ExactMatrix};
pub use poly::MultiPoly;
pub use shift::ShiftPoly;
pub use solver::{SubstitutionElimination, RecursionPoly, TransferMatrix};
pub use symbols::{BandValues, Integer, Rational, SymbolTable};
