//! Orthogonal first-order term rewriting with a focus on reduction lengths.
//!
//! The crate answers two related questions about a term rewriting system:
//!
//! * does a syntactic rule-shape criterion guarantee that every reduction of a
//!   basic term to normal form has the same length ([`criterion`]), and
//! * do the reductions of a concrete term actually agree in length, decided by
//!   exhaustively exploring its reduction graph ([`graph`]) or, for larger
//!   terms, by a memoized search over length sets ([`lengths`]).
//!
//! [`engine`] provides single-step rewriting and strategy-driven
//! normalization with step counting, and [`arith`] ships unary and binary
//! arithmetic systems used to exercise all of the above.

pub mod arith;
pub mod criterion;
pub mod engine;
pub mod graph;
pub mod lengths;
pub mod parse;
pub mod term;
pub mod trs;
pub mod unify;

pub use arith::{Builtin, Notation};
pub use criterion::{check_criterion, infer_sigma_prime, CriterionReport, RuleClass, SigmaPrime};
pub use engine::{normalize, redexes, step, Redex, ReductionTrace, Strategy};
pub use graph::{certify_uniform_length, explore, GraphError, LengthCertificate, ReductionGraph};
pub use lengths::{reduction_lengths, LengthOracle, LengthSummary, OracleError};
pub use parse::{parse_term, ParseError};
pub use term::{Node, Position, Signature, Substitution, Symbol, Term, TermError, Variable};
pub use trs::{parse_trs, Rule, Trs, TrsError};
pub use unify::{match_pattern, rename_apart, unify};

/// Fuel used when the caller does not supply one.
pub const DEFAULT_FUEL: usize = 1_000_000;

/// Node budget used when the caller does not supply one.
pub const DEFAULT_MAX_NODES: usize = 100_000;
