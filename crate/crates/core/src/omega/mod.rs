//! Computable subsets of ω and free filters over them.
//!
//! Sets are represented in eventually-periodic form (a finite prefix of bits
//! followed by a repeating block), which keeps every Boolean combination and
//! every finiteness question decidable. Filters are given by finitely many
//! explicit generators plus an optional indexed generator rule, and always
//! contain the cofinite sets.

mod combinatorics;
mod family;
mod filter;
mod repset;

pub use combinatorics::{
    diagonal_intersection, diagonal_intersection_fn, diagonal_intersection_within,
    fit_arithmetic_tail, greedy_function, pseudointersection_check, selective_witness,
    PseudoFailure, PseudoOutcome, SelectiveOutcome, SelectorMode,
};
pub use family::SetFamily;
pub use filter::{FilterVerdict, RepFilter};
pub use repset::RepSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OmegaError {
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("representation too large: {0}")]
    RepresentationTooLarge(String),
    #[error("cannot parse set literal {0:?}: {1}")]
    BadLiteral(String, String),
    #[error("family index {index} out of range: {reason}")]
    FamilyIndex { index: u64, reason: String },
    #[error("filter generator {0} is finite; free filters need infinite generators")]
    FiniteGenerator(String),
    #[error("filter is improper: intersection of generators at depth {depth} is finite")]
    ImproperFilter { depth: u64 },
    #[error("search exhausted at bound {bound}: {context}")]
    SearchExhausted { bound: u64, context: String },
    #[error("family is not a partition near {witness}: {reason}")]
    NotAPartition { witness: u64, reason: String },
}
