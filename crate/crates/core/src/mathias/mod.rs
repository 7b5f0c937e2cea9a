//! Mathias and Laver topologies on the finite subsets of ω over a filter.
//!
//! The group of finite subsets of ω carries two natural topologies built
//! from a filter: the Mathias topology, whose basic zero-neighborhoods are
//! the downward cones of single filter sets, and the finer Laver topology,
//! whose zero-neighborhoods assign a filter set of admissible continuations
//! to every finite word. This module implements the conditions and
//! neighborhoods, the refinement that turns a Laver neighborhood into a
//! Mathias one over a selective-enough filter, bounded closure probes, and
//! the witness construction showing a word cloud clustering at zero.

mod conditions;
mod refine;
mod probe;
mod witness;

pub use conditions::{
    in_basic_open, in_laver_nbhd, laver_tree_check, mathias_leq, LaverNbhd, LaverTreeApprox,
    MathiasCondition, TreeViolation,
};
pub use probe::{closure_probe, ClosureReport, WordClass, ZeroLimitReport};
pub use refine::{laver_to_mathias, RefinementReport, RefinementVerdict};
pub use witness::{verify_ud_witness, witness_in_ud, LetterNormRule, UdLetter, UdWitness};

use crate::gf2::GroupWord;
use crate::omega::OmegaError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MathiasError {
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("condition stem {stem} must lie strictly below its side set")]
    IllFormedCondition { stem: GroupWord },
    #[error("condition side must be infinite")]
    FiniteSide,
    #[error("assignment at {stem} must start strictly above the stem")]
    IllFormedAssignment { stem: GroupWord },
    #[error("assignment undecided at prefix {prefix}: beyond the table and no default rule")]
    UndecidedAssignment { prefix: GroupWord },
    #[error("laver tree violation: {0}")]
    Tree(TreeViolation),
    #[error("family set at index {index} must start above {index}; found {found}")]
    IllFormedFamily { index: u64, found: u64 },
    #[error("search budget {budget} exhausted: {context}")]
    Budget { budget: u64, context: String },
    #[error("witness rejected: {0}")]
    WitnessInvalid(String),
}
