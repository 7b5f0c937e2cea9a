//! Pseudometric spaces and the invariant seminorm on free Boolean groups.
//!
//! A pseudometric on the generating set extends to a maximal invariant
//! seminorm on the group; on a word the seminorm is the minimum over
//! perfect pairings of the word's letters of the summed pair distances,
//! with one basepoint letter padding odd words. This module evaluates that
//! minimum exactly, provides an independent enumeration oracle, builds the
//! dyadic non-Archimedean majorant of a pseudometric, and decides
//! membership in the standard neighborhood bases of the free topology
//! (pseudometric balls, cover sums, and the linear subgroups generated by
//! disjoint covers).

mod covers;
mod majorant;
mod matching;
mod space;

pub use covers::{coset_signature, in_linear_subgroup, in_u_gamma, DisjointCover, GammaVerdict};
pub use majorant::nonarch_majorant;
pub use matching::{
    graev_dist, graev_norm, graev_norm_bruteforce, graev_norm_with_cancellations, in_u_d,
    BruteForceResult,
};
pub use space::{Flavor, LetterNorm, MetricViolation, PseudometricSpace, SpaceSpec};

use crate::gf2::AtomId;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraevError {
    #[error("distance table is missing entries: {0:?}")]
    MissingEntries(Vec<(String, String)>),
    #[error("pair ({0}, {1}) assigned twice with different values")]
    ConflictingEntry(String, String),
    #[error("metric invariant violated: {0}")]
    Metric(MetricViolation),
    #[error("atom {0} is not a point of the space")]
    AtomOutsideSpace(AtomId),
    #[error("the basepoint is the zero element and cannot occur as a letter")]
    BasepointInWord,
    #[error("word has {len} letters; this operation enumerates matchings only up to {max}")]
    SupportTooLarge { len: usize, max: usize },
    #[error("distance d({x}, {y}) = {value} is not < 1; normalize the metric first")]
    NeedsNormalization { x: String, y: String, value: String },
    #[error("majorant needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("unknown point name {0:?}")]
    UnknownPoint(String),
    #[error("letter norms must be positive; r({0}) is not")]
    NonPositiveLetterNorm(AtomId),
    #[error("cover block {0} is empty")]
    EmptyBlock(usize),
    #[error("atom {0} occurs in two blocks of a cover")]
    OverlappingBlocks(AtomId),
    #[error("atom {0} lies outside every block of the cover")]
    AtomOutsideCover(AtomId),
    #[error("bad space document: {0}")]
    Document(String),
}
