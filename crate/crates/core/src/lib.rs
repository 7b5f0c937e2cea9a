//! Exact computation in free Boolean groups at desk scale.
//!
//! A free Boolean group on a set of atoms is the group of finite subsets of
//! that set under symmetric difference; every element is its own inverse.
//! This crate implements the pieces of that theory which admit exact,
//! finitely-represented computation:
//!
//! - [`gf2`] — word arithmetic, parity, homomorphic extension, and GF(2)
//!   linear algebra over bit vectors;
//! - [`graev`] — pseudometric spaces with exact rational distances, the
//!   invariant seminorm extension evaluated by minimum-weight perfect
//!   matching, a dyadic non-Archimedean majorant, and decision procedures
//!   for the standard neighborhood bases of the free group topology;
//! - [`omega`] — eventually-periodic subsets of ω, finitely generated free
//!   filters, and selectivity combinatorics (diagonal intersections,
//!   selectors, greedy functions, pseudointersections);
//! - [`mathias`] — Mathias conditions and Laver-style neighborhood
//!   assignments on finite subsets of ω, bounded topology comparisons, and
//!   closure probes;
//! - [`flags`] — flag-adapted bases of GF(2) chains and the norm-greedy
//!   basis construction with its discreteness and closedness bounds.
//!
//! All arithmetic is exact: rationals are never rounded, and every verdict
//! produced by a bounded search says so in its type.

pub mod flags;
pub mod gf2;
pub mod graev;
pub mod mathias;
pub mod omega;
pub mod rational;
