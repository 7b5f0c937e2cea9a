//! Basis constructions for GF(2) chains and normed Boolean groups.
//!
//! Two algorithms live here. The flag adaptation refines a strictly
//! decreasing chain of subspaces into a full flag (one dimension per step)
//! and sifts an arbitrary basis into one adapted to it: each output vector
//! sits exactly at its slot, each chain level is spanned by a suffix of the
//! output, and every prefix of the output spans the same subspace as the
//! corresponding input prefix. The norm-greedy construction replaces a
//! basis of a normed group by one whose tails are as short as the norm
//! allows; the accompanying verifier checks the 2^k letter bound and the
//! separation bounds that make the length strata discrete and closed.

use crate::gf2::{rank, span_membership, BitVec, Gf2Error};
use crate::rational::Rat;
use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlagError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },
    #[error("chain inclusion is not strict between levels {0} and {1}")]
    NonStrictChain(usize, usize),
    #[error("chain level {level} is not contained in level {0}", level = .0 + 1)]
    NotAChain(usize),
    #[error("last chain level must be the zero subspace")]
    LastLevelNotTrivial,
    #[error("input vector {index} is dependent on its predecessors")]
    InputDependent { index: usize },
    #[error("input vector {index} lies outside the top subspace")]
    InputOutsideGroup { index: usize },
    #[error("expected {expected} basis vectors, got {got}")]
    WrongBasisSize { expected: usize, got: usize },
    #[error("norm table must list {expected} values, got {got}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("norm of the zero element must be 0")]
    NonzeroNormAtZero,
    #[error("norm must be positive away from zero; element {element} is not")]
    NonPositiveNorm { element: String },
    #[error("norm is not subadditive on ({g}, {h})")]
    NotSubadditive { g: String, h: String },
    #[error("{bound} bound violated at {witness}")]
    BoundViolated { bound: String, witness: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

const MAX_DIM: usize = 64;

// ---------------------------------------------------------------------------
// mask-level linear algebra (hot path; vectors fit one machine word)
// ---------------------------------------------------------------------------

/// Incremental echelon basis over u64 masks.
#[derive(Clone, Default)]
struct MaskBasis {
    rows: Vec<u64>, // each with a unique lowest set bit among the rows
}

impl MaskBasis {
    fn reduce(&self, mut v: u64) -> u64 {
        for row in &self.rows {
            let pivot = row & row.wrapping_neg();
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.rows.push(r);
        self.rows.sort_unstable_by_key(|row| row.trailing_zeros());
        true
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// All 2^rank elements of the span, as masks.
    fn enumerate(&self) -> Vec<u64> {
        assert!(self.rows.len() <= 24, "span too large to enumerate");
        let mut out = vec![0u64];
        for row in &self.rows {
            let mut doubled = Vec::with_capacity(out.len() * 2);
            for v in &out {
                doubled.push(v ^ row);
            }
            out.extend(doubled);
        }
        out
    }
}

fn to_masks(vectors: &[BitVec], dim: usize) -> Result<Vec<u64>, FlagError> {
    if dim > MAX_DIM {
        return Err(FlagError::DimTooLarge { dim, max: MAX_DIM });
    }
    for v in vectors {
        if v.len() != dim {
            return Err(FlagError::Gf2(Gf2Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            }));
        }
    }
    Ok(vectors.iter().map(BitVec::to_mask).collect())
}

/// Lexicographic key on the rendered bit string: coordinate 0 first.
fn lex_key(mask: u64, dim: usize) -> u64 {
    mask.reverse_bits() >> (64 - dim)
}

// ---------------------------------------------------------------------------
// flags
// ---------------------------------------------------------------------------

/// A strictly decreasing chain of GF(2) subspaces ending at {0}, each given
/// by a spanning list.
#[derive(Clone, Debug)]
pub struct Flag {
    dim: usize,
    chain: Vec<Vec<BitVec>>,
}

impl Flag {
    pub fn new(dim: usize, chain: Vec<Vec<BitVec>>) -> Result<Self, FlagError> {
        let flag = Self { dim, chain };
        flag.validate()?;
        Ok(flag)
    }

    fn level_basis(&self, level: usize) -> Result<MaskBasis, FlagError> {
        let masks = to_masks(&self.chain[level], self.dim)?;
        let mut basis = MaskBasis::default();
        for m in masks {
            basis.insert(m);
        }
        Ok(basis)
    }

    fn validate(&self) -> Result<(), FlagError> {
        if self.chain.is_empty() {
            return Err(FlagError::LastLevelNotTrivial);
        }
        for i in 0..self.chain.len() - 1 {
            let upper = self.level_basis(i)?;
            let lower = self.level_basis(i + 1)?;
            for m in to_masks(&self.chain[i + 1], self.dim)? {
                if !upper.contains(m) {
                    return Err(FlagError::NotAChain(i));
                }
            }
            if lower.rank() >= upper.rank() {
                return Err(FlagError::NonStrictChain(i, i + 1));
            }
        }
        let last = self.level_basis(self.chain.len() - 1)?;
        if last.rank() != 0 {
            return Err(FlagError::LastLevelNotTrivial);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.chain.len()
    }

    pub fn level_span(&self, level: usize) -> &[BitVec] {
        &self.chain[level]
    }
}

/// The refinement of a flag into a full chain (one dimension per slot),
/// with representatives chosen lexicographically least in each quotient.
struct RefinedFlag {
    /// Echelon bases of H_0 ⊃ H_1 ⊃ … ⊃ H_{D−1}; H_D = {0} is implicit.
    subspaces: Vec<MaskBasis>,
    /// Original flag level of each slot.
    slot_level: Vec<usize>,
}

impl RefinedFlag {
    fn build(flag: &Flag) -> Result<Self, FlagError> {
        let levels = flag.levels();
        let mut reps_per_level: Vec<Vec<u64>> = Vec::with_capacity(levels - 1);
        for i in 0..levels - 1 {
            let upper = flag.level_basis(i)?;
            let lower = flag.level_basis(i + 1)?;
            let gap = upper.rank() - lower.rank();
            // lexicographically least representatives of the quotient,
            // picked greedily along the sorted subgroup enumeration
            let mut elements = upper.enumerate();
            elements.sort_unstable_by_key(|m| lex_key(*m, flag.dim()));
            let mut occupied = lower.clone();
            let mut reps = Vec::with_capacity(gap);
            for m in elements {
                if reps.len() == gap {
                    break;
                }
                if occupied.insert(m) {
                    reps.push(m);
                }
            }
            debug_assert_eq!(reps.len(), gap);
            reps_per_level.push(reps);
        }

        let mut subspaces = Vec::new();
        let mut slot_level = Vec::new();
        for i in 0..levels - 1 {
            let lower = flag.level_basis(i + 1)?;
            let reps = &reps_per_level[i];
            for drop in 0..reps.len() {
                let mut h = lower.clone();
                for rep in &reps[drop..] {
                    h.insert(*rep);
                }
                subspaces.push(h);
                slot_level.push(i);
            }
        }
        Ok(Self { subspaces, slot_level })
    }

    fn slot_count(&self) -> usize {
        self.subspaces.len()
    }

    /// The unique slot t with v ∈ H_t ∖ H_{t+1} (v nonzero in H_0).
    fn slot_of(&self, v: u64) -> usize {
        debug_assert!(v != 0 && self.subspaces[0].contains(v));
        let mut t = 0;
        while t + 1 < self.subspaces.len() && self.subspaces[t + 1].contains(v) {
            t += 1;
        }
        t
    }
}

/// Result of sifting an input basis through a refined flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedBasis {
    /// Output vectors in placement order (prefix spans match the input).
    pub vectors: Vec<BitVec>,
    /// Refined slot of each output vector.
    pub slots: Vec<usize>,
    /// Original flag level of each refined slot.
    pub slot_flag_level: Vec<usize>,
    /// Spanning sets of the refined chain H_0 ⊃ H_1 ⊃ …, for rank
    /// certificates.
    pub refined: Vec<Vec<BitVec>>,
}

/// Sifts `input` (a basis of the flag's top level) into a basis adapted to
/// the flag: on a slot collision the occupying vector is added and the sum
/// re-slotted, which strictly increases the slot, so each vector settles in
/// at most one pass over the chain.
pub fn flag_adapted_basis(flag: &Flag, input: &[BitVec]) -> Result<AdaptedBasis, FlagError> {
    let dim = flag.dim();
    let masks = to_masks(input, dim)?;
    let top = flag.level_basis(0)?;
    if input.len() != top.rank() {
        return Err(FlagError::WrongBasisSize { expected: top.rank(), got: input.len() });
    }
    let mut independent = MaskBasis::default();
    for (index, m) in masks.iter().enumerate() {
        if !top.contains(*m) {
            return Err(FlagError::InputOutsideGroup { index });
        }
        if !independent.insert(*m) {
            return Err(FlagError::InputDependent { index });
        }
    }

    let refined = RefinedFlag::build(flag)?;
    let slot_count = refined.slot_count();
    let mut slots: Vec<Option<u64>> = vec![None; slot_count];
    let mut placements: Vec<(usize, u64)> = Vec::with_capacity(masks.len());
    for &m in &masks {
        let mut v = m;
        loop {
            let t = refined.slot_of(v);
            match slots[t] {
                None => {
                    slots[t] = Some(v);
                    placements.push((t, v));
                    break;
                }
                Some(occupant) => v ^= occupant,
            }
        }
    }

    let as_bitvec = |m: u64| BitVec::from_mask(dim, m);
    Ok(AdaptedBasis {
        vectors: placements.iter().map(|(_, v)| as_bitvec(*v)).collect(),
        slots: placements.iter().map(|(t, _)| *t).collect(),
        slot_flag_level: refined.slot_level.clone(),
        refined: refined
            .subspaces
            .iter()
            .map(|h| h.rows.iter().map(|m| as_bitvec(*m)).collect())
            .collect(),
    })
}

/// Independent rank-certificate verification of an adapted basis: each
/// vector sits in its slot and not the next, every prefix spans the same
/// subspace as the input prefix, and every flag level is spanned by exactly
/// the vectors at its slots and deeper.
pub fn verify_adapted_basis(
    flag: &Flag,
    input: &[BitVec],
    adapted: &AdaptedBasis,
) -> Result<(), FlagError> {
    let dim = flag.dim();
    let fail = |msg: String| Err(FlagError::VerificationFailed(msg));
    if adapted.vectors.len() != input.len() {
        return fail("output size differs from input".into());
    }
    let slot_count = adapted.refined.len();
    // slot membership certificates
    for (j, v) in adapted.vectors.iter().enumerate() {
        let t = adapted.slots[j];
        if span_membership(&adapted.refined[t], v)?.is_none() {
            return fail(format!("vector {j} outside its slot subspace H_{t}"));
        }
        if t + 1 < slot_count {
            if span_membership(&adapted.refined[t + 1], v)?.is_some() {
                return fail(format!("vector {j} not outside H_{}", t + 1));
            }
        } else if v.is_zero() {
            return fail(format!("vector {j} is zero"));
        }
    }
    // prefix spans
    for n in 0..input.len() {
        let prefix_out = &adapted.vectors[..=n];
        for v in &input[..=n] {
            if span_membership(prefix_out, v)?.is_none() {
                return fail(format!("input prefix {n} escapes the output prefix span"));
            }
        }
        if rank(prefix_out, dim)? != n + 1 {
            return fail(format!("output prefix {n} is dependent"));
        }
    }
    // per-level spanning: level i = span of vectors with slot level ≥ i
    for level in 0..flag.levels() - 1 {
        let selected: Vec<BitVec> = adapted
            .vectors
            .iter()
            .enumerate()
            .filter(|(j, _)| adapted.slot_flag_level[adapted.slots[*j]] >= level)
            .map(|(_, v)| v.clone())
            .collect();
        let level_rank = rank(flag.level_span(level), dim)?;
        if rank(&selected, dim)? != level_rank {
            return fail(format!("selected vectors do not span level {level}"));
        }
        for v in flag.level_span(level) {
            if span_membership(&selected, v)?.is_none() {
                return fail(format!("level {level} escapes its slot vectors"));
            }
        }
        for v in &selected {
            if span_membership(flag.level_span(level), v)?.is_none() {
                return fail(format!("slot vectors escape level {level}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// norm oracles and the greedy basis
// ---------------------------------------------------------------------------

/// A total norm table on a small Boolean group, indexed by coordinate mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormOracle {
    dim: usize,
    values: Vec<Rat>,
}

/// Largest dimension for exhaustive norm tables.
pub const MAX_NORM_DIM: usize = 16;

impl NormOracle {
    /// Validates the axioms: value 0 exactly at zero, positive elsewhere,
    /// and (for dimension ≤ 8, where the quadratic sweep is affordable)
    /// subadditivity on every pair; the first violating pair is reported.
    pub fn new(dim: usize, values: Vec<Rat>) -> Result<Self, FlagError> {
        if dim > MAX_NORM_DIM {
            return Err(FlagError::DimTooLarge { dim, max: MAX_NORM_DIM });
        }
        let size = 1usize << dim;
        if values.len() != size {
            return Err(FlagError::WrongValueCount { expected: size, got: values.len() });
        }
        if !values[0].is_zero() {
            return Err(FlagError::NonzeroNormAtZero);
        }
        for (m, v) in values.iter().enumerate().skip(1) {
            if *v <= Rat::zero() {
                return Err(FlagError::NonPositiveNorm {
                    element: format!("{m:0width$b}", width = dim),
                });
            }
        }
        if dim <= 8 {
            for g in 0..size {
                for h in 0..size {
                    if values[g ^ h] > &values[g] + &values[h] {
                        return Err(FlagError::NotSubadditive {
                            g: format!("{g:0width$b}", width = dim),
                            h: format!("{h:0width$b}", width = dim),
                        });
                    }
                }
            }
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value_of_mask(&self, mask: u64) -> &Rat {
        &self.values[mask as usize]
    }

    pub fn value(&self, v: &BitVec) -> Result<&Rat, FlagError> {
        if v.len() != self.dim {
            return Err(FlagError::Gf2(Gf2Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            }));
        }
        Ok(self.value_of_mask(v.to_mask()))
    }
}

/// Turns an arbitrary positive seed table into a genuine norm by closing it
/// under the triangle inequality: each value becomes the cheapest assembly
/// of the element from seed pieces (shortest path from zero in the fully
/// generated Cayley graph). Positivity survives because every assembly
/// bottoms out in seed values.
pub fn subadditive_closure(dim: usize, seed: Vec<Rat>) -> Result<Vec<Rat>, FlagError> {
    let size = 1usize << dim;
    if seed.len() != size {
        return Err(FlagError::WrongValueCount { expected: size, got: seed.len() });
    }
    let mut dist: Vec<Option<Rat>> = vec![None; size];
    let mut done = vec![false; size];
    dist[0] = Some(Rat::zero());
    loop {
        let mut current: Option<usize> = None;
        for v in 0..size {
            if done[v] || dist[v].is_none() {
                continue;
            }
            if current.is_none_or(|c| dist[v] < dist[c]) {
                current = Some(v);
            }
        }
        let Some(v) = current else { break };
        done[v] = true;
        for w in 1..size {
            let step = dist[v].as_ref().expect("reached node") + &seed[w];
            let target = &mut dist[v ^ w];
            if target.as_ref().is_none_or(|t| step < *t) {
                *target = Some(step);
            }
        }
    }
    Ok(dist.into_iter().map(|d| d.expect("graph is connected")).collect())
}

/// Canonical order on letter subsets: lexicographic on the sorted index
/// lists (a strict prefix precedes its extensions).
fn canonical_subset_key(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// The norm-greedy basis: e'_1 = e_1, and e'_{k+1} is a minimum-norm word
/// containing e_{k+1} over the alphabet of e'_1..e'_k and e_{k+1}, ties
/// broken by the canonical subset order. Every prefix spans the same
/// subspace as the input prefix.
pub fn norm_greedy_basis(
    oracle: &NormOracle,
    input: &[BitVec],
) -> Result<Vec<BitVec>, FlagError> {
    let dim = oracle.dim();
    let masks = to_masks(input, dim)?;
    let mut independent = MaskBasis::default();
    for (index, m) in masks.iter().enumerate() {
        if !independent.insert(*m) {
            return Err(FlagError::InputDependent { index });
        }
    }

    let mut output: Vec<u64> = Vec::with_capacity(masks.len());
    for (k, &e_next) in masks.iter().enumerate() {
        // candidates: e_{k+1} plus any subset of the previous output,
        // scanned in canonical order so ties resolve deterministically
        let mut subsets: Vec<u64> = (0..(1u64 << k)).collect();
        subsets.sort_by_key(|s| canonical_subset_key(*s));
        let mut best: Option<(u64, &Rat)> = None;
        for s in subsets {
            let mut word = e_next;
            for (i, prev) in output.iter().enumerate() {
                if s >> i & 1 == 1 {
                    word ^= prev;
                }
            }
            let value = oracle.value_of_mask(word);
            if best.as_ref().is_none_or(|(_, b)| value < *b) {
                best = Some((word, value));
            }
        }
        output.push(best.expect("candidate set nonempty").0);
    }
    Ok(output.into_iter().map(|m| BitVec::from_mask(dim, m)).collect())
}

/// Tightest observed ratios in a greedy-bounds sweep. All three bounds are
/// consequences of the greedy construction, so a violation indicates a
/// bug, not an input defect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyBoundsReport {
    pub words_checked: u64,
    pub pairs_checked: u64,
    /// max over words and letters of ‖letter‖ / (2^k ‖word‖); ≤ 1 when the
    /// letter bound holds. None when no word had positive norm ratio data.
    pub tightest_letter_ratio: Option<String>,
    /// min over distinct same-length pairs of ‖w+w'‖ / d_w; ≥ 1 when the
    /// separation bound holds.
    pub tightest_separation_ratio: Option<String>,
    /// min over (length-n, shorter) pairs of ‖w+w'‖ / d_w; ≥ 1 when the
    /// closedness bound holds.
    pub tightest_closedness_ratio: Option<String>,
}

fn pow2_rat(k: usize) -> Rat {
    Rat::from_integer(num::BigInt::from(1u64 << k))
}

/// Exhaustive check, over all words of reduced basis-length exactly `n`, of
/// the letter bound ‖e'_{i_{n−k}}‖ ≤ 2^k ‖w‖ and of the separation bound
/// ‖w + w'‖ ≥ min_k ‖e'_{i_k}‖ / 2^(2n) against words of length n (the
/// strata are discrete) and of shorter length (the strata are closed).
pub fn verify_greedy_bounds(
    basis: &[BitVec],
    oracle: &NormOracle,
    n: usize,
) -> Result<GreedyBoundsReport, FlagError> {
    let dim = oracle.dim();
    let masks = to_masks(basis, dim)?;
    let mut report = GreedyBoundsReport {
        words_checked: 0,
        pairs_checked: 0,
        tightest_letter_ratio: None,
        tightest_separation_ratio: None,
        tightest_closedness_ratio: None,
    };
    if n == 0 || n > masks.len() {
        return Ok(report);
    }

    // words of length exactly n as sorted index lists
    let mut words: Vec<(Vec<usize>, u64)> = Vec::new();
    for s in 0u64..(1 << masks.len()) {
        if s.count_ones() as usize != n {
            continue;
        }
        let letters: Vec<usize> = (0..masks.len()).filter(|i| s >> i & 1 == 1).collect();
        let value = letters.iter().fold(0u64, |acc, i| acc ^ masks[*i]);
        words.push((letters, value));
    }
    // shorter words for the closedness bound
    let mut shorter: Vec<u64> = Vec::new();
    for s in 0u64..(1 << masks.len()) {
        if (s.count_ones() as usize) < n {
            let value = (0..masks.len())
                .filter(|i| s >> i & 1 == 1)
                .fold(0u64, |acc, i| acc ^ masks[i]);
            shorter.push(value);
        }
    }

    let mut tightest_letter: Option<Rat> = None;
    let mut tightest_sep: Option<Rat> = None;
    let mut tightest_closed: Option<Rat> = None;
    let two_pow_2n = pow2_rat(2 * n);

    for (letters, w) in &words {
        report.words_checked += 1;
        let w_norm = oracle.value_of_mask(*w);
        for (back, letter) in letters.iter().rev().enumerate() {
            let letter_norm = oracle.value_of_mask(masks[*letter]);
            let bound = pow2_rat(back) * w_norm;
            if *letter_norm > bound {
                return Err(FlagError::BoundViolated {
                    bound: "letter".into(),
                    witness: format!("word {letters:?}, letter {letter}"),
                });
            }
            if !bound.is_zero() {
                let ratio = letter_norm / &bound;
                if tightest_letter.as_ref().is_none_or(|t| ratio > *t) {
                    tightest_letter = Some(ratio);
                }
            }
        }
        let d_w = letters
            .iter()
            .map(|i| oracle.value_of_mask(masks[*i]))
            .min()
            .expect("n ≥ 1")
            / &two_pow_2n;
        for (other_letters, w2) in &words {
            if w2 == w {
                continue;
            }
            report.pairs_checked += 1;
            let gap = oracle.value_of_mask(w ^ w2);
            if *gap < d_w {
                return Err(FlagError::BoundViolated {
                    bound: "separation".into(),
                    witness: format!("words {letters:?} and {other_letters:?}"),
                });
            }
            let ratio = gap / &d_w;
            if tightest_sep.as_ref().is_none_or(|t| ratio < *t) {
                tightest_sep = Some(ratio);
            }
        }
        for w2 in &shorter {
            report.pairs_checked += 1;
            let gap = oracle.value_of_mask(w ^ w2);
            if *gap < d_w {
                return Err(FlagError::BoundViolated {
                    bound: "closedness".into(),
                    witness: format!("word {letters:?} against a shorter word"),
                });
            }
            let ratio = gap / &d_w;
            if tightest_closed.as_ref().is_none_or(|t| ratio < *t) {
                tightest_closed = Some(ratio);
            }
        }
    }

    let fmt = |q: Option<Rat>| q.map(|q| crate::rational::to_frac_string(&q));
    report.tightest_letter_ratio = fmt(tightest_letter);
    report.tightest_separation_ratio = fmt(tightest_sep);
    report.tightest_closedness_ratio = fmt(tightest_closed);
    Ok(report)
}
