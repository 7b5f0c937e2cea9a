//! Core arithmetic of free Boolean groups.
//!
//! A group element is a finite set of atom identifiers in canonical sorted
//! form; the group operation is symmetric difference, the zero element is
//! the empty set, and every element is its own inverse. Bit vectors over
//! GF(2) carry the linear-algebra side: homomorphic images, spans, and rank
//! certificates.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Identifier of a generator. For filter spaces these are the naturals of ω;
/// for abstract point spaces they index a name registry.
pub type AtomId = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("atom {0} has no assigned value")]
    UndefinedAtom(AtomId),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Parity of a word's length; the parity map is a homomorphism onto Z_2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A reduced element of a free Boolean group: a finite set of atoms stored
/// sorted and without repetition. Equality, hashing, and ordering are
/// structural on this canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord {
    support: Vec<AtomId>,
}

impl GroupWord {
    /// The zero element (empty support).
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn singleton(atom: AtomId) -> Self {
        Self {
            support: vec![atom],
        }
    }

    /// Builds a word from a set of atoms; duplicates are collapsed.
    pub fn from_atoms<I: IntoIterator<Item = AtomId>>(atoms: I) -> Self {
        let mut support: Vec<AtomId> = atoms.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        Self { support }
    }

    /// Builds a word from a sequence of letters, reducing mod 2: a letter
    /// occurring an even number of times cancels.
    pub fn from_letters<I: IntoIterator<Item = AtomId>>(letters: I) -> Self {
        let mut counts: BTreeMap<AtomId, u64> = BTreeMap::new();
        for a in letters {
            *counts.entry(a).or_insert(0) += 1;
        }
        Self {
            support: counts
                .into_iter()
                .filter(|(_, c)| c % 2 == 1)
                .map(|(a, _)| a)
                .collect(),
        }
    }

    pub fn support(&self) -> &[AtomId] {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.support.iter().copied()
    }

    /// Reduced length; the word lies in the n-th length stratum iff this is ≤ n.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.support.binary_search(&atom).is_ok()
    }

    pub fn min_atom(&self) -> Option<AtomId> {
        self.support.first().copied()
    }

    pub fn max_atom(&self) -> Option<AtomId> {
        self.support.last().copied()
    }

    pub fn parity(&self) -> Parity {
        if self.support.len().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Group operation: (a ∖ b) ∪ (b ∖ a), merged in one pass over the
    /// sorted supports.
    pub fn sym_diff(&self, other: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.support, &other.support);
        let mut support = Vec::with_capacity(a.len() + b.len());
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    support.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    support.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        support.extend_from_slice(&a[i..]);
        support.extend_from_slice(&b[j..]);
        Self { support }
    }

    /// Set difference of supports (not a group operation).
    pub fn difference(&self, other: &Self) -> Self {
        Self {
            support: self
                .support
                .iter()
                .copied()
                .filter(|a| !other.contains(*a))
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.support.iter().all(|a| other.contains(*a))
    }

    /// True when `self` is an initial segment of `other` in the order of ω:
    /// the first `self.len()` elements of `other` are exactly `self`.
    pub fn is_initial_segment_of(&self, other: &Self) -> bool {
        self.support.len() <= other.support.len()
            && other.support[..self.support.len()] == self.support[..]
    }

    /// Extends the word by one atom strictly above its maximum.
    pub fn extended(&self, atom: AtomId) -> Self {
        debug_assert!(self.max_atom().is_none_or(|m| atom > m));
        let mut support = self.support.clone();
        support.push(atom);
        Self { support }
    }
}

impl FromIterator<AtomId> for GroupWord {
    fn from_iter<I: IntoIterator<Item = AtomId>>(iter: I) -> Self {
        Self::from_atoms(iter)
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.support.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Word length; equals the support size in a Boolean group.
pub fn word_length(g: &GroupWord) -> usize {
    g.len()
}

/// Symmetric difference as a free function, matching the word operation.
pub fn sym_diff(a: &GroupWord, b: &GroupWord) -> GroupWord {
    a.sym_diff(b)
}

/// Parity of a word; even words form the kernel of the augmentation map.
pub fn parity(g: &GroupWord) -> Parity {
    g.parity()
}

// ---------------------------------------------------------------------------
// Bit vectors over GF(2)
// ---------------------------------------------------------------------------

/// A dense bit vector of fixed dimension. Coordinate 0 is the first bit of
/// the rendered binary string; lexicographic comparison of rendered strings
/// matches [`BitVec::lex_cmp`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a binary string such as `"110"`; coordinate 0 is the leftmost
    /// character.
    pub fn parse_binary(s: &str) -> Result<Self, String> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(format!("invalid bit {other:?} in {s:?}")),
            }
        }
        Ok(v)
    }

    /// Single basis vector e_i of the given dimension.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Low-dimension constructor from a mask: bit i of `mask` becomes
    /// coordinate i.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { mask } else { mask & ((1 << len) - 1) };
        }
        v
    }

    /// Inverse of [`BitVec::from_mask`]; requires dimension ≤ 64.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set coordinate, if any.
    pub fn lowest_set(&self) -> Option<usize> {
        for (w, word) in self.words.iter().enumerate() {
            if *word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Lexicographic comparison of the rendered binary strings (coordinate 0
    /// most significant). For equal dimensions a vector with an earlier set
    /// bit compares greater, so the zero vector is least.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.len, other.len);
        for i in 0..self.len {
            match (self.get(i), other.get(i)) {
                (false, true) => return std::cmp::Ordering::Less,
                (true, false) => return std::cmp::Ordering::Greater,
                _ => {}
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_string().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        BitVec::parse_binary(&s).map_err(serde::de::Error::custom)
    }
}

fn check_dims(vectors: &[BitVec], dim: usize) -> Result<(), Gf2Error> {
    for v in vectors {
        if v.len() != dim {
            return Err(Gf2Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// Row-echelon store for incremental GF(2) elimination. Each stored row
/// remembers which input vectors combine to it.
struct Eliminator {
    dim: usize,
    // (pivot coordinate, reduced vector, combination over input indices)
    rows: Vec<(usize, BitVec, Vec<usize>)>,
}

impl Eliminator {
    fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    /// Reduces `v` by the stored rows; returns the residue and the set of
    /// input indices whose sum was subtracted.
    fn reduce(&self, v: &BitVec) -> (BitVec, Vec<usize>) {
        let mut r = v.clone();
        let mut combo: Vec<usize> = Vec::new();
        for (pivot, row, row_combo) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
                combo.extend_from_slice(row_combo);
            }
        }
        // indices used an even number of times cancel
        combo.sort_unstable();
        let mut reduced = Vec::new();
        let mut i = 0;
        while i < combo.len() {
            if i + 1 < combo.len() && combo[i] == combo[i + 1] {
                i += 2;
            } else {
                reduced.push(combo[i]);
                i += 1;
            }
        }
        (r, reduced)
    }

    /// Inserts `v` (the input with index `idx`); returns false if dependent.
    fn insert(&mut self, idx: usize, v: &BitVec) -> bool {
        let (r, mut combo) = self.reduce(v);
        match r.lowest_set() {
            None => false,
            Some(pivot) => {
                combo.push(idx);
                combo.sort_unstable();
                self.rows.push((pivot, r, combo));
                self.rows.sort_by_key(|(p, _, _)| *p);
                true
            }
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Rank of a list of vectors (all of dimension `dim`).
pub fn rank(vectors: &[BitVec], dim: usize) -> Result<usize, Gf2Error> {
    check_dims(vectors, dim)?;
    let mut elim = Eliminator::new(dim);
    for (i, v) in vectors.iter().enumerate() {
        elim.insert(i, v);
    }
    let _ = elim.dim;
    Ok(elim.rank())
}

/// Decides membership of `v` in the span of `basis` by elimination.
///
/// On success returns the subset of `basis` indices whose XOR equals `v`
/// (the certificate); `None` means `v` is outside the span.
pub fn span_membership(basis: &[BitVec], v: &BitVec) -> Result<Option<Vec<usize>>, Gf2Error> {
    check_dims(basis, v.len())?;
    let mut elim = Eliminator::new(v.len());
    for (i, b) in basis.iter().enumerate() {
        elim.insert(i, b);
    }
    let (residue, combo) = elim.reduce(v);
    if residue.is_zero() {
        Ok(Some(combo))
    } else {
        Ok(None)
    }
}

/// Membership without the certificate.
pub fn in_span(basis: &[BitVec], v: &BitVec) -> Result<bool, Gf2Error> {
    Ok(span_membership(basis, v)?.is_some())
}

/// Homomorphic extension of an atom assignment: the image of a word is the
/// XOR of the images of its letters, so zero maps to the zero vector.
pub fn extend_hom(
    assignment: &BTreeMap<AtomId, BitVec>,
    g: &GroupWord,
    dim: usize,
) -> Result<BitVec, Gf2Error> {
    let mut acc = BitVec::zeros(dim);
    for atom in g.iter() {
        let v = assignment
            .get(&atom)
            .ok_or(Gf2Error::UndefinedAtom(atom))?;
        if v.len() != dim {
            return Err(Gf2Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        acc.xor_assign(v);
    }
    Ok(acc)
}

/// Enumerates all elements of the span of `basis`, each exactly once, in an
/// unspecified order. Intended for desk-scale subgroups (rank ≤ 20).
pub fn enumerate_span(basis: &[BitVec], dim: usize) -> Result<Vec<BitVec>, Gf2Error> {
    check_dims(basis, dim)?;
    let mut elim = Eliminator::new(dim);
    for (i, b) in basis.iter().enumerate() {
        elim.insert(i, b);
    }
    let independent: Vec<BitVec> = elim.rows.iter().map(|(_, r, _)| r.clone()).collect();
    assert!(independent.len() <= 20, "span too large to enumerate");
    let mut out = vec![BitVec::zeros(dim)];
    for b in &independent {
        let mut extended = Vec::with_capacity(out.len() * 2);
        for v in &out {
            extended.push(v.xor(b));
        }
        out.extend(extended);
    }
    Ok(out)
}
