//! Disjoint covers: the neighborhood sums U(γ₁) + … + U(γₙ) and the linear
//! subgroups they generate.

use super::GraevError;
use crate::gf2::{AtomId, BitVec, GroupWord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A partition of a point set into nonempty disjoint blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointCover {
    blocks: Vec<Vec<AtomId>>,
}

impl DisjointCover {
    pub fn new(blocks: Vec<Vec<AtomId>>) -> Result<Self, GraevError> {
        let mut seen = BTreeMap::new();
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(GraevError::EmptyBlock(i));
            }
            for atom in block {
                if seen.insert(*atom, i).is_some() {
                    return Err(GraevError::OverlappingBlocks(*atom));
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Vec<AtomId>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, atom: AtomId) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&atom))
    }

    /// Checks that the blocks cover exactly the given point set.
    pub fn covers_exactly(&self, points: &[AtomId]) -> Result<(), GraevError> {
        for p in points {
            if self.block_of(*p).is_none() {
                return Err(GraevError::AtomOutsideCover(*p));
            }
        }
        let block_atoms: usize = self.blocks.iter().map(|b| b.len()).sum();
        if block_atoms != points.len() {
            // some block atom is not a point; name one
            for b in &self.blocks {
                for a in b {
                    if !points.contains(a) {
                        return Err(GraevError::AtomOutsideSpace(*a));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-block parity vector of a word: bit i is set when block i holds an
/// odd number of the word's letters.
pub fn coset_signature(g: &GroupWord, cover: &DisjointCover) -> Result<BitVec, GraevError> {
    let mut signature = BitVec::zeros(cover.block_count());
    for atom in g.iter() {
        let block = cover
            .block_of(atom)
            .ok_or(GraevError::AtomOutsideCover(atom))?;
        signature.set(block, !signature.get(block));
    }
    Ok(signature)
}

/// Membership in the subgroup generated by U(γ): a word is a sum of
/// same-block pairs iff every block holds an even number of its letters, so
/// the subgroup is the kernel of the signature map and its index divides
/// 2^(block count).
pub fn in_linear_subgroup(g: &GroupWord, cover: &DisjointCover) -> Result<bool, GraevError> {
    Ok(coset_signature(g, cover)?.is_zero())
}

/// Outcome of the bounded cover-sum membership search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaVerdict {
    /// A representation was found: each entry pairs two letters inside one
    /// block of the cover at the given position, no position used twice.
    Member {
        pairs: Vec<(AtomId, AtomId, usize)>,
        cancellations: Vec<AtomId>,
    },
    /// Not representable with the given cover prefix and cancellation
    /// budget. `needs_more_covers` marks the structurally undecided case
    /// (more pairs than covers), where a longer prefix could still admit
    /// the word.
    NotFound {
        covers_available: usize,
        cancel_depth: usize,
        needs_more_covers: bool,
    },
}

impl GammaVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, GammaVerdict::Member { .. })
    }
}

fn search_assignment(
    letters: &[AtomId],
    covers: &[DisjointCover],
    used: &mut Vec<bool>,
    out: &mut Vec<(AtomId, AtomId, usize)>,
) -> bool {
    let Some((&first, rest)) = letters.split_first() else {
        return true;
    };
    for (k, &partner) in rest.iter().enumerate() {
        // skip duplicate partners at the same recursion level
        if k > 0 && rest[k - 1] == partner {
            continue;
        }
        for slot in 0..covers.len() {
            if used[slot] {
                continue;
            }
            let same_block = covers[slot]
                .block_of(first)
                .is_some_and(|b| covers[slot].block_of(partner) == Some(b));
            if !same_block {
                continue;
            }
            used[slot] = true;
            out.push((first, partner, slot));
            let mut remaining = Vec::with_capacity(letters.len() - 2);
            remaining.extend_from_slice(&rest[..k]);
            remaining.extend_from_slice(&rest[k + 1..]);
            if search_assignment(&remaining, covers, used, out) {
                return true;
            }
            out.pop();
            used[slot] = false;
        }
    }
    false
}

/// Decides membership of `g` in U(γ₁) + … + U(γₙ) for the given cover
/// prefix: some pairing of the letters, assigned injectively to covers,
/// with each pair inside one block. The search then retries with up to
/// `cancel_depth` extra cancelling letter pairs drawn from `ground`.
pub fn in_u_gamma(
    g: &GroupWord,
    covers: &[DisjointCover],
    cancel_depth: usize,
    ground: &[AtomId],
) -> Result<GammaVerdict, GraevError> {
    for atom in g.iter() {
        if covers.iter().any(|c| c.block_of(atom).is_none()) {
            return Err(GraevError::AtomOutsideCover(atom));
        }
    }
    if g.is_zero() {
        return Ok(GammaVerdict::Member { pairs: vec![], cancellations: vec![] });
    }
    if g.len() % 2 == 1 {
        // sums of pairs are even words; no augmentation changes parity
        return Ok(GammaVerdict::NotFound {
            covers_available: covers.len(),
            cancel_depth,
            needs_more_covers: false,
        });
    }
    if g.len() / 2 > covers.len() {
        return Ok(GammaVerdict::NotFound {
            covers_available: covers.len(),
            cancel_depth,
            needs_more_covers: true,
        });
    }

    // cancellation multisets: up to cancel_depth ground letters, each added twice
    let mut choices: Vec<Vec<AtomId>> = vec![vec![]];
    let mut frontier: Vec<Vec<AtomId>> = vec![vec![]];
    for _ in 0..cancel_depth {
        let mut next = Vec::new();
        for base in &frontier {
            for z in ground {
                if base.last().is_none_or(|l| z >= l) {
                    let mut bigger = base.clone();
                    bigger.push(*z);
                    next.push(bigger);
                }
            }
        }
        choices.extend(next.iter().cloned());
        frontier = next;
    }

    for cancellations in &choices {
        if (g.len() + 2 * cancellations.len()) / 2 > covers.len() {
            continue;
        }
        let mut letters: Vec<AtomId> = g.iter().collect();
        for z in cancellations {
            letters.push(*z);
            letters.push(*z);
        }
        letters.sort_unstable();
        let mut used = vec![false; covers.len()];
        let mut pairs = Vec::new();
        if search_assignment(&letters, covers, &mut used, &mut pairs) {
            return Ok(GammaVerdict::Member {
                pairs,
                cancellations: cancellations.clone(),
            });
        }
    }
    Ok(GammaVerdict::NotFound {
        covers_available: covers.len(),
        cancel_depth,
        needs_more_covers: false,
    })
}
