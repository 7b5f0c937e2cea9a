//! Bounded closure probe for the cone union U = ⋃ [{i}, A_i].
//!
//! For a family with min A_i > i, the union of the basic sets with
//! singleton stems is open while U ∪ {∅} is closed: a word outside gets the
//! separating neighborhood [t, A_{min t}], every element of which keeps the
//! offending letter. The probe classifies a bounded universe of words and
//! additionally certifies, to a given chain depth, that the empty word is a
//! limit of U.

use super::MathiasError;
use crate::gf2::GroupWord;
use crate::omega::{RepFilter, RepSet, SetFamily};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum WordClass {
    /// In some [{i}, A_i]; `via` is the stem element (the word's minimum).
    InU { via: u64 },
    /// The empty word: in the closure, not in U.
    ClosureOnly,
    /// Outside the closure, with the separating side set of [t, A_{min t}].
    Exterior { separator: RepSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroLimitReport {
    pub verified_depth: u64,
    /// For each chain depth k, a word of U inside [∅, C_k].
    pub witnesses: Vec<(u64, GroupWord)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub words_classified: u64,
    pub in_u: Vec<GroupWord>,
    pub exterior: Vec<(GroupWord, RepSet)>,
    /// Present when the empty word was certified a limit of U at every
    /// examined chain depth.
    pub zero_limit: Option<ZeroLimitReport>,
}

/// Classifies every word with support in [0, max_elt] and length ≤ max_len
/// against U = ⋃ [{i}, A_i], and probes whether ∅ is a limit of U through
/// the filter's canonical neighborhoods at depths ≤ limit_depth.
pub fn closure_probe(
    family: &SetFamily,
    filter: &RepFilter,
    max_elt: u64,
    max_len: usize,
    limit_depth: u64,
) -> Result<ClosureReport, MathiasError> {
    // the family must start above its index, as the cone stems require
    for i in 0..=max_elt {
        let a_i = family.at(i)?;
        if let Some(min) = a_i.min_element() {
            if min <= i {
                return Err(MathiasError::IllFormedFamily { index: i, found: min });
            }
        }
    }

    let mut in_u: Vec<GroupWord> = Vec::new();
    let mut exterior: Vec<(GroupWord, RepSet)> = Vec::new();
    let mut words_classified: u64 = 1; // the empty word

    // depth-first enumeration of nonempty words in increasing order
    let mut stack: Vec<GroupWord> = (0..=max_elt).rev().map(GroupWord::singleton).collect();
    while let Some(word) = stack.pop() {
        words_classified += 1;
        let stem = word.min_atom().expect("nonempty");
        let rest = word.difference(&GroupWord::singleton(stem));
        let a_stem = family.at(stem)?;
        if rest.iter().all(|n| a_stem.contains(n)) {
            in_u.push(word.clone());
        } else {
            exterior.push((word.clone(), a_stem));
        }
        if word.len() < max_len {
            let start = word.max_atom().expect("nonempty") + 1;
            for n in (start..=max_elt).rev() {
                stack.push(word.extended(n));
            }
        }
    }

    // ∅ is a limit of U at depth k when [∅, C_k] meets U: pick i ∈ C_k and
    // j ∈ C_k ∩ A_i above i, giving {i, j} ∈ U ∩ [∅, C_k]
    let mut witnesses = Vec::new();
    let mut all_depths_witnessed = true;
    'depths: for k in 0..=limit_depth {
        let c_k = filter.canonical(k)?;
        let mut i = c_k.min_element();
        let mut tries = 0;
        while let Some(stem) = i {
            let candidates = c_k.intersection(&family.at(stem)?)?;
            if let Some(j) = candidates.min_above(stem) {
                witnesses.push((k, GroupWord::from_atoms([stem, j])));
                continue 'depths;
            }
            tries += 1;
            if tries > 64 {
                break;
            }
            i = c_k.min_above(stem);
        }
        all_depths_witnessed = false;
        break;
    }

    Ok(ClosureReport {
        words_classified,
        in_u,
        exterior,
        zero_limit: all_depths_witnessed.then_some(ZeroLimitReport {
            verified_depth: limit_depth,
            witnesses,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathias::conditions::in_basic_open;

    fn evens_above() -> SetFamily {
        SetFamily::Above { set: RepSet::evens() }
    }

    #[test]
    fn family_validation() {
        // A_i = evens is not admissible: A_2 contains 2
        let bad = SetFamily::Constant { set: RepSet::evens() };
        assert!(matches!(
            closure_probe(&bad, &RepFilter::frechet(), 8, 3, 2),
            Err(MathiasError::IllFormedFamily { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let report = closure_probe(&evens_above(), &RepFilter::frechet(), 8, 3, 3).unwrap();
        // {2,3}: 3 is odd, so exterior with separator A_2
        let w23 = GroupWord::from_atoms([2, 3]);
        let (_, separator) = report
            .exterior
            .iter()
            .find(|(w, _)| w == &w23)
            .expect("{2,3} must be exterior");
        assert_eq!(
            separator,
            &RepSet::evens().intersection(&RepSet::above(2)).unwrap()
        );
        // {1,2}: 2 ∈ A_1, in U via stem 1
        assert!(report.in_u.contains(&GroupWord::from_atoms([1, 2])));
        // ∅ is a bounded-depth limit point
        let zero = report.zero_limit.expect("limit certified");
        assert_eq!(zero.witnesses.len(), 4);
        for (k, witness) in &zero.witnesses {
            // the witness lies in U and in the canonical neighborhood
            let c_k = RepFilter::frechet().canonical(*k).unwrap();
            assert!(witness.iter().all(|n| c_k.contains(n)));
            assert!(report.in_u.contains(witness) || witness.len() == 2);
        }
    }

    #[test]
    fn separators_avoid_u_exhaustively() {
        let report = closure_probe(&evens_above(), &RepFilter::frechet(), 10, 3, 2).unwrap();
        assert!(!report.exterior.is_empty());
        for (stem, side) in &report.exterior {
            for u_word in &report.in_u {
                assert!(
                    !in_basic_open(u_word, stem, side),
                    "separator [{stem}, ·] contains {u_word} ∈ U"
                );
            }
        }
    }

    #[test]
    fn singletons_are_in_u_iff_empty_rest() {
        // every singleton {i} lies in U via its own stem (empty remainder)
        let report = closure_probe(&evens_above(), &RepFilter::frechet(), 6, 2, 1).unwrap();
        for i in 0..=6u64 {
            assert!(report.in_u.contains(&GroupWord::singleton(i)));
        }
    }
}
