//! Refinement of a Laver neighborhood by a single Mathias side set.
//!
//! Over a selective filter every Laver zero-neighborhood U contains a
//! Mathias cone [∅, D]: set A_i = ⋂ { A(s) : s ∈ U, max s ≤ i } (a finite
//! intersection) and take for D a diagonal intersection of the A_i drawn
//! from the filter. The filter acts as the diagonal oracle here: D is the
//! greedy diagonal of the filter's own canonical sets trimmed above each
//! index, so it is certifiable in the filter; when the filter lacks the
//! selectivity to follow the A_i, the exhaustive inclusion check reports a
//! counterexample word instead.

use super::conditions::LaverNbhd;
use super::MathiasError;
use crate::gf2::GroupWord;
use crate::omega::{fit_arithmetic_tail, FilterVerdict, RepFilter, RepSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// The exact finite intersection A_i = ⋂ { A(s) : s ∈ U, max s ≤ i }.
///
/// Words of U are walked breadth-first; outside the prefix closure of the
/// explicit table the continuation set depends only on the word's length
/// and maximum, so whole classes of words collapse to one representative.
pub fn laver_a_set(u: &LaverNbhd, i: u64) -> Result<RepSet, MathiasError> {
    enum Node {
        Word(GroupWord),
        Class { rep: GroupWord },
    }

    let mut region: BTreeSet<GroupWord> = BTreeSet::new();
    for key in u.table().keys() {
        let letters = key.support();
        for k in 0..=letters.len() {
            region.insert(GroupWord::from_atoms(letters[..k].iter().copied()));
        }
    }

    let mut factors: BTreeSet<RepSet> = BTreeSet::new();
    let mut word_seen: BTreeSet<GroupWord> = BTreeSet::new();
    let mut class_seen: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut queue: VecDeque<Node> = VecDeque::new();
    queue.push_back(Node::Word(GroupWord::zero()));

    while let Some(node) = queue.pop_front() {
        let word = match &node {
            Node::Word(w) => w,
            Node::Class { rep } => rep,
        };
        match &node {
            Node::Word(w) => {
                if !word_seen.insert(w.clone()) {
                    continue;
                }
            }
            Node::Class { rep } => {
                if !class_seen.insert((rep.len(), rep.max_atom().expect("class words are nonempty"))) {
                    continue;
                }
            }
        }
        let side = u
            .assignment(word)?
            .ok_or(MathiasError::UndecidedAssignment { prefix: word.clone() })?;
        factors.insert(side.clone());
        let mut n = word.max_atom().map_or_else(|| side.min_element(), |m| side.min_above(m));
        while let Some(next) = n {
            if next > i {
                break;
            }
            let child = word.extended(next);
            // descendants of words outside the table's prefix closure never
            // re-enter it, so they reduce to (length, max) classes
            if region.contains(&child) {
                queue.push_back(Node::Word(child));
            } else {
                queue.push_back(Node::Class { rep: child });
            }
            n = side.min_above(next);
        }
    }

    let mut out = RepSet::omega();
    for f in factors {
        out = out.intersection(&f)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RefinementVerdict {
    /// Every word over D within the bounds lies in U.
    Verified { words_checked: u64 },
    /// A word over D escaping U; the refinement fails at this filter.
    Counterexample { word: GroupWord },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementReport {
    /// The computed intersections A_0, A_1, … up to a small display depth.
    pub a_sets: Vec<RepSet>,
    /// Elements of D up to the check bound.
    pub d_elements: Vec<u64>,
    /// Eventually-periodic fit of D, when one exists.
    pub d_fitted: Option<RepSet>,
    /// Certification of the fitted D in the filter.
    pub d_in_filter: FilterVerdict,
    /// Whether D satisfies the pairwise diagonal property against the
    /// exactly computed A_i (diagnostic: false signals the filter's
    /// canonical sets cannot follow the neighborhood).
    pub diagonal_for_computed_family: bool,
    pub verification: RefinementVerdict,
}

fn verify_cone(
    u: &LaverNbhd,
    d_elements: &[u64],
    check_len: usize,
) -> Result<RefinementVerdict, MathiasError> {
    fn walk(
        u: &LaverNbhd,
        d_elements: &[u64],
        word: &GroupWord,
        check_len: usize,
        checked: &mut u64,
    ) -> Result<Option<GroupWord>, MathiasError> {
        if word.len() >= check_len {
            return Ok(None);
        }
        let side = u
            .assignment(word)?
            .ok_or(MathiasError::UndecidedAssignment { prefix: word.clone() })?;
        let start = word.max_atom();
        for &n in d_elements {
            if start.is_some_and(|m| n <= m) {
                continue;
            }
            let child = word.extended(n);
            *checked += 1;
            if !side.contains(n) {
                return Ok(Some(child));
            }
            if let Some(bad) = walk(u, d_elements, &child, check_len, checked)? {
                return Ok(Some(bad));
            }
        }
        Ok(None)
    }

    let mut checked = 1; // the empty word belongs to every neighborhood
    match walk(u, d_elements, &GroupWord::zero(), check_len, &mut checked)? {
        Some(word) => Ok(RefinementVerdict::Counterexample { word }),
        None => Ok(RefinementVerdict::Verified { words_checked: checked }),
    }
}

/// Computes the A_i, asks the filter for a diagonal D, and exhaustively
/// verifies [∅, D] ⊆ U over words with maximum ≤ `check_max` and length
/// ≤ `check_len`.
///
/// The filter supplies D from its own canonical chain (set k of the chain,
/// trimmed above k), so D is certifiable in the filter; `filter_depth`
/// bounds the chain. A verification counterexample signals that the filter
/// is not selective enough for this neighborhood.
pub fn laver_to_mathias(
    u: &LaverNbhd,
    filter: &RepFilter,
    check_max: u64,
    check_len: usize,
    filter_depth: u64,
) -> Result<RefinementReport, MathiasError> {
    // the filter's stand-in for the requested family: canonical chain sets
    // trimmed to start above their index
    let standin = |i: u64| -> Result<RepSet, MathiasError> {
        let depth = if filter.has_schema() { i.min(filter_depth) } else { 0 };
        Ok(filter
            .canonical(depth)?
            .intersection(&RepSet::above(i))?)
    };

    // greedy diagonal of the stand-in family, collected up to check_max
    let within = standin(0)?;
    let mut d_elements: Vec<u64> = Vec::new();
    let mut chosen: Vec<RepSet> = Vec::new();
    let mut candidate = within.min_element();
    while let Some(j) = candidate {
        if j > check_max {
            break;
        }
        if within.contains(j) && chosen.iter().all(|a| a.contains(j)) {
            chosen.push(standin(j)?);
            d_elements.push(j);
        }
        candidate = Some(j + 1).filter(|j| *j <= check_max);
    }

    let d_fitted = fit_arithmetic_tail(&d_elements);
    let d_in_filter = match &d_fitted {
        Some(f) => filter.contains(f, filter_depth)?,
        None => FilterVerdict::Unknown { examined_depth: 0 },
    };

    // diagnostic: does D diagonalize the exactly computed A_i?
    let mut diagonal_ok = true;
    'outer: for (pos, &i) in d_elements.iter().enumerate() {
        let a_i = laver_a_set(u, i)?;
        for &j in &d_elements[pos + 1..] {
            if !a_i.contains(j) {
                diagonal_ok = false;
                break 'outer;
            }
        }
    }

    let report_depth = check_max.min(8);
    let mut a_sets = Vec::with_capacity(report_depth as usize + 1);
    for i in 0..=report_depth {
        a_sets.push(laver_a_set(u, i)?);
    }

    let verification = verify_cone(u, &d_elements, check_len)?;
    Ok(RefinementReport {
        a_sets,
        d_elements,
        d_fitted,
        d_in_filter,
        diagonal_for_computed_family: diagonal_ok,
        verification,
    })
}
