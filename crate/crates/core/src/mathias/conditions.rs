//! Conditions, basic open sets, Laver neighborhoods, and tree validation.

use super::MathiasError;
use crate::gf2::GroupWord;
use crate::omega::{FilterVerdict, OmegaError, RepFilter, RepSet, SetFamily};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A pair (s, A): a finite stem below an infinite side set from the filter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MathiasCondition {
    stem: GroupWord,
    side: RepSet,
}

impl MathiasCondition {
    pub fn new(stem: GroupWord, side: RepSet) -> Result<Self, MathiasError> {
        if side.is_finite() {
            return Err(MathiasError::FiniteSide);
        }
        if let (Some(max), Some(min)) = (stem.max_atom(), side.min_element()) {
            if max >= min {
                return Err(MathiasError::IllFormedCondition { stem });
            }
        }
        Ok(Self { stem, side })
    }

    pub fn stem(&self) -> &GroupWord {
        &self.stem
    }

    pub fn side(&self) -> &RepSet {
        &self.side
    }
}

/// The extension order: `stronger ≤ weaker` iff the weaker stem is an
/// initial segment of the stronger one, the stronger side is contained in
/// the weaker, and new stem letters come from the weaker side.
pub fn mathias_leq(
    stronger: &MathiasCondition,
    weaker: &MathiasCondition,
) -> Result<bool, MathiasError> {
    Ok(weaker.stem.is_initial_segment_of(&stronger.stem)
        && stronger.side.is_subset_of(&weaker.side)?
        && stronger
            .stem
            .difference(&weaker.stem)
            .iter()
            .all(|n| weaker.side.contains(n)))
}

/// Membership of a word in the basic set [s, A] = { t : s ⊑ t, t ∖ s ⊆ A }.
///
/// The initial-segment requirement puts every extension letter above max s,
/// so a side set reaching below the stem is implicitly truncated.
pub fn in_basic_open(t: &GroupWord, s: &GroupWord, side: &RepSet) -> bool {
    s.is_initial_segment_of(t) && t.difference(s).iter().all(|n| side.contains(n))
}

/// A finitely described zero-neighborhood of the Laver topology: an
/// explicit table of continuation sets for small stems plus a default rule
/// indexed by stem length, always restricted above the stem's maximum.
/// The empty word belongs to every such neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaverNbhd {
    table: BTreeMap<GroupWord, RepSet>,
    rule: Option<SetFamily>,
}

impl LaverNbhd {
    /// Neighborhood with no entries yet; add a rule or table rows.
    pub fn empty() -> Self {
        Self { table: BTreeMap::new(), rule: None }
    }

    /// Neighborhood given entirely by a length-indexed rule.
    pub fn from_rule(rule: SetFamily) -> Self {
        Self { table: BTreeMap::new(), rule: Some(rule) }
    }

    /// Adds an explicit table entry; it must start strictly above the stem.
    pub fn with_entry(mut self, stem: GroupWord, side: RepSet) -> Result<Self, MathiasError> {
        if let (Some(max), Some(min)) = (stem.max_atom(), side.min_element()) {
            if min <= max {
                return Err(MathiasError::IllFormedAssignment { stem });
            }
        }
        if side.is_empty() {
            return Err(MathiasError::IllFormedAssignment { stem });
        }
        self.table.insert(stem, side);
        Ok(self)
    }

    pub fn table(&self) -> &BTreeMap<GroupWord, RepSet> {
        &self.table
    }

    pub fn rule(&self) -> Option<&SetFamily> {
        self.rule.as_ref()
    }

    /// The continuation set A(s), or None when s falls outside the table
    /// and no rule is present.
    pub fn assignment(&self, s: &GroupWord) -> Result<Option<RepSet>, OmegaError> {
        if let Some(side) = self.table.get(s) {
            return Ok(Some(side.clone()));
        }
        match &self.rule {
            None => Ok(None),
            Some(rule) => {
                let base = rule.at(s.len() as u64)?;
                let restricted = match s.max_atom() {
                    None => base,
                    Some(m) => base.intersection(&RepSet::above(m))?,
                };
                Ok(Some(restricted))
            }
        }
    }
}

/// Prefix-recursive membership: the empty word always belongs, and
/// t = {t₁ < … < t_k} belongs iff each t_{i+1} continues the prefix
/// {t₁..t_i} inside its assigned set.
pub fn in_laver_nbhd(t: &GroupWord, u: &LaverNbhd) -> Result<bool, MathiasError> {
    let letters = t.support();
    let mut prefix = GroupWord::zero();
    for &next in letters {
        let side = u
            .assignment(&prefix)?
            .ok_or(MathiasError::UndecidedAssignment { prefix: prefix.clone() })?;
        if !side.contains(next) {
            return Ok(false);
        }
        prefix = prefix.extended(next);
    }
    Ok(true)
}

/// A finite approximation to a Laver tree: a prefix-closed node set with a
/// stem and declared successor sets for post-stem nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaverTreeApprox {
    pub nodes: BTreeSet<GroupWord>,
    pub stem: GroupWord,
    pub succ: BTreeMap<GroupWord, RepSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    MissingPrefix { node: GroupWord, prefix: GroupWord },
    StemNotANode,
    StemIncomparable { node: GroupWord },
    SuccessorMissing { node: GroupWord },
    SuccessorNotAboveNode { node: GroupWord },
    SuccessorNotInFilter { node: GroupWord, verdict: FilterVerdict },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::MissingPrefix { node, prefix } => {
                write!(f, "node {node} lacks its prefix {prefix}")
            }
            TreeViolation::StemNotANode => write!(f, "stem is not a node"),
            TreeViolation::StemIncomparable { node } => {
                write!(f, "node {node} is incomparable with the stem")
            }
            TreeViolation::SuccessorMissing { node } => {
                write!(f, "post-stem node {node} has no successor set")
            }
            TreeViolation::SuccessorNotAboveNode { node } => {
                write!(f, "successor set at {node} reaches below the node")
            }
            TreeViolation::SuccessorNotInFilter { node, .. } => {
                write!(f, "successor set at {node} is not certified in the filter")
            }
        }
    }
}

/// Validates a Laver tree approximation against a filter: prefix closure,
/// stem comparability, and filter membership of every post-stem successor
/// set (checked at the given chain depth).
pub fn laver_tree_check(
    tree: &LaverTreeApprox,
    filter: &RepFilter,
    depth: u64,
) -> Result<(), MathiasError> {
    for node in &tree.nodes {
        let letters = node.support();
        for k in 0..letters.len() {
            let prefix = GroupWord::from_atoms(letters[..k].iter().copied());
            if !tree.nodes.contains(&prefix) {
                return Err(MathiasError::Tree(TreeViolation::MissingPrefix {
                    node: node.clone(),
                    prefix,
                }));
            }
        }
    }
    if !tree.nodes.contains(&tree.stem) {
        return Err(MathiasError::Tree(TreeViolation::StemNotANode));
    }
    for node in &tree.nodes {
        let comparable = node.is_initial_segment_of(&tree.stem)
            || tree.stem.is_initial_segment_of(node);
        if !comparable {
            return Err(MathiasError::Tree(TreeViolation::StemIncomparable {
                node: node.clone(),
            }));
        }
    }
    for node in &tree.nodes {
        if !tree.stem.is_initial_segment_of(node) {
            continue;
        }
        let succ = tree.succ.get(node).ok_or_else(|| {
            MathiasError::Tree(TreeViolation::SuccessorMissing { node: node.clone() })
        })?;
        if let (Some(max), Some(min)) = (node.max_atom(), succ.min_element()) {
            if min <= max {
                return Err(MathiasError::Tree(TreeViolation::SuccessorNotAboveNode {
                    node: node.clone(),
                }));
            }
        }
        let verdict = filter.contains(succ, depth)?;
        if !verdict.is_yes() {
            return Err(MathiasError::Tree(TreeViolation::SuccessorNotInFilter {
                node: node.clone(),
                verdict,
            }));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(atoms: &[u64]) -> GroupWord {
        GroupWord::from_atoms(atoms.iter().copied())
    }

    fn evens_above(n: u64) -> RepSet {
        RepSet::evens().intersection(&RepSet::above(n)).unwrap()
    }

    #[test]
    fn condition_validation() {
        assert!(MathiasCondition::new(w(&[2, 4]), evens_above(4)).is_ok());
        assert!(matches!(
            MathiasCondition::new(w(&[2, 4]), RepSet::evens()),
            Err(MathiasError::IllFormedCondition { .. })
        ));
        assert!(matches!(
            MathiasCondition::new(w(&[]), RepSet::from_finite(&[3]).unwrap()),
            Err(MathiasError::FiniteSide)
        ));
    }

    #[test]
    fn leq_examples() {
        let weaker = MathiasCondition::new(GroupWord::zero(), RepSet::evens()).unwrap();
        let stronger = MathiasCondition::new(w(&[2, 4]), evens_above(4)).unwrap();
        assert!(mathias_leq(&stronger, &weaker).unwrap());

        // {1,2} over evens>2 is not below (∅, evens): 1 is odd
        let odd_stem = MathiasCondition::new(w(&[1, 2]), evens_above(2)).unwrap();
        assert!(!mathias_leq(&odd_stem, &weaker).unwrap());

        // reflexive
        assert!(mathias_leq(&stronger, &stronger).unwrap());
    }

    #[test]
    fn leq_is_a_partial_order_on_samples() {
        let mut conditions = Vec::new();
        for stem in [w(&[]), w(&[2]), w(&[2, 4]), w(&[4]), w(&[1, 3])] {
            for above in [0u64, 4, 6] {
                let min = stem.max_atom().map_or(0, |m| m.max(above));
                let side = RepSet::evens()
                    .union(&RepSet::odds().intersection(&RepSet::above(8)).unwrap())
                    .unwrap()
                    .intersection(&RepSet::above(min))
                    .unwrap();
                if let Ok(c) = MathiasCondition::new(stem.clone(), side) {
                    conditions.push(c);
                }
            }
        }
        for a in &conditions {
            assert!(mathias_leq(a, a).unwrap());
            for b in &conditions {
                if mathias_leq(a, b).unwrap() && mathias_leq(b, a).unwrap() {
                    assert_eq!(a, b, "antisymmetry");
                }
                for c in &conditions {
                    if mathias_leq(a, b).unwrap() && mathias_leq(b, c).unwrap() {
                        assert!(mathias_leq(a, c).unwrap(), "transitivity");
                    }
                }
            }
        }
    }

    #[test]
    fn basic_open_examples() {
        let odds_above_1 = RepSet::odds().intersection(&RepSet::above(1)).unwrap();
        assert!(in_basic_open(&w(&[1, 3, 5]), &w(&[1]), &odds_above_1));
        assert!(!in_basic_open(&w(&[1, 2]), &w(&[1]), &odds_above_1));
        assert!(!in_basic_open(&w(&[3]), &w(&[1]), &odds_above_1));
    }

    #[test]
    fn laver_membership_examples() {
        // A(∅) = evens, A(s) = multiples of 4 above max s otherwise
        let u = LaverNbhd::from_rule(SetFamily::Table {
            entries: vec![RepSet::evens()],
            default: Some(Box::new(SetFamily::Constant {
                set: RepSet::multiples_of(4).unwrap(),
            })),
        });
        assert!(in_laver_nbhd(&w(&[2, 8]), &u).unwrap());
        assert!(!in_laver_nbhd(&w(&[2, 6]), &u).unwrap());
        assert!(in_laver_nbhd(&GroupWord::zero(), &u).unwrap());
    }

    #[test]
    fn undecided_beyond_table() {
        let u = LaverNbhd::empty()
            .with_entry(GroupWord::zero(), RepSet::evens())
            .unwrap();
        // the continuation of {2} is beyond the table and there is no rule
        assert!(matches!(
            in_laver_nbhd(&w(&[2, 4]), &u),
            Err(MathiasError::UndecidedAssignment { .. })
        ));
        // single letters are still decidable from A(∅) alone
        assert!(in_laver_nbhd(&w(&[2]), &u).unwrap());
        assert!(!in_laver_nbhd(&w(&[1]), &u).unwrap());
    }

    #[test]
    fn table_overrides_rule() {
        let u = LaverNbhd::from_rule(SetFamily::Constant { set: RepSet::evens() })
            .with_entry(w(&[2]), RepSet::odds().intersection(&RepSet::above(2)).unwrap())
            .unwrap();
        assert!(in_laver_nbhd(&w(&[2, 5]), &u).unwrap());
        assert!(!in_laver_nbhd(&w(&[2, 4]), &u).unwrap());
        assert!(in_laver_nbhd(&w(&[4, 6]), &u).unwrap());
    }

    #[test]
    fn tree_check_examples() {
        let filter = RepFilter::from_generators(vec![RepSet::evens()]).unwrap();
        // single branch ∅ → {2} with evens successors everywhere post-stem
        let mut nodes = BTreeSet::new();
        nodes.insert(GroupWord::zero());
        nodes.insert(w(&[2]));
        let mut succ = BTreeMap::new();
        succ.insert(GroupWord::zero(), RepSet::evens());
        succ.insert(w(&[2]), evens_above(2));
        let tree = LaverTreeApprox { nodes: nodes.clone(), stem: GroupWord::zero(), succ };
        assert!(laver_tree_check(&tree, &filter, 2).is_ok());

        // missing prefix
        let mut holey = BTreeSet::new();
        holey.insert(GroupWord::zero());
        holey.insert(w(&[2, 4]));
        let tree = LaverTreeApprox {
            nodes: holey,
            stem: GroupWord::zero(),
            succ: BTreeMap::new(),
        };
        assert!(matches!(
            laver_tree_check(&tree, &filter, 2),
            Err(MathiasError::Tree(TreeViolation::MissingPrefix { .. }))
        ));

        // successor set not in the filter
        let mut succ = BTreeMap::new();
        succ.insert(GroupWord::zero(), RepSet::evens());
        succ.insert(w(&[2]), RepSet::from_finite(&[4, 6]).unwrap());
        let tree = LaverTreeApprox { nodes, stem: GroupWord::zero(), succ };
        assert!(matches!(
            laver_tree_check(&tree, &filter, 2),
            Err(MathiasError::Tree(TreeViolation::SuccessorNotInFilter { .. }))
        ));
    }

    #[test]
    fn stem_comparability_enforced() {
        let filter = RepFilter::frechet();
        let mut nodes = BTreeSet::new();
        nodes.insert(GroupWord::zero());
        nodes.insert(w(&[1]));
        nodes.insert(w(&[2]));
        let tree = LaverTreeApprox {
            nodes,
            stem: w(&[1]),
            succ: BTreeMap::new(),
        };
        assert!(matches!(
            laver_tree_check(&tree, &filter, 2),
            Err(MathiasError::Tree(TreeViolation::StemIncomparable { .. }))
        ));
    }

    // Mathias basic zero-neighborhoods are Laver-open: [∅, A] rewritten as
    // the rule A(u) = A ∖ [0, max u] classifies words identically.
    #[test]
    fn mathias_zero_neighborhoods_are_laver_open() {
        let sides = [
            RepSet::evens(),
            RepSet::multiples_of(3).unwrap(),
            RepSet::above(4),
            RepSet::evens().union(&RepSet::from_finite(&[7, 11]).unwrap()).unwrap(),
        ];
        for side in &sides {
            let u = LaverNbhd::from_rule(SetFamily::Constant { set: side.clone() });
            let mut words = vec![GroupWord::zero()];
            let mut frontier = vec![GroupWord::zero()];
            for _ in 0..5 {
                let mut next = Vec::new();
                for word in &frontier {
                    let start = word.max_atom().map_or(0, |m| m + 1);
                    for n in start..=24 {
                        next.push(word.extended(n));
                    }
                }
                words.extend(next.iter().cloned());
                frontier = next;
            }
            for t in &words {
                let mathias = in_basic_open(t, &GroupWord::zero(), side);
                let laver = in_laver_nbhd(t, &u).unwrap();
                assert_eq!(mathias, laver, "disagree on {t} for side {side}");
            }
        }
    }
}
