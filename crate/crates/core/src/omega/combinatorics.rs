//! Selectivity combinatorics: diagonal intersections, selectors,
//! transversals, greedy functions, and pseudointersections.
//!
//! Positive answers come with checkable witnesses. Negative answers are
//! bounded-search reports unless a monotone certificate applies; the two
//! refutation paths that are sound for all depths (finitely generated
//! filters, and the self-similar power schema) are the only ones that
//! return a definite refutation.

use super::{FilterVerdict, OmegaError, RepFilter, RepSet, SetFamily};
use serde::{Deserialize, Serialize};

/// Greedy diagonal intersection of a family: d_0 is the least admissible
/// start and each d_{k+1} is the least j > d_k lying in every A_{d_i} chosen
/// so far. The output satisfies j ∈ A_i for all emitted i < j by
/// construction.
pub fn diagonal_intersection(
    family: &SetFamily,
    count: usize,
    search_bound: u64,
) -> Result<Vec<u64>, OmegaError> {
    diagonal_intersection_within(family, None, count, search_bound)
}

/// Diagonal intersection with every element additionally constrained to lie
/// in `within` (used when the construction requires D ⊆ A_0).
pub fn diagonal_intersection_within(
    family: &SetFamily,
    within: Option<&RepSet>,
    count: usize,
    search_bound: u64,
) -> Result<Vec<u64>, OmegaError> {
    diagonal_intersection_fn(|n| family.at(n), within, count, search_bound)
}

/// The greedy diagonal over an arbitrary set source, for callers whose
/// families are not expressible as a fixed rule.
pub fn diagonal_intersection_fn(
    family: impl Fn(u64) -> Result<RepSet, OmegaError>,
    within: Option<&RepSet>,
    count: usize,
    search_bound: u64,
) -> Result<Vec<u64>, OmegaError> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut chosen_sets: Vec<RepSet> = Vec::new();
    let mut next_candidate = match within {
        None => 0,
        Some(w) => w
            .min_element()
            .ok_or_else(|| OmegaError::SearchExhausted {
                bound: search_bound,
                context: "constraint set is empty".into(),
            })?,
    };
    while out.len() < count {
        let mut j = next_candidate;
        let found = loop {
            if j > search_bound {
                return Err(OmegaError::SearchExhausted {
                    bound: search_bound,
                    context: format!("no admissible element after {:?}", out),
                });
            }
            let ok = within.is_none_or(|w| w.contains(j))
                && chosen_sets.iter().all(|a| a.contains(j));
            if ok {
                break j;
            }
            j += 1;
        };
        chosen_sets.push(family(found)?);
        out.push(found);
        next_candidate = found + 1;
    }
    Ok(out)
}

/// The greedy increasing function f(0)=0, f(n+1) = min{ j > f(n) : j ∈ A_{f(n)} }.
///
/// Returns the first `length` values; the range doubles as a finite set for
/// filter certification.
pub fn greedy_function(
    family: &SetFamily,
    length: usize,
    search_bound: u64,
) -> Result<Vec<u64>, OmegaError> {
    let mut out = Vec::with_capacity(length);
    if length == 0 {
        return Ok(out);
    }
    out.push(0);
    while out.len() < length {
        let prev = *out.last().unwrap();
        let a_prev = family.at(prev)?;
        let next = a_prev
            .min_above(prev)
            .filter(|j| *j <= search_bound)
            .ok_or_else(|| OmegaError::SearchExhausted {
                bound: search_bound,
                context: format!("no continuation above f = {prev}"),
            })?;
        out.push(next);
    }
    Ok(out)
}

/// Fits an increasing sequence to an eventually-arithmetic set: a finite
/// head followed by a progression with constant difference confirmed on the
/// tail. Returns the exact eventually-periodic set or `None` if no constant
/// tail difference emerges.
pub fn fit_arithmetic_tail(values: &[u64]) -> Option<RepSet> {
    if values.is_empty() {
        return Some(RepSet::empty());
    }
    if values.len() == 1 {
        return RepSet::from_finite(values).ok();
    }
    let diffs: Vec<u64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let step = *diffs.last().unwrap();
    if step == 0 {
        return None;
    }
    // longest constant tail; require at least two confirming gaps unless the
    // whole sequence is one progression
    let mut split = diffs.len();
    while split > 0 && diffs[split - 1] == step {
        split -= 1;
    }
    let confirmations = diffs.len() - split;
    if split > 0 && confirmations < 2 {
        return None;
    }
    let head = &values[..split];
    let tail_start = values[split];
    let mut set = RepSet::arithmetic(tail_start, step).ok()?;
    if !head.is_empty() {
        set = set.union(&RepSet::from_finite(head).ok()?).ok()?;
    }
    Some(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorMode {
    /// Family is a partition; look for a set meeting every cell exactly once.
    Selector,
    /// Family lies in the filter; look for an increasing transversal.
    Transversal,
}

/// Result of a bounded selector/transversal search. `NotFound` reports the
/// exhausted bound; non-existence is not certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SelectiveOutcome {
    Selector {
        set: RepSet,
        /// Cells on which the exactly-one property was checked. When the
        /// cells are width blocks the check window covers a full period of
        /// the candidate against the blocks, so the property holds for all
        /// cells.
        cells_checked: u64,
        exact_for_all_cells: bool,
        membership: FilterVerdict,
    },
    Transversal {
        values: Vec<u64>,
        fitted: RepSet,
        membership: FilterVerdict,
    },
    NotFound {
        searched_bound: u64,
    },
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    num::integer::lcm(a, b)
}

/// Window of cell indices sufficient to decide `|A ∩ C_n| = 1` for *all* n
/// when cells are width blocks: past the candidate's prefix the counts
/// repeat with period lcm(period, width)/width.
fn selector_window(candidate: &RepSet, width: u64, requested: u64) -> (u64, bool) {
    let period = candidate.period_bits().len() as u64;
    let prefix = candidate.prefix_bits().len() as u64;
    let stable = prefix.div_ceil(width) + lcm_u64(period, width) / width + 1;
    (stable.max(requested), true)
}

fn cell_hits(candidate: &RepSet, cell: &RepSet) -> Result<u64, OmegaError> {
    // cells are finite; count members of the intersection
    let hit = candidate.intersection(cell)?;
    if hit.is_finite() {
        Ok(hit.members().count() as u64)
    } else {
        Ok(u64::MAX)
    }
}

/// Searches for the witnesses of the selectivity conditions.
///
/// Selector mode scans the filter's canonical chain (and each explicit
/// generator) for a set meeting every partition cell exactly once.
/// Transversal mode runs the greedy enumeration a_n = min{ j > a_{n−1} :
/// j ∈ A_n }, fits it to an eventually-arithmetic set, re-verifies the fit
/// against the family, and certifies membership in the filter.
pub fn selective_witness(
    filter: &RepFilter,
    family: &SetFamily,
    mode: SelectorMode,
    bound: u64,
) -> Result<SelectiveOutcome, OmegaError> {
    match mode {
        SelectorMode::Selector => {
            // partition sanity on an initial window
            let window = 32.min(bound.max(4));
            verify_partition_window(family, window)?;

            let mut candidates: Vec<RepSet> = Vec::new();
            for k in 0..=bound.min(8) {
                if let Ok(c) = filter.canonical(k) {
                    candidates.push(c);
                }
            }
            candidates.extend(filter.generators().iter().cloned());
            candidates.dedup();

            for cand in candidates {
                let (cells, exact_all) = match family {
                    SetFamily::WidthBlocks { width } => selector_window(&cand, *width, bound),
                    _ => (bound, false),
                };
                let mut ok = true;
                for n in 0..cells {
                    if cell_hits(&cand, &family.at(n)?)? != 1 {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    let membership = filter.contains(&cand, bound)?;
                    if membership.is_yes() {
                        return Ok(SelectiveOutcome::Selector {
                            set: cand,
                            cells_checked: cells,
                            exact_for_all_cells: exact_all,
                            membership,
                        });
                    }
                }
            }
            Ok(SelectiveOutcome::NotFound { searched_bound: bound })
        }
        SelectorMode::Transversal => {
            let steps = bound.clamp(4, 64) as usize;
            let mut values: Vec<u64> = Vec::with_capacity(steps);
            let mut prev: Option<u64> = None;
            for n in 0..steps as u64 {
                let a_n = family.at(n)?;
                let next = match prev {
                    None => a_n.min_element(),
                    Some(p) => a_n.min_above(p),
                };
                match next.filter(|j| *j <= bound.saturating_mul(4).max(1024)) {
                    Some(j) => {
                        values.push(j);
                        prev = Some(j);
                    }
                    None => return Ok(SelectiveOutcome::NotFound { searched_bound: bound }),
                }
            }
            let fitted = match fit_arithmetic_tail(&values) {
                Some(f) => f,
                None => return Ok(SelectiveOutcome::NotFound { searched_bound: bound }),
            };
            // the fitted continuation must keep satisfying a_n ∈ A_n
            let continuation: Vec<u64> = fitted.members().take(2 * steps).collect();
            if continuation.len() < values.len() || continuation[..values.len()] != values[..] {
                return Ok(SelectiveOutcome::NotFound { searched_bound: bound });
            }
            for (n, a) in continuation.iter().enumerate() {
                if !family.at(n as u64)?.contains(*a) {
                    return Ok(SelectiveOutcome::NotFound { searched_bound: bound });
                }
            }
            let membership = filter.contains(&fitted, bound)?;
            if membership.is_yes() {
                Ok(SelectiveOutcome::Transversal { values, fitted, membership })
            } else {
                Ok(SelectiveOutcome::NotFound { searched_bound: bound })
            }
        }
    }
}

fn verify_partition_window(family: &SetFamily, window: u64) -> Result<(), OmegaError> {
    for n in 0..window {
        let mut hits = 0u32;
        for i in 0..window {
            if family.at(i)?.contains(n) {
                hits += 1;
            }
        }
        // a point in two cells refutes disjointness outright; a point in no
        // examined cell may belong to a later one, except for width blocks,
        // where cells only move right
        if hits > 1 {
            return Err(OmegaError::NotAPartition {
                witness: n,
                reason: format!("covered by {hits} cells"),
            });
        }
        if hits == 0 && matches!(family, SetFamily::WidthBlocks { .. }) {
            return Err(OmegaError::NotAPartition {
                witness: n,
                reason: "not covered by any cell".into(),
            });
        }
    }
    Ok(())
}

/// Per-candidate failure witness in a pseudointersection refutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoFailure {
    pub candidate_depth: u64,
    pub family_index: u64,
    /// The infinite difference C_k ∖ A_n.
    pub infinite_difference: RepSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PseudoOutcome {
    /// A canonical chain set almost contained in every family member.
    Found {
        witness: RepSet,
        depth: u64,
        /// Family indices against which the finite-residue condition was
        /// verified literally; `sound_for_all` records why the condition
        /// extends to every index.
        checked_upto: u64,
        sound_for_all: bool,
    },
    /// Every canonical candidate fails; carries one witness per examined
    /// depth. Emitted only on the monotone paths (no schema, or the
    /// self-similar power schema tested against itself).
    Refuted { certificate: Vec<PseudoFailure> },
    Unknown { examined_depth: u64 },
}

/// Decides, at bounded depth, whether the filter holds a pseudointersection
/// of the (decreasing) family.
///
/// A superset witness exists iff some canonical chain set works, so only
/// the C_k are searched. The family is made decreasing by intersecting
/// prefixes before any test.
pub fn pseudointersection_check(
    filter: &RepFilter,
    family: &SetFamily,
    depth: u64,
) -> Result<PseudoOutcome, OmegaError> {
    // decreasing envelope Ā_n = A_0 ∩ … ∩ A_n
    let envelope = |n: u64| -> Result<RepSet, OmegaError> {
        let mut acc = family.at(0)?;
        for i in 1..=n {
            acc = acc.intersection(&family.at(i)?)?;
        }
        Ok(acc)
    };

    // constant families short-circuit: the set itself is the witness
    if let SetFamily::Constant { set } = family {
        let membership = filter.contains(set, depth)?;
        if membership.is_yes() {
            return Ok(PseudoOutcome::Found {
                witness: set.clone(),
                depth: 0,
                checked_upto: 0,
                sound_for_all: true,
            });
        }
    }

    // soundness of a literal check for every index: either every family set
    // is cofinite (residues are finite a priori) or the family is constant
    let all_cofinite = matches!(family, SetFamily::TailAffine { .. })
        || matches!(family, SetFamily::Above { set } if set.is_cofinite())
        || matches!(family, SetFamily::Constant { set } if set.is_cofinite());

    let check_upto = depth.max(4);
    let mut failures: Vec<PseudoFailure> = Vec::new();
    let mut all_candidates_failed = true;
    for k in 0..=depth {
        let candidate = filter.canonical(k)?;
        let mut failure: Option<PseudoFailure> = None;
        for n in 0..=check_upto {
            let diff = candidate.difference(&envelope(n)?)?;
            if diff.is_infinite() {
                failure = Some(PseudoFailure {
                    candidate_depth: k,
                    family_index: n,
                    infinite_difference: diff,
                });
                break;
            }
        }
        match failure {
            Some(f) => failures.push(f),
            None => {
                all_candidates_failed = false;
                if all_cofinite {
                    return Ok(PseudoOutcome::Found {
                        witness: candidate,
                        depth: k,
                        checked_upto: check_upto,
                        sound_for_all: true,
                    });
                }
            }
        }
    }

    if all_candidates_failed {
        // monotone refutation paths
        let finitely_generated = !filter.has_schema();
        let self_similar = matches!(
            (filter.schema(), family),
            (
                Some(SetFamily::MultiplesOfPow { base: b1 }),
                SetFamily::MultiplesOfPow { base: b2 },
            ) if b1 == b2
        );
        if finitely_generated || self_similar {
            return Ok(PseudoOutcome::Refuted { certificate: failures });
        }
    }
    Ok(PseudoOutcome::Unknown { examined_depth: depth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_doubling_family() {
        let family = SetFamily::TailAffine { mul: 2, add: 0 };
        let d = diagonal_intersection(&family, 6, 1 << 20).unwrap();
        assert_eq!(d, vec![0, 1, 3, 7, 15, 31]);
        // defining pairwise property
        for (a, &i) in d.iter().enumerate() {
            for &j in &d[a + 1..] {
                assert!(family.at(i).unwrap().contains(j), "{j} ∉ A_{i}");
            }
        }
    }

    #[test]
    fn diagonal_unconstrained_family() {
        let family = SetFamily::Constant { set: RepSet::omega() };
        let d = diagonal_intersection(&family, 6, 100).unwrap();
        assert_eq!(d, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn diagonal_exhaustion_reports_bound() {
        let family = SetFamily::Constant { set: RepSet::from_finite(&[0, 1]).unwrap() };
        assert!(matches!(
            diagonal_intersection(&family, 5, 50),
            Err(OmegaError::SearchExhausted { bound: 50, .. })
        ));
    }

    #[test]
    fn greedy_function_examples() {
        let doubling = SetFamily::TailAffine { mul: 2, add: 0 };
        assert_eq!(
            greedy_function(&doubling, 6, 1 << 20).unwrap(),
            vec![0, 1, 3, 7, 15, 31]
        );
        let full = SetFamily::Constant { set: RepSet::omega() };
        assert_eq!(greedy_function(&full, 5, 100).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn greedy_steps_satisfy_family() {
        let family = SetFamily::TailAffine { mul: 3, add: 2 };
        let f = greedy_function(&family, 8, 1 << 30).unwrap();
        for w in f.windows(2) {
            assert!(w[1] > w[0]);
            assert!(family.at(w[0]).unwrap().contains(w[1]));
        }
    }

    #[test]
    fn greedy_range_not_cofinite() {
        // over-approximate the doubling range by a periodic set and let the
        // Fréchet filter refute it: supersets of members are members, so a
        // non-member superset refutes the range
        let f = greedy_function(&SetFamily::TailAffine { mul: 2, add: 0 }, 7, 1 << 20).unwrap();
        let over = RepSet::from_finite(&[0, 1])
            .unwrap()
            .union(&RepSet::arithmetic(3, 4).unwrap())
            .unwrap();
        for v in &f {
            assert!(over.contains(*v), "over-approximation misses {v}");
        }
        assert!(RepFilter::frechet().contains(&over, 4).unwrap().is_no());
    }

    #[test]
    fn selector_for_evens_width_two() {
        let filter = RepFilter::from_generators(vec![RepSet::evens()]).unwrap();
        let cells = SetFamily::WidthBlocks { width: 2 };
        match selective_witness(&filter, &cells, SelectorMode::Selector, 16).unwrap() {
            SelectiveOutcome::Selector { set, exact_for_all_cells, membership, .. } => {
                assert_eq!(set, RepSet::evens());
                assert!(exact_for_all_cells);
                assert!(membership.is_yes());
            }
            other => panic!("expected selector, got {other:?}"),
        }
    }

    #[test]
    fn transversal_found_and_not_found() {
        let frechet = RepFilter::frechet();
        let full = SetFamily::Constant { set: RepSet::omega() };
        match selective_witness(&frechet, &full, SelectorMode::Transversal, 16).unwrap() {
            SelectiveOutcome::Transversal { values, fitted, .. } => {
                assert_eq!(&values[..4], &[0, 1, 2, 3]);
                assert_eq!(fitted, RepSet::omega());
            }
            other => panic!("expected transversal, got {other:?}"),
        }
        // any transversal of {j > 2n} has a_n > 2n, so its fit is the odds,
        // which the Fréchet filter rejects
        let doubling = SetFamily::TailAffine { mul: 2, add: 0 };
        assert_eq!(
            selective_witness(&frechet, &doubling, SelectorMode::Transversal, 16).unwrap(),
            SelectiveOutcome::NotFound { searched_bound: 16 }
        );
    }

    #[test]
    fn partition_violation_detected() {
        let overlapping = SetFamily::Constant { set: RepSet::evens() };
        assert!(matches!(
            selective_witness(
                &RepFilter::frechet(),
                &overlapping,
                SelectorMode::Selector,
                8
            ),
            Err(OmegaError::NotAPartition { .. })
        ));
    }

    #[test]
    fn pseudointersection_frechet_tails() {
        let out = pseudointersection_check(
            &RepFilter::frechet(),
            &SetFamily::TailAffine { mul: 1, add: 0 },
            4,
        )
        .unwrap();
        match out {
            PseudoOutcome::Found { witness, sound_for_all, .. } => {
                assert_eq!(witness, RepSet::omega());
                assert!(sound_for_all);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn pseudointersection_power_schema_refuted() {
        let schema = SetFamily::MultiplesOfPow { base: 2 };
        let filter = RepFilter::frechet().with_schema(schema.clone());
        match pseudointersection_check(&filter, &schema, 4).unwrap() {
            PseudoOutcome::Refuted { certificate } => {
                assert_eq!(certificate.len(), 5);
                for f in &certificate {
                    // each witness is an infinite part of the candidate that
                    // misses the named family set entirely
                    assert!(f.infinite_difference.is_infinite());
                    let candidate = filter.canonical(f.candidate_depth).unwrap();
                    assert!(f.infinite_difference.is_subset_of(&candidate).unwrap());
                    let mut envelope = schema.at(0).unwrap();
                    for i in 1..=f.family_index {
                        envelope = envelope.intersection(&schema.at(i).unwrap()).unwrap();
                    }
                    assert!(f
                        .infinite_difference
                        .intersection(&envelope)
                        .unwrap()
                        .is_empty());
                }
            }
            other => panic!("expected Refuted, got {other:?}"),
        }
    }

    #[test]
    fn pseudointersection_constant_family() {
        let filter = RepFilter::from_generators(vec![RepSet::evens()]).unwrap();
        let fam = SetFamily::Constant { set: RepSet::evens() };
        match pseudointersection_check(&filter, &fam, 3).unwrap() {
            PseudoOutcome::Found { witness, .. } => assert_eq!(witness, RepSet::evens()),
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn fit_detects_arithmetic_tails() {
        assert_eq!(fit_arithmetic_tail(&[1, 3, 5, 7]).unwrap(), RepSet::odds());
        let with_head = fit_arithmetic_tail(&[0, 5, 9, 13, 17]).unwrap();
        assert!(with_head.contains(0) && with_head.contains(5) && with_head.contains(21));
        assert!(!with_head.contains(1) && !with_head.contains(8));
        assert!(fit_arithmetic_tail(&[0, 1, 3, 7, 15]).is_none());
    }
}
