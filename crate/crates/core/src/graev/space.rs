//! Finite pseudometric spaces with exact rational distance tables.

use super::GraevError;
use crate::gf2::{AtomId, GroupWord};
use crate::rational::{parse_frac, to_frac_string, Rat};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Which group the seminorm lives on.
///
/// In the basepoint flavor the distinguished point is identified with the
/// zero element and odd words pad with it. In the Markov flavor the zero is
/// an implicit isolated point at distance 1 from everything, so the entire
/// odd part sits at norm exactly 1; to keep the triangle inequality across
/// the adjunction, explicit distances are capped at 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    GraevBasepoint,
    Markov,
}

/// First invariant violation found in a distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    Negative { x: String, y: String, value: String },
    Triangle { x: String, y: String, z: String, direct: String, via: String },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::Negative { x, y, value } => {
                write!(f, "d({x}, {y}) = {value} is negative")
            }
            MetricViolation::Triangle { x, y, z, direct, via } => {
                write!(f, "triangle fails on ({x}, {y}, {z}): {direct} > {via}")
            }
        }
    }
}

/// A finite point set with an exact symmetric distance table and an
/// optional distinguished basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudometricSpace {
    ids: Vec<AtomId>,
    index: BTreeMap<AtomId, usize>,
    names: BTreeMap<AtomId, String>,
    dist: Vec<Vec<Rat>>,
    basepoint: Option<AtomId>,
    flavor: Flavor,
}

impl PseudometricSpace {
    /// Builds a space over explicit atom ids. `entries` must cover every
    /// unordered pair of distinct points exactly once (missing pairs are
    /// collected into the error). In the Markov flavor there is no
    /// basepoint and distances are capped at 2.
    pub fn new(
        flavor: Flavor,
        atoms: Vec<AtomId>,
        basepoint: Option<AtomId>,
        entries: &[(AtomId, AtomId, Rat)],
    ) -> Result<Self, GraevError> {
        debug_assert!(matches!(
            (flavor, basepoint),
            (Flavor::GraevBasepoint, Some(_)) | (Flavor::Markov, None)
        ));
        let mut ids = atoms;
        if let Some(b) = basepoint {
            ids.push(b);
        }
        let index: BTreeMap<AtomId, usize> =
            ids.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        assert_eq!(index.len(), ids.len(), "duplicate point ids");
        let n = ids.len();
        let mut dist = vec![vec![Rat::zero(); n]; n];
        let mut seen = vec![vec![false; n]; n];
        for (a, b, value) in entries {
            let (i, j) = match (index.get(a), index.get(b)) {
                (Some(i), Some(j)) => (*i, *j),
                (None, _) => return Err(GraevError::AtomOutsideSpace(*a)),
                (_, None) => return Err(GraevError::AtomOutsideSpace(*b)),
            };
            let value = match flavor {
                Flavor::Markov => value.clone().min(Rat::from_integer(2.into())),
                Flavor::GraevBasepoint => value.clone(),
            };
            if seen[i][j] && dist[i][j] != value {
                return Err(GraevError::ConflictingEntry(
                    a.to_string(),
                    b.to_string(),
                ));
            }
            seen[i][j] = true;
            seen[j][i] = true;
            dist[i][j] = value.clone();
            dist[j][i] = value;
        }
        let mut missing = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !seen[i][j] {
                    missing.push((ids[i].to_string(), ids[j].to_string()));
                }
            }
        }
        if !missing.is_empty() {
            return Err(GraevError::MissingEntries(missing));
        }
        Ok(Self {
            ids,
            index,
            names: BTreeMap::new(),
            dist,
            basepoint,
            flavor,
        })
    }

    pub fn with_names(mut self, names: BTreeMap<AtomId, String>) -> Self {
        self.names = names;
        self
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn basepoint(&self) -> Option<AtomId> {
        self.basepoint
    }

    /// All table points, basepoint included.
    pub fn point_ids(&self) -> &[AtomId] {
        &self.ids
    }

    /// The atoms usable as word letters (basepoint excluded).
    pub fn atom_ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        let bp = self.basepoint;
        self.ids.iter().copied().filter(move |a| Some(*a) != bp)
    }

    pub fn point_count(&self) -> usize {
        self.ids.len()
    }

    pub fn name_of(&self, atom: AtomId) -> String {
        self.names
            .get(&atom)
            .cloned()
            .unwrap_or_else(|| atom.to_string())
    }

    pub(super) fn index_of(&self, atom: AtomId) -> Result<usize, GraevError> {
        self.index
            .get(&atom)
            .copied()
            .ok_or(GraevError::AtomOutsideSpace(atom))
    }

    pub fn distance(&self, a: AtomId, b: AtomId) -> Result<&Rat, GraevError> {
        Ok(&self.dist[self.index_of(a)?][self.index_of(b)?])
    }

    pub(super) fn dist_by_index(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    /// Checks the value invariants: distances nonnegative and the triangle
    /// inequality on all (ordered) triples. Returns the first violation in
    /// point order.
    pub fn validate(&self) -> Result<(), GraevError> {
        let n = self.ids.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.dist[i][j].is_negative() {
                    return Err(GraevError::Metric(MetricViolation::Negative {
                        x: self.name_of(self.ids[i]),
                        y: self.name_of(self.ids[j]),
                        value: to_frac_string(&self.dist[i][j]),
                    }));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let via = &self.dist[i][j] + &self.dist[j][k];
                    if self.dist[i][k] > via {
                        return Err(GraevError::Metric(MetricViolation::Triangle {
                            x: self.name_of(self.ids[i]),
                            y: self.name_of(self.ids[j]),
                            z: self.name_of(self.ids[k]),
                            direct: to_frac_string(&self.dist[i][k]),
                            via: to_frac_string(&via),
                        }));
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolves a word's letters to table indices, rejecting the basepoint
    /// and unknown atoms.
    pub(super) fn word_indices(&self, g: &GroupWord) -> Result<Vec<usize>, GraevError> {
        let mut out = Vec::with_capacity(g.len());
        for atom in g.iter() {
            if Some(atom) == self.basepoint {
                return Err(GraevError::BasepointInWord);
            }
            out.push(self.index_of(atom)?);
        }
        Ok(out)
    }

    /// Rebuilds the distance entry list (canonical order), e.g. for
    /// serializing derived tables.
    pub fn entries(&self) -> Vec<(AtomId, AtomId, Rat)> {
        let n = self.ids.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push((self.ids[i], self.ids[j], self.dist[i][j].clone()));
            }
        }
        out
    }

    pub fn to_spec(&self) -> SpaceSpec {
        SpaceSpec {
            flavor: self.flavor,
            points: self
                .atom_ids()
                .map(|a| self.name_of(a))
                .collect(),
            basepoint: self.basepoint.map(|b| self.name_of(b)),
            dist: self
                .entries()
                .into_iter()
                .map(|(a, b, d)| (self.name_of(a), self.name_of(b), to_frac_string(&d)))
                .collect(),
        }
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Self, GraevError> {
        spec.build()
    }

    /// Translates point names to atoms for word input.
    pub fn word_from_names(&self, names: &[&str]) -> Result<GroupWord, GraevError> {
        let reverse: BTreeMap<&str, AtomId> = self
            .ids
            .iter()
            .map(|a| (self.names.get(a).map(|s| s.as_str()).unwrap_or(""), *a))
            .filter(|(s, _)| !s.is_empty())
            .collect();
        let mut atoms = Vec::new();
        for name in names {
            match reverse.get(name) {
                Some(a) => atoms.push(*a),
                None => match name.parse::<AtomId>() {
                    Ok(a) if self.index.contains_key(&a) => atoms.push(a),
                    _ => return Err(GraevError::UnknownPoint((*name).to_string())),
                },
            }
        }
        Ok(GroupWord::from_atoms(atoms))
    }
}

/// JSON document form of a space: named points, optional basepoint, and
/// distance entries as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub flavor: Flavor,
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
    pub dist: Vec<(String, String, String)>,
}

impl SpaceSpec {
    pub fn from_json_str(s: &str) -> Result<Self, GraevError> {
        serde_json::from_str(s).map_err(|e| GraevError::Document(e.to_string()))
    }

    /// Assigns ids in listing order (the basepoint comes last) and builds
    /// the table.
    pub fn build(&self) -> Result<PseudometricSpace, GraevError> {
        let mut names: BTreeMap<AtomId, String> = BTreeMap::new();
        let mut by_name: BTreeMap<&str, AtomId> = BTreeMap::new();
        for (i, p) in self.points.iter().enumerate() {
            let id = i as AtomId;
            if by_name.insert(p.as_str(), id).is_some() {
                return Err(GraevError::Document(format!("duplicate point {p:?}")));
            }
            names.insert(id, p.clone());
        }
        let basepoint = match (&self.basepoint, self.flavor) {
            (Some(b), Flavor::GraevBasepoint) => {
                let id = self.points.len() as AtomId;
                if by_name.insert(b.as_str(), id).is_some() {
                    return Err(GraevError::Document(format!(
                        "basepoint {b:?} duplicates a point"
                    )));
                }
                names.insert(id, b.clone());
                Some(id)
            }
            (None, Flavor::GraevBasepoint) => {
                return Err(GraevError::Document(
                    "graev-basepoint flavor requires a basepoint".into(),
                ))
            }
            (Some(_), Flavor::Markov) => {
                return Err(GraevError::Document(
                    "markov flavor has an implicit zero; no basepoint allowed".into(),
                ))
            }
            (None, Flavor::Markov) => None,
        };
        let mut entries = Vec::with_capacity(self.dist.len());
        for (a, b, q) in &self.dist {
            let ia = *by_name
                .get(a.as_str())
                .ok_or_else(|| GraevError::UnknownPoint(a.clone()))?;
            let ib = *by_name
                .get(b.as_str())
                .ok_or_else(|| GraevError::UnknownPoint(b.clone()))?;
            let value = parse_frac(q).map_err(GraevError::Document)?;
            entries.push((ia, ib, value));
        }
        let atoms: Vec<AtomId> = (0..self.points.len() as AtomId).collect();
        Ok(PseudometricSpace::new(self.flavor, atoms, basepoint, &entries)?.with_names(names))
    }
}

/// Letter norms on a filter space: r assigns a positive rational to each
/// atom and induces d(x, y) = r(x) + r(y) for distinct letters and
/// d(*, x) = r(x). The triangle inequality holds by construction, and every
/// pairing of a word's letters has the same total, so the seminorm of a
/// word is just the sum of its letter norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterNorm {
    values: BTreeMap<AtomId, Rat>,
}

impl LetterNorm {
    pub fn new(values: BTreeMap<AtomId, Rat>) -> Result<Self, GraevError> {
        for (atom, r) in &values {
            if !r.is_positive() {
                return Err(GraevError::NonPositiveLetterNorm(*atom));
            }
        }
        Ok(Self { values })
    }

    pub fn value(&self, atom: AtomId) -> Result<&Rat, GraevError> {
        self.values.get(&atom).ok_or(GraevError::AtomOutsideSpace(atom))
    }

    pub fn sum_over(&self, g: &GroupWord) -> Result<Rat, GraevError> {
        let mut total = Rat::zero();
        for atom in g.iter() {
            total += self.value(atom)?;
        }
        Ok(total)
    }

    /// Membership in the unit seminorm ball: Σ r over the support < 1.
    pub fn in_u_d(&self, g: &GroupWord) -> Result<bool, GraevError> {
        Ok(self.sum_over(g)? < Rat::one())
    }

    /// The induced basepoint-flavor space over the assigned atoms.
    pub fn to_space(&self, basepoint: AtomId) -> Result<PseudometricSpace, GraevError> {
        let atoms: Vec<AtomId> = self.values.keys().copied().collect();
        assert!(
            !self.values.contains_key(&basepoint),
            "basepoint id must be fresh"
        );
        let mut entries = Vec::new();
        for (i, a) in atoms.iter().enumerate() {
            entries.push((*a, basepoint, self.values[a].clone()));
            for b in atoms.iter().skip(i + 1) {
                entries.push((*a, *b, &self.values[a] + &self.values[b]));
            }
        }
        PseudometricSpace::new(Flavor::GraevBasepoint, atoms, Some(basepoint), &entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    pub(crate) fn triple_space() -> PseudometricSpace {
        // d(*,a)=d(*,b)=d(*,c)=1, d(a,b)=1/4, d(a,c)=d(b,c)=1/2 with ids a=0, b=1, c=2, *=3
        PseudometricSpace::new(
            Flavor::GraevBasepoint,
            vec![0, 1, 2],
            Some(3),
            &[
                (0, 1, rat(1, 4)),
                (0, 2, rat(1, 2)),
                (1, 2, rat(1, 2)),
                (0, 3, rat(1, 1)),
                (1, 3, rat(1, 1)),
                (2, 3, rat(1, 1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        // d(a,b)=1, d(b,c)=1, d(a,c)=3 violates the triangle on (a,b,c);
        // basepoint flavor so no cap interferes
        let bad = PseudometricSpace::new(
            Flavor::GraevBasepoint,
            vec![0, 1],
            Some(2),
            &[(0, 1, rat(1, 1)), (1, 2, rat(1, 1)), (0, 2, rat(3, 1))],
        )
        .unwrap();
        match bad.validate() {
            Err(GraevError::Metric(MetricViolation::Triangle { .. })) => {}
            other => panic!("expected triangle violation, got {other:?}"),
        }

        // all-zeros table is a pseudometric
        let zeros = PseudometricSpace::new(
            Flavor::Markov,
            vec![0, 1, 2],
            None,
            &[(0, 1, rat(0, 1)), (1, 2, rat(0, 1)), (0, 2, rat(0, 1))],
        )
        .unwrap();
        assert!(zeros.validate().is_ok());

        // the worked example validates (all triples checked)
        assert!(triple_space().validate().is_ok());
    }

    #[test]
    fn missing_entries_are_listed() {
        let err = PseudometricSpace::new(
            Flavor::Markov,
            vec![0, 1, 2],
            None,
            &[(0, 1, rat(1, 1))],
        )
        .unwrap_err();
        match err {
            GraevError::MissingEntries(pairs) => assert_eq!(pairs.len(), 2),
            other => panic!("expected missing entries, got {other:?}"),
        }
    }

    #[test]
    fn markov_distances_capped_at_two() {
        let s = PseudometricSpace::new(
            Flavor::Markov,
            vec![0, 1],
            None,
            &[(0, 1, rat(7, 1))],
        )
        .unwrap();
        assert_eq!(s.distance(0, 1).unwrap(), &rat(2, 1));
        // the cap keeps the triangle inequality after the zero is adjoined
        assert!(s.validate().is_ok());
    }

    #[test]
    fn negative_distance_reported() {
        let s = PseudometricSpace::new(
            Flavor::Markov,
            vec![0, 1],
            None,
            &[(0, 1, rat(-1, 2))],
        )
        .unwrap();
        assert!(matches!(
            s.validate(),
            Err(GraevError::Metric(MetricViolation::Negative { .. }))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let doc = r#"{
            "flavor": "graev-basepoint",
            "points": ["a", "b", "c"],
            "basepoint": "*",
            "dist": [
                ["a", "b", "1/4"], ["a", "c", "1/2"], ["b", "c", "1/2"],
                ["*", "a", "1/1"], ["*", "b", "1/1"], ["*", "c", "1/1"]
            ]
        }"#;
        let space = SpaceSpec::from_json_str(doc).unwrap().build().unwrap();
        assert_eq!(space.point_count(), 4);
        assert_eq!(space.distance(0, 1).unwrap(), &rat(1, 4));
        assert_eq!(space.name_of(3), "*");
        let word = space.word_from_names(&["a", "b"]).unwrap();
        assert_eq!(word.len(), 2);
        assert!(space.word_from_names(&["zzz"]).is_err());
        // spec → space → spec is stable
        let spec2 = space.to_spec();
        let space2 = spec2.build().unwrap();
        assert_eq!(space, space2);
    }

    #[test]
    fn letter_norm_sums() {
        let mut values = BTreeMap::new();
        values.insert(18u64, rat(1, 18));
        values.insert(28u64, rat(1, 28));
        let r = LetterNorm::new(values).unwrap();
        let g = GroupWord::from_atoms([18, 28]);
        assert_eq!(r.sum_over(&g).unwrap(), rat(1, 18) + rat(1, 28));
        assert!(r.in_u_d(&g).unwrap());
        let mut bad = BTreeMap::new();
        bad.insert(1u64, rat(0, 1));
        assert!(matches!(
            LetterNorm::new(bad),
            Err(GraevError::NonPositiveLetterNorm(1))
        ));
    }
}
