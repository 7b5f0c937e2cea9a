//! Eventually-periodic subsets of ω in canonical form.

use super::OmegaError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Hard cap on aligned period lengths, so that long op chains fail loudly
/// instead of allocating unboundedly.
const MAX_PERIOD: usize = 1 << 20;

/// An eventually-periodic subset of ω: bit `n` is `prefix[n]` for
/// `n < prefix.len()` and `period[(n - prefix.len()) % period.len()]`
/// afterwards.
///
/// The stored form is canonical — the period is primitive (not a repetition
/// of a shorter block) and the prefix is shortest possible — so structural
/// equality coincides with set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl RepSet {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, OmegaError> {
        if period.is_empty() {
            return Err(OmegaError::EmptyPeriod);
        }
        let mut s = Self { prefix, period };
        s.canonicalize();
        Ok(s)
    }

    fn canonicalize(&mut self) {
        // shrink the period to its primitive root
        let p = self.period.len();
        for d in 1..=p {
            if !p.is_multiple_of(d) {
                continue;
            }
            if (d..p).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                break;
            }
        }
        // absorb the prefix tail into the period by right rotation: dropping
        // the last prefix bit is sound exactly when it equals the last period
        // bit, which becomes the new first period bit.
        while let (Some(&last), Some(&plast)) = (self.prefix.last(), self.period.last()) {
            if last == plast {
                self.prefix.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period_bits(&self) -> &[bool] {
        &self.period
    }

    pub fn contains(&self, n: u64) -> bool {
        let plen = self.prefix.len() as u64;
        if n < plen {
            self.prefix[n as usize]
        } else {
            let len = self.period.len() as u64;
            self.period[((n - plen) % len) as usize]
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self, OmegaError> {
        let plen = self.prefix.len().max(other.prefix.len());
        let period = num::integer::lcm(self.period.len(), other.period.len());
        if period > MAX_PERIOD {
            return Err(OmegaError::RepresentationTooLarge(format!(
                "aligned period {period} exceeds {MAX_PERIOD}"
            )));
        }
        let prefix = (0..plen as u64)
            .map(|n| f(self.contains(n), other.contains(n)))
            .collect();
        let period = (plen as u64..(plen + period) as u64)
            .map(|n| f(self.contains(n), other.contains(n)))
            .collect();
        Self::new(prefix, period)
    }

    pub fn union(&self, other: &Self) -> Result<Self, OmegaError> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, OmegaError> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, OmegaError> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            period: self.period.iter().map(|b| !b).collect(),
        }
        // complement of a canonical form is canonical
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool, OmegaError> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Finite sets have the all-zeros period in canonical form.
    pub fn is_finite(&self) -> bool {
        self.period == [false]
    }

    pub fn is_cofinite(&self) -> bool {
        self.period == [true]
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.prefix.iter().all(|b| !b)
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Ascending members. Infinite for infinite sets; callers bound it.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let stop = if self.is_finite() {
            self.prefix.len() as u64
        } else {
            u64::MAX
        };
        (0..stop).filter(|n| self.contains(*n))
    }

    /// The i-th member in ascending order (0-based).
    pub fn nth_member(&self, i: u64) -> Option<u64> {
        self.members().nth(i as usize)
    }

    pub fn min_element(&self) -> Option<u64> {
        self.members().next()
    }

    /// Least member strictly above `n`.
    pub fn min_above(&self, n: u64) -> Option<u64> {
        let horizon = self.prefix.len() as u64 + self.period.len() as u64;
        let stop = if self.is_finite() {
            self.prefix.len() as u64
        } else {
            n.saturating_add(horizon).saturating_add(1)
        };
        (n + 1..stop).find(|m| self.contains(*m))
    }

    /// Number of members in `[0, bound)`.
    pub fn count_below(&self, bound: u64) -> u64 {
        (0..bound).filter(|n| self.contains(*n)).count() as u64
    }

    // --- builders -----------------------------------------------------------

    pub fn omega() -> Self {
        Self { prefix: vec![], period: vec![true] }
    }

    pub fn empty() -> Self {
        Self { prefix: vec![], period: vec![false] }
    }

    pub fn evens() -> Self {
        Self { prefix: vec![], period: vec![true, false] }
    }

    pub fn odds() -> Self {
        Self { prefix: vec![], period: vec![false, true] }
    }

    /// Multiples of `m` (m ≥ 1).
    pub fn multiples_of(m: u64) -> Result<Self, OmegaError> {
        if m == 0 {
            return Err(OmegaError::BadLiteral(
                format!("mult:{m}"),
                "modulus must be positive".into(),
            ));
        }
        if m as usize > MAX_PERIOD {
            return Err(OmegaError::RepresentationTooLarge(format!(
                "modulus {m} exceeds {MAX_PERIOD}"
            )));
        }
        let mut period = vec![false; m as usize];
        period[0] = true;
        Self::new(vec![], period)
    }

    /// The arithmetic progression {start + k·step : k ∈ ω}.
    pub fn arithmetic(start: u64, step: u64) -> Result<Self, OmegaError> {
        if step == 0 {
            return Err(OmegaError::BadLiteral(
                format!("arith:{start}:{step}"),
                "step must be positive".into(),
            ));
        }
        if (start + step) as usize > MAX_PERIOD {
            return Err(OmegaError::RepresentationTooLarge(format!(
                "progression start {start} step {step}"
            )));
        }
        let prefix = vec![false; start as usize];
        let mut period = vec![false; step as usize];
        period[0] = true;
        Self::new(prefix, period)
    }

    /// {j ∈ ω : j > n}.
    pub fn above(n: u64) -> Self {
        Self {
            prefix: vec![false; (n + 1) as usize],
            period: vec![true],
        }
        // already canonical: last prefix bit false ≠ period bit
    }

    pub fn from_finite(elements: &[u64]) -> Result<Self, OmegaError> {
        let top = elements.iter().copied().max().map_or(0, |m| m + 1);
        if top as usize > MAX_PERIOD {
            return Err(OmegaError::RepresentationTooLarge(format!(
                "finite set up to {top}"
            )));
        }
        let mut prefix = vec![false; top as usize];
        for &e in elements {
            prefix[e as usize] = true;
        }
        Self::new(prefix, vec![false])
    }

    pub fn cofinite_excluding(elements: &[u64]) -> Result<Self, OmegaError> {
        Ok(Self::from_finite(elements)?.complement())
    }

    // --- literal syntax -----------------------------------------------------

    /// Parses the literal syntax: `"prefix:period"` bit strings (e.g. `":10"`
    /// for the evens), or a named builder — `omega`, `empty`, `evens`,
    /// `odds`, `mult:M`, `above:N`, `arith:S:D`, `finite:[a,b,..]`,
    /// `cofinite-minus:[a,b,..]`.
    pub fn parse(literal: &str) -> Result<Self, OmegaError> {
        let lit = literal.trim();
        let bad = |reason: &str| OmegaError::BadLiteral(lit.to_string(), reason.to_string());

        let parse_bits = |s: &str| -> Option<Vec<bool>> {
            s.chars()
                .map(|c| match c {
                    '0' => Some(false),
                    '1' => Some(true),
                    _ => None,
                })
                .collect()
        };
        if let Some((p, q)) = lit.split_once(':') {
            if let (Some(prefix), Some(period)) = (parse_bits(p), parse_bits(q)) {
                if !period.is_empty() {
                    return Self::new(prefix, period);
                }
            }
        }

        let parse_list = |s: &str| -> Result<Vec<u64>, OmegaError> {
            let inner = s
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| bad("expected [a,b,..]"))?;
            if inner.trim().is_empty() {
                return Ok(vec![]);
            }
            inner
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|e| bad(&e.to_string())))
                .collect()
        };

        match lit.split_once(':') {
            None => match lit {
                "omega" | "full" => Ok(Self::omega()),
                "empty" => Ok(Self::empty()),
                "evens" => Ok(Self::evens()),
                "odds" => Ok(Self::odds()),
                _ => Err(bad("unknown set name")),
            },
            Some(("mult", m)) => {
                Self::multiples_of(m.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?)
            }
            Some(("above", n)) => Ok(Self::above(
                n.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?,
            )),
            Some(("arith", rest)) => {
                let (s, d) = rest.split_once(':').ok_or_else(|| bad("expected arith:S:D"))?;
                Self::arithmetic(
                    s.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?,
                    d.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?,
                )
            }
            Some(("finite", list)) => Self::from_finite(&parse_list(list)?),
            Some(("cofinite-minus", list)) => Self::cofinite_excluding(&parse_list(list)?),
            Some(_) => Err(bad("unknown set literal")),
        }
    }
}

impl fmt::Display for RepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        write!(f, ":")?;
        for b in &self.period {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for RepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepSet({self})")
    }
}

impl Serialize for RepSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_string().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RepSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        RepSet::parse(&s).map_err(serde::de::Error::custom)
    }
}
