//! Indexed families of sets: finitely described rules n ↦ A_n.

use super::{OmegaError, RepSet};
use serde::{Deserialize, Serialize};

/// A rule assigning an eventually-periodic set to every index n ∈ ω.
///
/// Rules are the finite descriptions behind indexed generator schemas,
/// partition cells, and the set sequences fed to the selectivity
/// combinatorics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetFamily {
    /// A_n = `set` for every n.
    Constant { set: RepSet },
    /// A_n = { j : j > mul·n + add }.
    TailAffine { mul: u64, add: u64 },
    /// A_n = multiples of base^n.
    MultiplesOfPow { base: u64 },
    /// Partition cells of fixed width: C_n = { width·n, …, width·n+width−1 }.
    WidthBlocks { width: u64 },
    /// A_n = { j ∈ set : j > n }.
    Above { set: RepSet },
    /// Explicit leading entries, then an optional fallback rule.
    Table {
        entries: Vec<RepSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<Box<SetFamily>>,
    },
}

impl SetFamily {
    /// The set at index `n`.
    pub fn at(&self, n: u64) -> Result<RepSet, OmegaError> {
        match self {
            SetFamily::Constant { set } => Ok(set.clone()),
            SetFamily::TailAffine { mul, add } => {
                let bound = mul
                    .checked_mul(n)
                    .and_then(|m| m.checked_add(*add))
                    .ok_or_else(|| OmegaError::FamilyIndex {
                        index: n,
                        reason: "affine bound overflows".into(),
                    })?;
                Ok(RepSet::above(bound))
            }
            SetFamily::MultiplesOfPow { base } => {
                if *base < 2 {
                    return Err(OmegaError::FamilyIndex {
                        index: n,
                        reason: format!("base {base} must be at least 2"),
                    });
                }
                let modulus = base.checked_pow(n.try_into().map_err(|_| {
                    OmegaError::FamilyIndex {
                        index: n,
                        reason: "index too large".into(),
                    }
                })?)
                .ok_or_else(|| OmegaError::FamilyIndex {
                    index: n,
                    reason: format!("{base}^{n} overflows"),
                })?;
                RepSet::multiples_of(modulus)
            }
            SetFamily::WidthBlocks { width } => {
                if *width == 0 {
                    return Err(OmegaError::FamilyIndex {
                        index: n,
                        reason: "width must be positive".into(),
                    });
                }
                let start = width.checked_mul(n).ok_or_else(|| OmegaError::FamilyIndex {
                    index: n,
                    reason: "block start overflows".into(),
                })?;
                let cell: Vec<u64> = (start..start + width).collect();
                RepSet::from_finite(&cell)
            }
            SetFamily::Above { set } => set.difference(&RepSet::from_finite(
                &(0..=n).collect::<Vec<_>>(),
            )?),
            SetFamily::Table { entries, default } => {
                if let Some(entry) = entries.get(n as usize) {
                    Ok(entry.clone())
                } else if let Some(rule) = default {
                    rule.at(n)
                } else {
                    Err(OmegaError::FamilyIndex {
                        index: n,
                        reason: format!("table has {} entries and no default", entries.len()),
                    })
                }
            }
        }
    }

    /// Parses the CLI shorthand: `"j>2i"`/`"j>2i+1"` (affine tails),
    /// `"mult-pow:2"`, `"blocks:2"`, `"const:<set literal>"`,
    /// `"above:<set literal>"`, `"omega"`.
    pub fn parse(text: &str) -> Result<Self, OmegaError> {
        let t = text.trim();
        let bad = |reason: &str| OmegaError::BadLiteral(t.to_string(), reason.to_string());
        if t == "omega" {
            return Ok(SetFamily::Constant { set: RepSet::omega() });
        }
        if let Some(rest) = t.strip_prefix("j>") {
            // forms: "i", "2i", "2i+1", "i+3", plain "5"
            let (mul, add) = match rest.split_once('i') {
                Some((m, a)) => {
                    let mul = if m.is_empty() {
                        1
                    } else {
                        m.parse::<u64>().map_err(|e| bad(&e.to_string()))?
                    };
                    let add = match a.strip_prefix('+') {
                        Some(a) => a.parse::<u64>().map_err(|e| bad(&e.to_string()))?,
                        None if a.is_empty() => 0,
                        None => return Err(bad("expected j>Ai+B")),
                    };
                    (mul, add)
                }
                None => (0, rest.parse::<u64>().map_err(|e| bad(&e.to_string()))?),
            };
            return Ok(SetFamily::TailAffine { mul, add });
        }
        match t.split_once(':') {
            Some(("mult-pow", b)) => Ok(SetFamily::MultiplesOfPow {
                base: b.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?,
            }),
            Some(("blocks", w)) => Ok(SetFamily::WidthBlocks {
                width: w.parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?,
            }),
            Some(("const", lit)) => Ok(SetFamily::Constant { set: RepSet::parse(lit)? }),
            Some(("above", lit)) => Ok(SetFamily::Above { set: RepSet::parse(lit)? }),
            _ => Err(bad("unknown family shorthand")),
        }
    }
}
