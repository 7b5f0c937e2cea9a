//! Free filters on ω with decidable membership at bounded depth.

use super::{OmegaError, RepSet, SetFamily};
use serde::{Deserialize, Serialize};

/// A free filter given by finitely many explicit generators, an optional
/// indexed generator rule, and implicitly all cofinite sets.
///
/// Membership is decided against the canonical chain
/// `C_k = ⋂ generators ∩ ⋂_{i<k} schema(i)`: a set belongs to the filter
/// iff it contains some `C_k` minus a finite set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepFilter {
    #[serde(default)]
    generators: Vec<RepSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<SetFamily>,
}

/// Outcome of a bounded membership query.
///
/// `Yes` and `No` are certificates; `Unknown` means the examined depth did
/// not settle the question (possible only for schema filters). Deepening the
/// chain can turn `Unknown` into `Yes`, never `Yes` into `No`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FilterVerdict {
    Yes {
        /// Chain depth at which containment was witnessed.
        depth: u64,
        /// The finite residue C_depth ∖ A.
        residue: RepSet,
    },
    No {
        /// An infinite residue C ∖ A that no deeper intersection can shrink
        /// to finite (no schema), or a finiteness refutation.
        residue: RepSet,
    },
    Unknown {
        examined_depth: u64,
    },
}

impl FilterVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, FilterVerdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, FilterVerdict::No { .. })
    }
}

impl RepFilter {
    /// The Fréchet filter alone: no generators beyond the cofinite sets.
    pub fn frechet() -> Self {
        Self { generators: vec![], schema: None }
    }

    /// A filter generated by explicit sets (plus the cofinite sets). Each
    /// generator and their full intersection must be infinite.
    pub fn from_generators(generators: Vec<RepSet>) -> Result<Self, OmegaError> {
        for g in &generators {
            if g.is_finite() {
                return Err(OmegaError::FiniteGenerator(g.to_string()));
            }
        }
        let filter = Self { generators, schema: None };
        let base = filter.explicit_intersection()?;
        if base.is_finite() {
            return Err(OmegaError::ImproperFilter { depth: 0 });
        }
        Ok(filter)
    }

    /// Attaches an indexed generator rule; the rule's sets join the
    /// generators one by one as the chain deepens.
    pub fn with_schema(mut self, schema: SetFamily) -> Self {
        self.schema = Some(schema);
        self
    }

    pub fn schema(&self) -> Option<&SetFamily> {
        self.schema.as_ref()
    }

    pub fn generators(&self) -> &[RepSet] {
        &self.generators
    }

    pub fn has_schema(&self) -> bool {
        self.schema.is_some()
    }

    fn explicit_intersection(&self) -> Result<RepSet, OmegaError> {
        let mut acc = RepSet::omega();
        for g in &self.generators {
            acc = acc.intersection(g)?;
        }
        Ok(acc)
    }

    /// The canonical chain set C_k: all explicit generators intersected with
    /// the first k schema sets. Errors if the result is finite (the filter
    /// would be improper).
    pub fn canonical(&self, depth: u64) -> Result<RepSet, OmegaError> {
        let mut acc = self.explicit_intersection()?;
        if let Some(schema) = &self.schema {
            for i in 0..depth {
                acc = acc.intersection(&schema.at(i)?)?;
            }
        }
        if acc.is_finite() {
            return Err(OmegaError::ImproperFilter { depth });
        }
        Ok(acc)
    }

    /// Decides membership of `a` at the given chain depth.
    ///
    /// Yes iff some examined C_k ∖ a is finite. For filters without a schema
    /// the chain is constant, so an infinite residue refutes membership
    /// outright; finite sets are refuted against any free filter.
    pub fn contains(&self, a: &RepSet, depth: u64) -> Result<FilterVerdict, OmegaError> {
        if a.is_finite() {
            // every member contains an infinite canonical set minus a finite one
            return Ok(FilterVerdict::No { residue: self.canonical(0)?.difference(a)? });
        }
        let max_depth = if self.schema.is_some() { depth } else { 0 };
        for k in 0..=max_depth {
            let residue = self.canonical(k)?.difference(a)?;
            if residue.is_finite() {
                return Ok(FilterVerdict::Yes { depth: k, residue });
            }
            if k == max_depth && self.schema.is_none() {
                return Ok(FilterVerdict::No { residue });
            }
        }
        Ok(FilterVerdict::Unknown { examined_depth: depth })
    }
}
