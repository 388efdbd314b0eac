//! Decidable subgroup membership oracles.
//!
//! Two families are supported, both with exact membership, conjugation
//! and intersection: congruence-defined subgroups of `SL_n(Z)` and
//! finitely generated subgroups of free groups. Only
//! decidable-membership families are admitted at the type level, so
//! every downstream probe result is exact rather than heuristic.

pub mod congruence;
pub mod free;

pub use congruence::{group_order_mod, CongruenceError, CongruenceOracle, ModMatrix};
pub use free::{FoldedAutomaton, FreeError, FreeSubgroup};

use crate::word::Word;
use crate::RationalMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error("element kind does not match the handle's ambient group")]
    AmbientKindMismatch,
    #[error("handles have different variants")]
    VariantMismatch,
    #[error("invalid subgroup spec: {0}")]
    BadSpec(String),
}

/// An element of one of the two supported ambient groups.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Matrix(RationalMatrix),
    Word(Word),
}

impl GroupElement {
    pub fn matrix(&self) -> Result<&RationalMatrix, OracleError> {
        match self {
            GroupElement::Matrix(m) => Ok(m),
            GroupElement::Word(_) => Err(OracleError::AmbientKindMismatch),
        }
    }

    pub fn word(&self) -> Result<&Word, OracleError> {
        match self {
            GroupElement::Word(w) => Ok(w),
            GroupElement::Matrix(_) => Err(OracleError::AmbientKindMismatch),
        }
    }
}

/// A subgroup with decidable membership, supporting `contains`,
/// `conjugate`, `intersect` and equality within its variant.
#[derive(Debug, Clone)]
pub enum SubgroupHandle {
    Congruence(CongruenceOracle),
    Free(FreeSubgroup),
}

impl SubgroupHandle {
    /// Exact membership verdict.
    pub fn contains(&self, g: &GroupElement) -> Result<bool, OracleError> {
        match self {
            SubgroupHandle::Congruence(o) => Ok(o.contains(g.matrix()?)?),
            SubgroupHandle::Free(h) => Ok(h.contains(g.word()?)?),
        }
    }

    /// Handle for `gamma Delta gamma^-1`.
    pub fn conjugate(&self, gamma: &GroupElement) -> Result<SubgroupHandle, OracleError> {
        match self {
            SubgroupHandle::Congruence(o) => {
                Ok(SubgroupHandle::Congruence(o.conjugated(gamma.matrix()?)?))
            }
            SubgroupHandle::Free(h) => Ok(SubgroupHandle::Free(h.conjugated(gamma.word()?)?)),
        }
    }

    /// Handle for the intersection; both handles must be of the same
    /// variant over the same ambient group.
    pub fn intersect(
        &self,
        other: &SubgroupHandle,
        budget: usize,
    ) -> Result<SubgroupHandle, OracleError> {
        match (self, other) {
            (SubgroupHandle::Congruence(a), SubgroupHandle::Congruence(b)) => {
                Ok(SubgroupHandle::Congruence(a.intersect(b, budget)?))
            }
            (SubgroupHandle::Free(a), SubgroupHandle::Free(b)) => {
                Ok(SubgroupHandle::Free(a.intersect(b)?))
            }
            _ => Err(OracleError::VariantMismatch),
        }
    }

    /// Equality of the represented subgroups.
    pub fn same_subgroup(&self, other: &SubgroupHandle) -> Result<bool, OracleError> {
        match (self, other) {
            (SubgroupHandle::Congruence(a), SubgroupHandle::Congruence(b)) => {
                Ok(a.same_subgroup(b))
            }
            (SubgroupHandle::Free(a), SubgroupHandle::Free(b)) => Ok(a.same_subgroup(b)),
            _ => Err(OracleError::VariantMismatch),
        }
    }
}

/// On-disk subgroup description. The JSON layout is stable:
/// `{"variant":"congruence","n":3,"m":2,"image_generators":[...]}` or
/// `{"variant":"free","rank":2,"generators":["aa","bb"]}` with words
/// over `a..z` and capitals for inverses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum SubgroupSpec {
    Congruence {
        n: usize,
        m: u64,
        image_generators: Vec<Vec<Vec<i64>>>,
    },
    Free {
        rank: usize,
        generators: Vec<String>,
    },
}

impl SubgroupSpec {
    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        serde_json::from_str(text).map_err(|e| OracleError::BadSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Instantiate the described oracle. `budget` caps closure
    /// enumeration for the congruence variant.
    pub fn build(&self, budget: usize) -> Result<SubgroupHandle, OracleError> {
        match self {
            SubgroupSpec::Congruence {
                n,
                m,
                image_generators,
            } => {
                let gens = image_generators
                    .iter()
                    .map(|rows| {
                        if rows.len() != *n || rows.iter().any(|r| r.len() != *n) {
                            return Err(OracleError::BadSpec(format!(
                                "image generator is not {n}x{n}"
                            )));
                        }
                        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
                        Ok(ModMatrix::from_entries(*n, *m, &flat))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SubgroupHandle::Congruence(CongruenceOracle::new(
                    *n, *m, gens, budget,
                )?))
            }
            SubgroupSpec::Free { rank, generators } => {
                let words = generators
                    .iter()
                    .map(|g| Word::parse(g, *rank).map_err(|e| OracleError::BadSpec(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SubgroupHandle::Free(FreeSubgroup::new(*rank, words)?))
            }
        }
    }
}
