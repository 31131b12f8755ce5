//! Verification records shared by every module.

use serde::Serialize;

/// One entry in an invariant-check ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub name: String,
    pub dim: usize,
}

/// Count of nonzero inner products between the basis vectors of two summands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossPairing {
    pub left: String,
    pub right: String,
    pub checked: usize,
    pub nonzero: usize,
}

/// A direct-sum decomposition of one degree, with its verification ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub title: String,
    pub degree: usize,
    pub ambient: String,
    pub ambient_dim: usize,
    pub summands: Vec<Summand>,
    pub pairings: Vec<CrossPairing>,
    pub checks: Vec<Check>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }

    pub fn summand_dim(&self, name: &str) -> Option<usize> {
        self.summands.iter().find(|s| s.name == name).map(|s| s.dim)
    }
}
