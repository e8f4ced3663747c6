//! Structural causal models, Bayesian networks, DAGs, and exact joint
//! distributions over finite domains.
//!
//! All endogenous variables share one domain `Val = {0, .., c-1}`. An SCM
//! stores its mechanisms as explicit function tables and its exogenous
//! distribution as a sparse list of positive-probability assignments, which
//! keeps support counting and small-model checks cheap. Every probability is
//! an exact rational; distribution invariants (sums to one, positivity) are
//! checked as rational equalities, never with tolerances.

mod bn;
mod dag;
mod joint;
mod random;
mod scm;

pub use bn::{Bn, Cpt};
pub use dag::Dag;
pub use joint::JointTable;
pub use scm::{ExoMode, ExoVar, ExogenousSpec, Mechanism, Scm};

use std::fmt;

/// Shared domain of the endogenous variables: `Val = {0, 1, .., c-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain {
    c: u32,
}

impl Domain {
    pub fn new(c: u32) -> Result<Self, ModelError> {
        if c == 0 {
            return Err(ModelError::invalid(Violation::new(
                "domain-empty",
                "domain",
                "cardinality must be at least 1",
            )));
        }
        Ok(Domain { c })
    }

    /// Binary domain, the common case in tests and examples.
    pub fn binary() -> Self {
        Domain { c: 2 }
    }

    pub fn cardinality(&self) -> u32 {
        self.c
    }

    pub fn values(&self) -> std::ops::Range<u32> {
        0..self.c
    }

    pub fn contains(&self, v: u32) -> bool {
        v < self.c
    }
}

/// One violated invariant, naming the invariant and where it was violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Stable short identifier of the invariant, e.g. `"exo-sum"`.
    pub code: &'static str,
    /// Where in the model the violation sits, e.g. `"mechanism Y"`.
    pub location: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: &'static str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            code,
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.code, self.location, self.message)
    }
}

/// Errors from model construction and model surgery.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate intervention target `{0}`")]
    DuplicateIntervention(String),
    #[error("value {value} is outside the domain {{0..{card}}}")]
    ValueOutOfRange { value: u32, card: u32 },
}

impl ModelError {
    pub(crate) fn invalid(v: Violation) -> Self {
        ModelError::Invalid(vec![v])
    }
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Mixed-radix index of `values` under `radices`; the last position varies
/// fastest. Table layouts throughout the crate use this convention.
pub(crate) fn mixed_radix_index(values: &[u32], radices: &[u32]) -> usize {
    debug_assert_eq!(values.len(), radices.len());
    let mut idx = 0usize;
    for (v, r) in values.iter().zip(radices) {
        debug_assert!(v < r);
        idx = idx * (*r as usize) + *v as usize;
    }
    idx
}

/// All tuples over the given radices in lexicographic order.
pub(crate) fn enumerate_tuples(radices: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &r in radices {
        let mut next = Vec::with_capacity(out.len() * r as usize);
        for prefix in &out {
            for v in 0..r {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// `∏ radices` as usize, used for table sizing.
pub(crate) fn table_size(radices: &[u32]) -> usize {
    radices.iter().map(|&r| r as usize).product()
}
