//! Exact joint distributions over full endogenous assignments.

use super::{ExoMode, ExoVar, ExogenousSpec, Domain, Mechanism, ModelError, Scm, Violation};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A sparse map from full endogenous assignments to positive rational
/// probabilities, summing to exactly one. Omitted assignments have
/// probability zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    domain: Domain,
    vars: Vec<String>,
    entries: BTreeMap<Vec<u32>, Rational>,
}

impl JointTable {
    /// Build a table; exact zeros are dropped, negative probabilities and
    /// sums different from one are rejected.
    pub fn new(
        domain: Domain,
        vars: Vec<String>,
        entries: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<JointTable, ModelError> {
        let mut map = BTreeMap::new();
        let mut sum = Rational::zero();
        for (assignment, prob) in entries {
            if assignment.len() != vars.len() {
                return Err(ModelError::invalid(Violation::new(
                    "joint-arity",
                    "entries",
                    format!("assignment has {} values, expected {}", assignment.len(), vars.len()),
                )));
            }
            if let Some(&v) = assignment.iter().find(|&&v| !domain.contains(v)) {
                return Err(ModelError::ValueOutOfRange {
                    value: v,
                    card: domain.cardinality(),
                });
            }
            if prob.is_negative() {
                return Err(ModelError::invalid(Violation::new(
                    "joint-negative",
                    "entries",
                    "probabilities must be nonnegative",
                )));
            }
            sum += prob.clone();
            if prob.is_zero() {
                continue;
            }
            if map.insert(assignment, prob).is_some() {
                return Err(ModelError::invalid(Violation::new(
                    "joint-dup",
                    "entries",
                    "assignment listed twice",
                )));
            }
        }
        if !sum.is_one() {
            return Err(ModelError::invalid(Violation::new(
                "joint-sum",
                "entries",
                format!("entries sum ≠ 1 (got {sum})"),
            )));
        }
        Ok(JointTable { domain, vars, entries: map })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Probability of a full assignment, zero when absent.
    pub fn prob(&self, assignment: &[u32]) -> Rational {
        self.entries
            .get(assignment)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Positive entries in lexicographic assignment order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Sum out the named variables, keeping the rest in their current order.
    pub fn marginalize_away(&self, drop: &[String]) -> Result<JointTable, ModelError> {
        for d in drop {
            if !self.vars.contains(d) {
                return Err(ModelError::UnknownVariable(d.clone()));
            }
        }
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| !drop.contains(&self.vars[i]))
            .collect();
        let mut entries: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (assignment, prob) in &self.entries {
            let key: Vec<u32> = keep.iter().map(|&i| assignment[i]).collect();
            *entries.entry(key).or_insert_with(Rational::zero) += prob.clone();
        }
        JointTable::new(
            self.domain,
            keep.iter().map(|&i| self.vars[i].clone()).collect(),
            entries,
        )
    }

    /// The identity-mechanism model inducing exactly this distribution: one
    /// exogenous variable per endogenous one, jointly distributed as the
    /// table, and each mechanism copying its exogenous twin.
    pub fn lift_to_scm(&self) -> Scm {
        let exo_vars: Vec<ExoVar> = (0..self.vars.len())
            .map(|i| ExoVar {
                name: format!("U{i}"),
                card: self.domain.cardinality(),
            })
            .collect();
        let identity: Vec<u32> = self.domain.values().collect();
        let mechanisms: Vec<Mechanism> = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| Mechanism {
                target: v.clone(),
                parents: Vec::new(),
                exo_args: vec![format!("U{i}")],
                table: identity.clone(),
            })
            .collect();
        let support: Vec<(Vec<u32>, Rational)> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Scm::new(
            self.domain,
            self.vars.clone(),
            mechanisms,
            ExogenousSpec {
                mode: ExoMode::SemiMarkovian,
                vars: exo_vars,
                support,
            },
        )
        .expect("lifted model is valid by construction")
    }
}
