//! Bayesian networks: a DAG plus conditional probability tables.

use super::{enumerate_tuples, mixed_radix_index, Dag, Domain, JointTable, ModelError, Violation};
use crate::rational::Rational;
use num::{One, Signed, Zero};

/// Conditional probability table of one variable given its DAG parents.
///
/// `rows` is indexed by the mixed-radix parent assignment (in the order of
/// `parents`, last parent fastest); each row lists the probabilities of the
/// target's values `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpt {
    pub target: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<Rational>>,
}

/// A Bayesian network over the shared endogenous domain. The joint
/// distribution is the product of the per-variable CPT entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bn {
    dag: Dag,
    domain: Domain,
    cpts: Vec<Cpt>,
}

impl Bn {
    /// Build a network, reordering the CPTs to the DAG's variable order and
    /// validating totality and row sums.
    pub fn new(dag: Dag, domain: Domain, mut cpts: Vec<Cpt>) -> Result<Bn, ModelError> {
        cpts.sort_by_key(|t| dag.index_of(&t.target).unwrap_or(usize::MAX));
        let mut violations = Vec::new();
        let c = domain.cardinality();
        if cpts.len() != dag.vars().len()
            || cpts.iter().zip(dag.vars()).any(|(t, v)| t.target != *v)
        {
            violations.push(Violation::new(
                "cpt-map",
                "cpts",
                "need exactly one CPT per variable",
            ));
            return Err(ModelError::Invalid(violations));
        }
        for cpt in &cpts {
            let loc = format!("cpt {}", cpt.target);
            let mut declared: Vec<&str> = cpt.parents.iter().map(|s| s.as_str()).collect();
            declared.sort_unstable();
            let mut expected = dag.parents_of(&cpt.target);
            expected.sort_unstable();
            if declared != expected {
                violations.push(Violation::new(
                    "cpt-parents",
                    loc.clone(),
                    "CPT parents do not match the DAG parents",
                ));
                continue;
            }
            let want_rows = (c as usize).pow(cpt.parents.len() as u32);
            if cpt.rows.len() != want_rows {
                violations.push(Violation::new(
                    "cpt-rows",
                    loc.clone(),
                    format!("{} rows given, parent assignments need {want_rows}", cpt.rows.len()),
                ));
                continue;
            }
            for (r, row) in cpt.rows.iter().enumerate() {
                if row.len() != c as usize {
                    violations.push(Violation::new(
                        "cpt-row-arity",
                        loc.clone(),
                        format!("row {r} has {} entries, expected {c}", row.len()),
                    ));
                    continue;
                }
                if row.iter().any(|p| p.is_negative()) {
                    violations.push(Violation::new(
                        "cpt-negative",
                        loc.clone(),
                        format!("row {r} has a negative entry"),
                    ));
                }
                let sum: Rational = row.iter().cloned().sum();
                if !sum.is_one() {
                    violations.push(Violation::new(
                        "cpt-row-sum",
                        loc.clone(),
                        format!("row {r} sums to {sum}, expected 1"),
                    ));
                }
            }
        }
        if violations.is_empty() {
            Ok(Bn { dag, domain, cpts })
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    /// The factorized joint: for each full assignment, the product of the
    /// CPT entries of every variable given its parents.
    pub fn joint_distribution(&self) -> JointTable {
        let n = self.dag.vars().len();
        let c = self.domain.cardinality();
        let var_pos = |name: &str| self.dag.index_of(name).expect("validated parent");
        let mut entries = Vec::new();
        for assignment in enumerate_tuples(&vec![c; n]) {
            let mut p = Rational::one();
            for (i, cpt) in self.cpts.iter().enumerate() {
                let parent_vals: Vec<u32> =
                    cpt.parents.iter().map(|q| assignment[var_pos(q)]).collect();
                let row = mixed_radix_index(&parent_vals, &vec![c; cpt.parents.len()]);
                p *= self.cpts[i].rows[row][assignment[i] as usize].clone();
                if p.is_zero() {
                    break;
                }
            }
            if !p.is_zero() {
                entries.push((assignment, p));
            }
        }
        JointTable::new(self.domain, self.dag.vars().to_vec(), entries)
            .expect("CPT products form a distribution")
    }
}
