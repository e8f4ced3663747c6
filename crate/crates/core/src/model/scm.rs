//! Structural causal models with table mechanisms and a sparse exogenous
//! distribution.

use super::{mixed_radix_index, table_size, Dag, Domain, JointTable, ModelError, Violation};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Whether the exogenous variables are jointly distributed or independent
/// per-mechanism blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExoMode {
    /// Arbitrary joint support over the exogenous variables; mechanisms may
    /// share exogenous arguments.
    SemiMarkovian,
    /// The joint support is the product of per-variable marginals and each
    /// mechanism reads its own disjoint block of exogenous variables.
    Markovian,
}

/// An exogenous variable with its finite domain `{0, .., card-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExoVar {
    pub name: String,
    pub card: u32,
}

/// The exogenous distribution: an explicit list of positive-probability
/// assignments. Assignments not listed have probability zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExogenousSpec {
    pub mode: ExoMode,
    pub vars: Vec<ExoVar>,
    /// Pairs of (full assignment over `vars`, strictly positive probability),
    /// kept sorted by assignment.
    pub support: Vec<(Vec<u32>, Rational)>,
}

impl ExogenousSpec {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn cards(&self) -> Vec<u32> {
        self.vars.iter().map(|v| v.card).collect()
    }

    /// Probability of a full exogenous assignment (zero when unlisted).
    pub fn prob(&self, u: &[u32]) -> Rational {
        match self.support.binary_search_by(|(t, _)| t.as_slice().cmp(u)) {
            Ok(i) => self.support[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }
}

/// One structural function: a total table from the values of the listed
/// parents and exogenous arguments to a value of the target.
///
/// Table layout: mixed radix over parents first (each with the shared
/// endogenous cardinality), then exogenous arguments (each with its own
/// cardinality); the last argument varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    pub target: String,
    pub parents: Vec<String>,
    pub exo_args: Vec<String>,
    pub table: Vec<u32>,
}

impl Mechanism {
    /// The constant function used by interventions: no arguments at all.
    pub fn constant(target: impl Into<String>, value: u32) -> Mechanism {
        Mechanism {
            target: target.into(),
            parents: Vec::new(),
            exo_args: Vec::new(),
            table: vec![value],
        }
    }
}

/// A structural causal model over a shared endogenous domain.
///
/// The declared variable order is the recursive order: every mechanism's
/// parents precede its target. Construction validates all invariants;
/// operations assume them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scm {
    domain: Domain,
    vars: Vec<String>,
    mechanisms: Vec<Mechanism>,
    exo: ExogenousSpec,
}

impl Scm {
    /// Build a model, canonicalizing mechanism order (to the variable order)
    /// and support order (sorted by assignment), and checking every
    /// invariant. Fails with the full violation list.
    pub fn new(
        domain: Domain,
        vars: Vec<String>,
        mut mechanisms: Vec<Mechanism>,
        mut exo: ExogenousSpec,
    ) -> Result<Scm, ModelError> {
        mechanisms.sort_by_key(|m| vars.iter().position(|v| *v == m.target).unwrap_or(usize::MAX));
        exo.support.sort_by(|(a, _), (b, _)| a.cmp(b));
        let violations = validate_parts(domain, &vars, &mechanisms, &exo);
        if violations.is_empty() {
            Ok(Scm {
                domain,
                vars,
                mechanisms,
                exo,
            })
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn exo(&self) -> &ExogenousSpec {
        &self.exo
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Re-check every invariant; empty iff the model is valid. Models built
    /// through [`Scm::new`] always validate cleanly.
    pub fn validate(&self) -> Vec<Violation> {
        validate_parts(self.domain, &self.vars, &self.mechanisms, &self.exo)
    }

    /// The causal diagram: an edge into each variable from every parent
    /// listed by its mechanism.
    pub fn causal_diagram(&self) -> Dag {
        let edges: Vec<(String, String)> = self
            .mechanisms
            .iter()
            .flat_map(|m| m.parents.iter().map(|p| (p.clone(), m.target.clone())))
            .collect();
        Dag::new(self.vars.clone(), &edges).expect("valid model has an acyclic diagram")
    }

    /// The unique endogenous assignment induced by a full exogenous
    /// assignment, applying mechanisms in the recursive order.
    pub fn evaluate(&self, u: &[u32]) -> Vec<u32> {
        self.evaluate_with(u, &[])
    }

    /// Evaluation with intervention overrides, `overrides[i] = Some(v)` fixing
    /// variable `i` to `v`. Behaviorally identical to intervening first and
    /// evaluating the surgered model.
    pub(crate) fn evaluate_with(&self, u: &[u32], overrides: &[Option<u32>]) -> Vec<u32> {
        debug_assert_eq!(u.len(), self.exo.vars.len());
        let exo_cards = self.exo.cards();
        let mut values = vec![0u32; self.vars.len()];
        for (i, mech) in self.mechanisms.iter().enumerate() {
            if let Some(v) = overrides.get(i).copied().flatten() {
                values[i] = v;
                continue;
            }
            let mut args = Vec::with_capacity(mech.parents.len() + mech.exo_args.len());
            let mut radices = Vec::with_capacity(args.capacity());
            for p in &mech.parents {
                let pi = self.var_index(p).expect("validated parent");
                args.push(values[pi]);
                radices.push(self.domain.cardinality());
            }
            for e in &mech.exo_args {
                let ei = self.exo.index_of(e).expect("validated exo arg");
                args.push(u[ei]);
                radices.push(exo_cards[ei]);
            }
            values[i] = mech.table[mixed_radix_index(&args, &radices)];
        }
        values
    }

    /// Replace each intervened mechanism by the constant function; an empty
    /// list returns an identical model.
    pub fn intervene(&self, ints: &[(String, u32)]) -> Result<Scm, ModelError> {
        let mut seen = Vec::new();
        let mut out = self.clone();
        for (var, value) in ints {
            let i = self
                .var_index(var)
                .ok_or_else(|| ModelError::UnknownVariable(var.clone()))?;
            if seen.contains(&i) {
                return Err(ModelError::DuplicateIntervention(var.clone()));
            }
            if !self.domain.contains(*value) {
                return Err(ModelError::ValueOutOfRange {
                    value: *value,
                    card: self.domain.cardinality(),
                });
            }
            seen.push(i);
            out.mechanisms[i] = Mechanism::constant(var.clone(), *value);
        }
        Ok(out)
    }

    /// The exact observational distribution: each support point's mass lands
    /// on the endogenous assignment it induces.
    pub fn joint_distribution(&self) -> JointTable {
        let mut entries: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (u, p) in &self.exo.support {
            let x = self.evaluate(u);
            *entries.entry(x).or_insert_with(Rational::zero) += p.clone();
        }
        JointTable::new(self.domain, self.vars.clone(), entries)
            .expect("valid model induces a valid joint table")
    }

    /// Number of exogenous assignments with positive probability.
    pub fn count_support_u(&self) -> usize {
        self.exo.support.len()
    }

    /// Number of endogenous assignments with positive probability.
    pub fn count_support_x(&self) -> usize {
        self.joint_distribution().support_size()
    }
}

/// Validate the pieces of an SCM without constructing one. Returns every
/// violated invariant with its location.
pub fn validate_parts(
    domain: Domain,
    vars: &[String],
    mechanisms: &[Mechanism],
    exo: &ExogenousSpec,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let c = domain.cardinality();

    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            out.push(Violation::new(
                "dup-var",
                format!("variable {v}"),
                "endogenous variable declared twice",
            ));
        }
    }
    for (i, v) in exo.vars.iter().enumerate() {
        if exo.vars[..i].iter().any(|w| w.name == v.name) {
            out.push(Violation::new(
                "dup-exo-var",
                format!("exogenous variable {}", v.name),
                "exogenous variable declared twice",
            ));
        }
        if v.card == 0 {
            out.push(Violation::new(
                "exo-empty-domain",
                format!("exogenous variable {}", v.name),
                "domain must be nonempty",
            ));
        }
    }

    if mechanisms.len() != vars.len()
        || mechanisms
            .iter()
            .zip(vars)
            .any(|(m, v)| m.target != *v)
    {
        out.push(Violation::new(
            "mechanism-map",
            "mechanisms",
            "need exactly one mechanism per endogenous variable",
        ));
        return out; // indexing below assumes the one-to-one map
    }

    let exo_cards = exo.cards();
    for (i, mech) in mechanisms.iter().enumerate() {
        let loc = format!("mechanism {}", mech.target);
        let mut radices = Vec::new();
        let mut args_ok = true;
        for (k, p) in mech.parents.iter().enumerate() {
            if mech.parents[..k].contains(p) {
                out.push(Violation::new("dup-parent", loc.clone(), format!("parent {p} listed twice")));
            }
            match vars.iter().position(|v| v == p) {
                Some(j) if j == i => {
                    out.push(Violation::new(
                        "self-parent",
                        loc.clone(),
                        "target appears among its own parents",
                    ));
                    args_ok = false;
                }
                Some(j) if j > i => {
                    out.push(Violation::new(
                        "not-recursive",
                        loc.clone(),
                        format!("parent {p} does not precede {} in the declared order", mech.target),
                    ));
                    radices.push(c);
                }
                Some(_) => radices.push(c),
                None => {
                    out.push(Violation::new(
                        "unknown-parent",
                        loc.clone(),
                        format!("parent {p} is not a declared endogenous variable"),
                    ));
                    args_ok = false;
                }
            }
        }
        for (k, e) in mech.exo_args.iter().enumerate() {
            if mech.exo_args[..k].contains(e) {
                out.push(Violation::new("dup-exo-arg", loc.clone(), format!("exogenous argument {e} listed twice")));
            }
            match exo.index_of(e) {
                Some(j) => radices.push(exo_cards[j]),
                None => {
                    out.push(Violation::new(
                        "unknown-exo-arg",
                        loc.clone(),
                        format!("exogenous argument {e} is not declared"),
                    ));
                    args_ok = false;
                }
            }
        }
        if args_ok {
            let want = table_size(&radices);
            if mech.table.len() != want {
                out.push(Violation::new(
                    "table-arity",
                    loc.clone(),
                    format!("table has {} entries, argument domains need {want}", mech.table.len()),
                ));
            }
        }
        if let Some(bad) = mech.table.iter().find(|&&v| !domain.contains(v)) {
            out.push(Violation::new(
                "table-range",
                loc,
                format!("table value {bad} is outside the domain {{0..{c}}}"),
            ));
        }
    }

    // exogenous support
    let mut sum = Rational::zero();
    for (k, (tuple, prob)) in exo.support.iter().enumerate() {
        let loc = format!("exogenous support row {k}");
        if tuple.len() != exo.vars.len() {
            out.push(Violation::new(
                "support-arity",
                loc.clone(),
                format!("assignment has {} values, expected {}", tuple.len(), exo.vars.len()),
            ));
        } else if let Some((pos, _)) = tuple
            .iter()
            .zip(&exo_cards)
            .enumerate()
            .find(|(_, (v, card))| *v >= *card)
        {
            out.push(Violation::new(
                "support-range",
                loc.clone(),
                format!("value for {} is outside its domain", exo.vars[pos].name),
            ));
        }
        if exo.support[..k].iter().any(|(t, _)| t == tuple) {
            out.push(Violation::new(
                "support-dup",
                loc.clone(),
                "assignment listed twice",
            ));
        }
        if !prob.is_positive() {
            out.push(Violation::new(
                "support-positive",
                loc,
                "support probabilities must be strictly positive",
            ));
        }
        sum += prob.clone();
    }
    if !sum.is_one() {
        out.push(Violation::new(
            "exo-sum",
            "exogenous support",
            format!("support sum ≠ 1 (got {sum})"),
        ));
    }

    if exo.mode == ExoMode::Markovian {
        validate_markovian(mechanisms, exo, &mut out);
    }
    out
}

/// Markovian restriction: disjoint exogenous blocks across mechanisms and a
/// product-form joint support.
fn validate_markovian(mechanisms: &[Mechanism], exo: &ExogenousSpec, out: &mut Vec<Violation>) {
    for (i, a) in mechanisms.iter().enumerate() {
        for b in &mechanisms[i + 1..] {
            if let Some(shared) = a.exo_args.iter().find(|e| b.exo_args.contains(e)) {
                out.push(Violation::new(
                    "markov-shared-exo",
                    format!("mechanisms {} and {}", a.target, b.target),
                    format!("share exogenous argument {shared} in Markovian mode"),
                ));
            }
        }
    }
    // marginals of the joint support
    let m = exo.vars.len();
    let mut marginals: Vec<BTreeMap<u32, Rational>> = vec![BTreeMap::new(); m];
    for (tuple, prob) in &exo.support {
        if tuple.len() != m {
            return; // arity violations already reported
        }
        for (i, &v) in tuple.iter().enumerate() {
            *marginals[i].entry(v).or_insert_with(Rational::zero) += prob.clone();
        }
    }
    let product_size: usize = marginals.iter().map(|m| m.len().max(1)).product();
    if product_size != exo.support.len() && !exo.support.is_empty() {
        out.push(Violation::new(
            "markov-product",
            "exogenous support",
            "joint support is not the product of the per-variable marginals",
        ));
        return;
    }
    for (tuple, prob) in &exo.support {
        let product = tuple
            .iter()
            .enumerate()
            .map(|(i, v)| marginals[i][v].clone())
            .fold(Rational::one(), |acc, p| acc * p);
        if product != *prob {
            out.push(Violation::new(
                "markov-product",
                "exogenous support",
                "joint probabilities do not factor into per-variable marginals",
            ));
            return;
        }
    }
}
