//! Formula and model reductions with machine-checkable contracts:
//! marginalization expansion, the complete-DAG reduction for observational
//! formulas, the causal-ordering encoding via a fresh control variable, DAG
//! constraints expressed as counterfactual formulas, and the compact
//! observation-insertion rule.

use crate::lang::{
    fresh_name, neq_event, CfEvent, CmpOp, Formula, Intervention, PropEvent, Term, ValueExpr,
};
use crate::model::{Dag, Domain};
use crate::rational::Rational;
use num::{One, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("sum expansion needs {required} nodes, over the budget of {budget}")]
    BudgetExceeded { required: u128, budget: usize },
    #[error("{operation} accepts formulas up to layer {max}, got layer {layer}")]
    LayerTooHigh {
        operation: &'static str,
        layer: u8,
        max: u8,
    },
    #[error("ordering must be a nonempty list of distinct variables")]
    BadOrdering,
    #[error("variables must be pairwise distinct")]
    DuplicateVariables,
}

// ── sum expansion ─────────────────────────────────────────────────────

fn expanded_size(t: &Term, c: u128) -> u128 {
    match t {
        Term::Prob(_) | Term::CondProb(_, _) | Term::Const(_) => 1,
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            1u128.saturating_add(expanded_size(a, c)).saturating_add(expanded_size(b, c))
        }
        Term::Neg(a) => 1u128.saturating_add(expanded_size(a, c)),
        Term::Sum(_, a) => {
            let body = expanded_size(a, c);
            body.saturating_mul(c).saturating_add(c.saturating_sub(1))
        }
    }
}

fn expand_term_unchecked(t: &Term, domain: Domain) -> Term {
    match t {
        Term::Prob(_) | Term::CondProb(_, _) | Term::Const(_) => t.clone(),
        Term::Add(a, b) => Term::Add(
            Box::new(expand_term_unchecked(a, domain)),
            Box::new(expand_term_unchecked(b, domain)),
        ),
        Term::Sub(a, b) => Term::Sub(
            Box::new(expand_term_unchecked(a, domain)),
            Box::new(expand_term_unchecked(b, domain)),
        ),
        Term::Mul(a, b) => Term::Mul(
            Box::new(expand_term_unchecked(a, domain)),
            Box::new(expand_term_unchecked(b, domain)),
        ),
        Term::Neg(a) => Term::Neg(Box::new(expand_term_unchecked(a, domain))),
        Term::Sum(x, body) => {
            let expanded = expand_term_unchecked(body, domain);
            let mut values = domain.values();
            let first = expanded.substitute_dummy(x, values.next().expect("nonempty domain"));
            values.fold(first, |acc, v| {
                Term::Add(Box::new(acc), Box::new(expanded.substitute_dummy(x, v)))
            })
        }
    }
}

/// Replace every `sum` binder by its written-out sum. The output value is
/// identical on every model; the size check runs before any rewriting so an
/// over-budget term fails with the size it would have needed.
pub fn expand_sums_term(
    t: &Term,
    domain: Domain,
    budget: usize,
) -> Result<Term, TransformError> {
    let required = expanded_size(t, domain.cardinality() as u128);
    if required > budget as u128 {
        return Err(TransformError::BudgetExceeded { required, budget });
    }
    Ok(expand_term_unchecked(t, domain))
}

/// [`expand_sums_term`] applied to both sides of every comparison.
pub fn expand_sums(f: &Formula, domain: Domain, budget: usize) -> Result<Formula, TransformError> {
    match f {
        Formula::Cmp(a, op, b) => Ok(Formula::Cmp(
            expand_sums_term(a, domain, budget)?,
            *op,
            expand_sums_term(b, domain, budget)?,
        )),
        Formula::Not(g) => Ok(Formula::Not(Box::new(expand_sums(g, domain, budget)?))),
        Formula::And(a, b) => Ok(Formula::And(
            Box::new(expand_sums(a, domain, budget)?),
            Box::new(expand_sums(b, domain, budget)?),
        )),
        Formula::Or(a, b) => Ok(Formula::Or(
            Box::new(expand_sums(a, domain, budget)?),
            Box::new(expand_sums(b, domain, budget)?),
        )),
    }
}

// ── complete-DAG reduction ────────────────────────────────────────────

/// For observational formulas, constraining the model by the complete DAG
/// changes nothing: any joint distribution factorizes over it by the chain
/// rule. Returns the formula unchanged together with that DAG.
pub fn reduce_to_complete_dag(
    f: &Formula,
    vars: &[String],
) -> Result<(Formula, Dag), TransformError> {
    let layer = f.classify().layer;
    if layer > 1 {
        return Err(TransformError::LayerTooHigh {
            operation: "complete-dag reduction",
            layer,
            max: 1,
        });
    }
    Ok((f.clone(), Dag::complete(vars.to_vec())))
}

// ── causal-ordering encoding ──────────────────────────────────────────

/// A total order over the endogenous variables, equivalent as a model
/// constraint to the complete DAG along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalOrdering(Vec<String>);

impl CausalOrdering {
    pub fn new(vars: Vec<String>) -> Result<Self, TransformError> {
        if vars.is_empty() {
            return Err(TransformError::BadOrdering);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(TransformError::BadOrdering);
            }
        }
        Ok(CausalOrdering(vars))
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    /// The complete DAG with edges along the ordering.
    pub fn complete_dag(&self) -> Dag {
        Dag::complete(self.0.clone())
    }
}

/// Result of the causal-ordering encoding: the rewritten formula, the name
/// of the control variable it introduces, and the declaration order for
/// solving it unconstrained (control variable first, so it can influence
/// every other variable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingEncoding {
    pub formula: Formula,
    pub control_var: String,
    pub vars: Vec<String>,
}

fn prefix_cf(e: &CfEvent, control: &str) -> CfEvent {
    match e {
        CfEvent::PostInt(ints, p) => {
            let mut items = Vec::with_capacity(ints.0.len() + 1);
            items.push((control.to_string(), ValueExpr::Lit(0)));
            items.extend(ints.0.iter().cloned());
            CfEvent::PostInt(Intervention(items), p.clone())
        }
        CfEvent::Not(a) => CfEvent::Not(Box::new(prefix_cf(a, control))),
        CfEvent::And(a, b) => CfEvent::And(
            Box::new(prefix_cf(a, control)),
            Box::new(prefix_cf(b, control)),
        ),
        CfEvent::Or(a, b) => CfEvent::Or(
            Box::new(prefix_cf(a, control)),
            Box::new(prefix_cf(b, control)),
        ),
    }
}

fn prefix_term(t: &Term, control: &str) -> Term {
    match t {
        Term::Prob(e) => Term::Prob(prefix_cf(e, control)),
        Term::CondProb(e, c) => Term::CondProb(prefix_cf(e, control), prefix_cf(c, control)),
        Term::Const(r) => Term::Const(r.clone()),
        Term::Add(a, b) => Term::Add(
            Box::new(prefix_term(a, control)),
            Box::new(prefix_term(b, control)),
        ),
        Term::Sub(a, b) => Term::Sub(
            Box::new(prefix_term(a, control)),
            Box::new(prefix_term(b, control)),
        ),
        Term::Mul(a, b) => Term::Mul(
            Box::new(prefix_term(a, control)),
            Box::new(prefix_term(b, control)),
        ),
        Term::Neg(a) => Term::Neg(Box::new(prefix_term(a, control))),
        Term::Sum(x, a) => Term::Sum(x.clone(), Box::new(prefix_term(a, control))),
    }
}

fn prefix_formula(f: &Formula, control: &str) -> Formula {
    match f {
        Formula::Cmp(a, op, b) => {
            Formula::Cmp(prefix_term(a, control), *op, prefix_term(b, control))
        }
        Formula::Not(g) => Formula::Not(Box::new(prefix_formula(g, control))),
        Formula::And(a, b) => Formula::And(
            Box::new(prefix_formula(a, control)),
            Box::new(prefix_formula(b, control)),
        ),
        Formula::Or(a, b) => Formula::Or(
            Box::new(prefix_formula(a, control)),
            Box::new(prefix_formula(b, control)),
        ),
    }
}

fn formula_dummies(f: &Formula) -> BTreeSet<String> {
    fn term(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Sum(x, a) => {
                out.insert(x.clone());
                term(a, out);
            }
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                term(a, out);
                term(b, out);
            }
            Term::Neg(a) => term(a, out),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Cmp(a, _, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Not(g) => walk(g, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    walk(f, &mut out);
    out
}

/// Encode a causal ordering into the formula itself: a fresh control
/// variable `C` is intervened to 0 in every primitive, and for each
/// consecutive pair of the ordering and each domain value `k` the conjunct
/// `P([C=1, prev=k](next=k)) = 1` pins the order. Satisfiability under the
/// ordering's complete DAG equals satisfiability of the result with the
/// control variable declared first.
pub fn encode_causal_ordering(
    f: &Formula,
    ord: &CausalOrdering,
    domain: Domain,
) -> Result<OrderingEncoding, TransformError> {
    let layer = f.classify().layer;
    if layer > 2 {
        return Err(TransformError::LayerTooHigh {
            operation: "causal-ordering encoding",
            layer,
            max: 2,
        });
    }
    let mut taken: BTreeSet<String> = ord.vars().iter().cloned().collect();
    taken.extend(formula_dummies(f));
    let control = fresh_name("C", &taken);

    let mut parts = vec![prefix_formula(f, &control)];
    for pair in ord.vars().windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        for k in domain.values() {
            let ints = Intervention(vec![
                (control.clone(), ValueExpr::Lit(1)),
                (prev.clone(), ValueExpr::Lit(k)),
            ]);
            let event = CfEvent::PostInt(
                ints,
                PropEvent::Atom {
                    var: next.clone(),
                    value: ValueExpr::Lit(k),
                },
            );
            parts.push(Formula::Cmp(
                Term::Prob(event),
                CmpOp::Eq,
                Term::Const(Rational::one()),
            ));
        }
    }
    let mut vars = vec![control.clone()];
    vars.extend(ord.vars().iter().cloned());
    Ok(OrderingEncoding {
        formula: Formula::and_all(parts),
        control_var: control,
        vars,
    })
}

// ── DAG constraints as counterfactual formulas ────────────────────────

/// Encode "the model's diagram is a subgraph of `g`" as a counterfactual
/// formula: for each variable, summed over a full dummy assignment, the
/// probability that intervening on its parents alone and intervening on all
/// other variables disagree about it must be zero.
pub fn encode_dag_constraint_l3(g: &Dag, domain: Domain) -> Formula {
    let vars = g.vars();
    let taken: BTreeSet<String> = vars.iter().cloned().collect();
    let mut dummies = Vec::with_capacity(vars.len());
    let mut k = 0usize;
    while dummies.len() < vars.len() {
        let candidate = format!("_freshv{k}");
        k += 1;
        if !taken.contains(&candidate) {
            dummies.push(candidate);
        }
    }

    let mut parts = Vec::with_capacity(vars.len());
    for (i, var) in vars.iter().enumerate() {
        let parents = g.parent_indices(i);
        let parent_ints = Intervention(
            parents
                .iter()
                .map(|&j| (vars[j].clone(), ValueExpr::Dummy(dummies[j].clone())))
                .collect(),
        );
        let other_ints = Intervention(
            (0..vars.len())
                .filter(|&j| j != i)
                .map(|j| (vars[j].clone(), ValueExpr::Dummy(dummies[j].clone())))
                .collect(),
        );
        let mut term = Term::Prob(neq_event(&parent_ints, &other_ints, var, domain));
        for dummy in dummies.iter().rev() {
            term = Term::Sum(dummy.clone(), Box::new(term));
        }
        parts.push(Formula::Cmp(term, CmpOp::Eq, Term::Const(Rational::zero())));
    }
    Formula::and_all(parts)
}

// ── the compact observation-insertion rule ────────────────────────────

/// The third do-calculus rule as one equation: summed over all values, the
/// squared difference between conditioning on `(z, w)` and on `w` alone
/// after intervening on `x` must vanish. Valid exactly on models where `y`
/// is insensitive to `z` given `w` under the intervention.
pub fn do_calculus_rule3(
    x: &str,
    y: &str,
    z: &str,
    w: &str,
    _domain: Domain,
) -> Result<Formula, TransformError> {
    let vars = [x, y, z, w];
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(TransformError::DuplicateVariables);
        }
    }
    let taken: BTreeSet<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut dummies = Vec::with_capacity(4);
    let mut k = 0usize;
    while dummies.len() < 4 {
        let candidate = format!("_freshv{k}");
        k += 1;
        if !taken.contains(&candidate) {
            dummies.push(candidate);
        }
    }
    let (dx, dy, dz, dw) = (&dummies[0], &dummies[1], &dummies[2], &dummies[3]);
    let atom = |var: &str, d: &String| PropEvent::Atom {
        var: var.to_string(),
        value: ValueExpr::Dummy(d.clone()),
    };
    let do_x = || Intervention(vec![(x.to_string(), ValueExpr::Dummy(dx.clone()))]);

    let lhs = Term::CondProb(
        CfEvent::PostInt(do_x(), atom(y, dy)),
        CfEvent::PostInt(
            do_x(),
            PropEvent::And(Box::new(atom(z, dz)), Box::new(atom(w, dw))),
        ),
    );
    let rhs = Term::CondProb(
        CfEvent::PostInt(do_x(), atom(y, dy)),
        CfEvent::PostInt(do_x(), atom(w, dw)),
    );
    let diff = Term::Sub(Box::new(lhs), Box::new(rhs));
    let squared = Term::Mul(Box::new(diff.clone()), Box::new(diff));
    let mut term = squared;
    for dummy in dummies.iter().rev() {
        term = Term::Sum(dummy.clone(), Box::new(term));
    }
    Ok(Formula::Cmp(term, CmpOp::Eq, Term::Const(Rational::zero())))
}
