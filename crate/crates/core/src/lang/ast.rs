//! Abstract syntax for the three-layer query language.
//!
//! Events sit below probabilities: a propositional event over atoms `X=v`,
//! an intervention list (empty means "no intervention"), post-interventional
//! events `[ι]p`, and Boolean combinations of those. Terms combine
//! probabilities, conditionals, rational constants, arithmetic, and the
//! marginalization binder `sum x . t`. Formulas are Boolean combinations of
//! comparisons between terms.

use crate::model::Domain;
use crate::rational::Rational;
use std::collections::BTreeSet;

/// A value position: either a concrete domain value or a dummy bound by an
/// enclosing `sum`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValueExpr {
    Lit(u32),
    Dummy(String),
}

/// Propositional events over atoms `var = value`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropEvent {
    Atom { var: String, value: ValueExpr },
    Not(Box<PropEvent>),
    And(Box<PropEvent>, Box<PropEvent>),
    Or(Box<PropEvent>, Box<PropEvent>),
}

/// An intervention: a list of distinct variables pinned to values. The empty
/// list is the trivial intervention.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Intervention(pub Vec<(String, ValueExpr)>);

impl Intervention {
    pub fn top() -> Self {
        Intervention(Vec::new())
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }
}

/// Counterfactual events: Boolean combinations of post-interventional
/// propositions. A plain propositional event is `PostInt(⊤, p)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CfEvent {
    PostInt(Intervention, PropEvent),
    Not(Box<CfEvent>),
    And(Box<CfEvent>, Box<CfEvent>),
    Or(Box<CfEvent>, Box<CfEvent>),
}

impl CfEvent {
    pub fn observational(p: PropEvent) -> Self {
        CfEvent::PostInt(Intervention::top(), p)
    }
}

/// Terms: probabilities of events, conditional probabilities, rational
/// constants, arithmetic, and the marginalization binder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Prob(CfEvent),
    CondProb(CfEvent, CfEvent),
    Const(Rational),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Sum(String, Box<Term>),
}

/// Comparison operators. `<=` with negation and conjunction is the core;
/// the rest are accepted directly and kept in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    /// The operator satisfied exactly when `self` is not.
    pub fn negated(&self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
        }
    }

    /// The operator with sides swapped.
    pub fn flipped(&self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
        }
    }
}

/// Formulas: Boolean combinations of comparisons between closed terms.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Formula {
    Cmp(Term, CmpOp, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Left-associated conjunction of a nonempty list.
    pub fn and_all(mut parts: Vec<Formula>) -> Formula {
        assert!(!parts.is_empty());
        let first = parts.remove(0);
        parts
            .into_iter()
            .fold(first, |acc, f| Formula::And(Box::new(acc), Box::new(f)))
    }
}

// ── classification ────────────────────────────────────────────────────

/// Arithmetic fragments in increasing expressiveness: addition makes a term
/// linear; subtraction, negation, or multiplication make it polynomial.
/// Rational constants are weights and do not change the fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Arithmetic {
    #[default]
    Base,
    Lin,
    Poly,
}

impl Arithmetic {
    pub fn as_str(&self) -> &'static str {
        match self {
            Arithmetic::Base => "base",
            Arithmetic::Lin => "lin",
            Arithmetic::Poly => "poly",
        }
    }
}

/// Where a formula sits in the language family: hierarchy layer 1..3, least
/// containing arithmetic, and whether it uses marginalization or
/// conditionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub layer: u8,
    pub arithmetic: Arithmetic,
    pub uses_sum: bool,
    pub uses_cond: bool,
}

/// Layer of one probability argument: 1 for a bare propositional leaf, 2 for
/// a single post-interventional leaf, 3 as soon as events combine
/// post-interventional leaves.
fn event_layer(e: &CfEvent) -> u8 {
    match e {
        CfEvent::PostInt(i, _) if i.is_top() => 1,
        CfEvent::PostInt(_, _) => 2,
        _ => 3,
    }
}

#[derive(Default)]
struct ClassAcc {
    layer: u8,
    arithmetic: Arithmetic,
    uses_sum: bool,
    uses_cond: bool,
}

fn classify_term(t: &Term, acc: &mut ClassAcc) {
    match t {
        Term::Prob(e) => acc.layer = acc.layer.max(event_layer(e)),
        Term::CondProb(e, cond) => {
            acc.uses_cond = true;
            acc.layer = acc.layer.max(event_layer(e)).max(event_layer(cond));
        }
        Term::Const(_) => {}
        Term::Add(a, b) => {
            acc.arithmetic = acc.arithmetic.max(Arithmetic::Lin);
            classify_term(a, acc);
            classify_term(b, acc);
        }
        Term::Sub(a, b) | Term::Mul(a, b) => {
            acc.arithmetic = Arithmetic::Poly;
            classify_term(a, acc);
            classify_term(b, acc);
        }
        Term::Neg(a) => {
            acc.arithmetic = Arithmetic::Poly;
            classify_term(a, acc);
        }
        Term::Sum(_, a) => {
            acc.uses_sum = true;
            classify_term(a, acc);
        }
    }
}

impl Term {
    pub fn classify(&self) -> Classification {
        let mut acc = ClassAcc::default();
        classify_term(self, &mut acc);
        Classification {
            layer: acc.layer.max(1),
            arithmetic: acc.arithmetic,
            uses_sum: acc.uses_sum,
            uses_cond: acc.uses_cond,
        }
    }
}

impl Formula {
    /// Least labels containing the formula: layer, arithmetic, Σ, and
    /// conditional use.
    pub fn classify(&self) -> Classification {
        fn walk(f: &Formula, acc: &mut ClassAcc) {
            match f {
                Formula::Cmp(a, _, b) => {
                    classify_term(a, acc);
                    classify_term(b, acc);
                }
                Formula::Not(g) => walk(g, acc),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, acc);
                    walk(b, acc);
                }
            }
        }
        let mut acc = ClassAcc::default();
        walk(self, &mut acc);
        Classification {
            layer: acc.layer.max(1),
            arithmetic: acc.arithmetic,
            uses_sum: acc.uses_sum,
            uses_cond: acc.uses_cond,
        }
    }
}

// ── dummy substitution and closedness ─────────────────────────────────

fn subst_value(v: &ValueExpr, name: &str, value: u32) -> ValueExpr {
    match v {
        ValueExpr::Dummy(d) if d == name => ValueExpr::Lit(value),
        other => other.clone(),
    }
}

fn subst_prop(p: &PropEvent, name: &str, value: u32) -> PropEvent {
    match p {
        PropEvent::Atom { var, value: v } => PropEvent::Atom {
            var: var.clone(),
            value: subst_value(v, name, value),
        },
        PropEvent::Not(a) => PropEvent::Not(Box::new(subst_prop(a, name, value))),
        PropEvent::And(a, b) => PropEvent::And(
            Box::new(subst_prop(a, name, value)),
            Box::new(subst_prop(b, name, value)),
        ),
        PropEvent::Or(a, b) => PropEvent::Or(
            Box::new(subst_prop(a, name, value)),
            Box::new(subst_prop(b, name, value)),
        ),
    }
}

pub(crate) fn subst_cf(e: &CfEvent, name: &str, value: u32) -> CfEvent {
    match e {
        CfEvent::PostInt(ints, p) => CfEvent::PostInt(
            Intervention(
                ints.0
                    .iter()
                    .map(|(var, v)| (var.clone(), subst_value(v, name, value)))
                    .collect(),
            ),
            subst_prop(p, name, value),
        ),
        CfEvent::Not(a) => CfEvent::Not(Box::new(subst_cf(a, name, value))),
        CfEvent::And(a, b) => CfEvent::And(
            Box::new(subst_cf(a, name, value)),
            Box::new(subst_cf(b, name, value)),
        ),
        CfEvent::Or(a, b) => CfEvent::Or(
            Box::new(subst_cf(a, name, value)),
            Box::new(subst_cf(b, name, value)),
        ),
    }
}

impl Term {
    /// Replace every occurrence of the dummy with a concrete value. Inner
    /// binders never rebind an in-scope dummy, so the walk only stops at a
    /// binder of the same name defensively.
    pub fn substitute_dummy(&self, name: &str, value: u32) -> Term {
        match self {
            Term::Prob(e) => Term::Prob(subst_cf(e, name, value)),
            Term::CondProb(e, c) => {
                Term::CondProb(subst_cf(e, name, value), subst_cf(c, name, value))
            }
            Term::Const(r) => Term::Const(r.clone()),
            Term::Add(a, b) => Term::Add(
                Box::new(a.substitute_dummy(name, value)),
                Box::new(b.substitute_dummy(name, value)),
            ),
            Term::Sub(a, b) => Term::Sub(
                Box::new(a.substitute_dummy(name, value)),
                Box::new(b.substitute_dummy(name, value)),
            ),
            Term::Neg(a) => Term::Neg(Box::new(a.substitute_dummy(name, value))),
            Term::Mul(a, b) => Term::Mul(
                Box::new(a.substitute_dummy(name, value)),
                Box::new(b.substitute_dummy(name, value)),
            ),
            Term::Sum(x, a) if x != name => {
                Term::Sum(x.clone(), Box::new(a.substitute_dummy(name, value)))
            }
            Term::Sum(_, _) => self.clone(),
        }
    }

    /// Dummies occurring free in the term.
    pub fn free_dummies(&self) -> BTreeSet<String> {
        fn value(v: &ValueExpr, bound: &[String], out: &mut BTreeSet<String>) {
            if let ValueExpr::Dummy(d) = v {
                if !bound.contains(d) {
                    out.insert(d.clone());
                }
            }
        }
        fn prop(p: &PropEvent, bound: &[String], out: &mut BTreeSet<String>) {
            match p {
                PropEvent::Atom { value: v, .. } => value(v, bound, out),
                PropEvent::Not(a) => prop(a, bound, out),
                PropEvent::And(a, b) | PropEvent::Or(a, b) => {
                    prop(a, bound, out);
                    prop(b, bound, out);
                }
            }
        }
        fn cf(e: &CfEvent, bound: &[String], out: &mut BTreeSet<String>) {
            match e {
                CfEvent::PostInt(ints, p) => {
                    for (_, v) in &ints.0 {
                        value(v, bound, out);
                    }
                    prop(p, bound, out);
                }
                CfEvent::Not(a) => cf(a, bound, out),
                CfEvent::And(a, b) | CfEvent::Or(a, b) => {
                    cf(a, bound, out);
                    cf(b, bound, out);
                }
            }
        }
        fn term(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Prob(e) => cf(e, bound, out),
                Term::CondProb(e, c) => {
                    cf(e, bound, out);
                    cf(c, bound, out);
                }
                Term::Const(_) => {}
                Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                Term::Neg(a) => term(a, bound, out),
                Term::Sum(x, a) => {
                    bound.push(x.clone());
                    term(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        term(self, &mut Vec::new(), &mut out);
        out
    }
}

impl Formula {
    pub fn is_closed(&self) -> bool {
        fn walk(f: &Formula) -> bool {
            match f {
                Formula::Cmp(a, _, b) => {
                    a.free_dummies().is_empty() && b.free_dummies().is_empty()
                }
                Formula::Not(g) => walk(g),
                Formula::And(a, b) | Formula::Or(a, b) => walk(a) && walk(b),
            }
        }
        walk(self)
    }
}

// ── the value-mismatch event ──────────────────────────────────────────

/// The event "`var` takes different values under `i1` and under `i2`",
/// spelled out over the domain: the disjunction over `d` of
/// `[i1](var=d) && [i2](!(var=d))`. Under any fixed exogenous assignment it
/// holds iff the two post-interventional values of `var` differ.
pub fn neq_event(i1: &Intervention, i2: &Intervention, var: &str, domain: Domain) -> CfEvent {
    let disjunct = |d: u32| {
        let atom = PropEvent::Atom {
            var: var.to_string(),
            value: ValueExpr::Lit(d),
        };
        CfEvent::And(
            Box::new(CfEvent::PostInt(i1.clone(), atom.clone())),
            Box::new(CfEvent::PostInt(i2.clone(), PropEvent::Not(Box::new(atom)))),
        )
    };
    let mut values = domain.values();
    let first = disjunct(values.next().expect("nonempty domain"));
    values.fold(first, |acc, d| CfEvent::Or(Box::new(acc), Box::new(disjunct(d))))
}

// ── fresh names ───────────────────────────────────────────────────────

/// Deterministic fresh-name source. The preferred name is used when free;
/// fallbacks carry the reserved `_fresh` prefix with a numeric suffix.
pub fn fresh_name(preferred: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(preferred) {
        return preferred.to_string();
    }
    let base = format!("_fresh{preferred}");
    if !taken.contains(&base) {
        return base;
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|name| !taken.contains(name))
        .unwrap()
}
