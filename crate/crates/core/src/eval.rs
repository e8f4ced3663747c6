//! Exact semantics of events, terms, and formulas against SCMs and BNs.
//!
//! A counterfactual event is decided per exogenous assignment by replaying
//! the mechanisms under each intervention; a probability is the exact sum of
//! the support masses of the satisfying assignments. A conditional whose
//! condition has probability zero is undefined; undefinedness propagates
//! through arithmetic, makes any comparison undefined, and lifts through
//! the Boolean connectives as strong Kleene truth.

use crate::lang::{CfEvent, Formula, PropEvent, Term, ValueExpr};
use crate::model::{Bn, Scm};
use crate::rational::Rational;
use num::Zero;

/// Evaluation controls. `sum_budget` caps the total number of summand
/// evaluations produced by `sum` binders; expansion is exponential in
/// nesting depth, so runaway terms fail fast instead of looping.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub sum_budget: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            sum_budget: 1_000_000,
        }
    }
}

/// A conditional that turned out undefined: its condition had probability
/// zero in the model at hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndefinedConditional {
    pub condition: CfEvent,
}

/// Value of a term: a rational, or undefined with the first offending
/// conditional (leftmost-innermost in evaluation order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Rational),
    Undefined(UndefinedConditional),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            EvalOutcome::Value(r) => Some(r),
            EvalOutcome::Undefined(_) => None,
        }
    }
}

/// Three-valued verdict of a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undefined(UndefinedConditional),
}

impl Verdict {
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::True)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("dummy `{0}` is free at evaluation time")]
    FreeDummy(String),
    #[error("sum expansion exceeded the budget of {budget} summands")]
    SumBudgetExceeded { budget: usize },
    #[error("intervention value {value} is outside the domain {{0..{card}}}")]
    ValueOutOfRange { value: u32, card: u32 },
    #[error("variable `{0}` does not exist in the model")]
    UnknownVariable(String),
    #[error("formula at layer {layer} cannot be checked against a Bayesian network; only observational (layer 1) formulas are")]
    InterventionalOnBn { layer: u8 },
}

fn literal(v: &ValueExpr) -> Result<u32, EvalError> {
    match v {
        ValueExpr::Lit(n) => Ok(*n),
        ValueExpr::Dummy(d) => Err(EvalError::FreeDummy(d.clone())),
    }
}

fn eval_prop(scm: &Scm, values: &[u32], p: &PropEvent) -> Result<bool, EvalError> {
    match p {
        PropEvent::Atom { var, value } => {
            let i = scm
                .var_index(var)
                .ok_or_else(|| EvalError::UnknownVariable(var.clone()))?;
            Ok(values[i] == literal(value)?)
        }
        PropEvent::Not(a) => Ok(!eval_prop(scm, values, a)?),
        PropEvent::And(a, b) => Ok(eval_prop(scm, values, a)? && eval_prop(scm, values, b)?),
        PropEvent::Or(a, b) => Ok(eval_prop(scm, values, a)? || eval_prop(scm, values, b)?),
    }
}

/// Does the model under exogenous assignment `u` satisfy the closed
/// counterfactual event? Post-interventional leaves replay the mechanisms
/// with the intervened variables pinned; connectives are Boolean.
pub fn satisfies_cf(scm: &Scm, u: &[u32], event: &CfEvent) -> Result<bool, EvalError> {
    match event {
        CfEvent::PostInt(ints, p) => {
            let mut overrides = vec![None; scm.vars().len()];
            for (var, value) in &ints.0 {
                let i = scm
                    .var_index(var)
                    .ok_or_else(|| EvalError::UnknownVariable(var.clone()))?;
                let v = literal(value)?;
                if !scm.domain().contains(v) {
                    return Err(EvalError::ValueOutOfRange {
                        value: v,
                        card: scm.domain().cardinality(),
                    });
                }
                overrides[i] = Some(v);
            }
            let values = scm.evaluate_with(u, &overrides);
            eval_prop(scm, &values, p)
        }
        CfEvent::Not(a) => Ok(!satisfies_cf(scm, u, a)?),
        CfEvent::And(a, b) => Ok(satisfies_cf(scm, u, a)? && satisfies_cf(scm, u, b)?),
        CfEvent::Or(a, b) => Ok(satisfies_cf(scm, u, a)? || satisfies_cf(scm, u, b)?),
    }
}

struct Evaluator<'a> {
    scm: &'a Scm,
    sum_budget: usize,
    summands: usize,
}

impl Evaluator<'_> {
    fn prob(&self, event: &CfEvent) -> Result<Rational, EvalError> {
        let mut total = Rational::zero();
        for (u, p) in &self.scm.exo().support {
            if satisfies_cf(self.scm, u, event)? {
                total += p.clone();
            }
        }
        Ok(total)
    }

    fn term(&mut self, t: &Term) -> Result<EvalOutcome, EvalError> {
        use EvalOutcome::{Undefined, Value};
        match t {
            Term::Prob(e) => Ok(Value(self.prob(e)?)),
            Term::CondProb(e, cond) => {
                let joint = CfEvent::And(Box::new(e.clone()), Box::new(cond.clone()));
                let num = self.prob(&joint)?;
                let den = self.prob(cond)?;
                if den.is_zero() {
                    Ok(Undefined(UndefinedConditional {
                        condition: cond.clone(),
                    }))
                } else {
                    Ok(Value(num / den))
                }
            }
            Term::Const(r) => Ok(Value(r.clone())),
            Term::Add(a, b) => self.combine(a, b, |x, y| x + y),
            Term::Sub(a, b) => self.combine(a, b, |x, y| x - y),
            Term::Mul(a, b) => self.combine(a, b, |x, y| x * y),
            Term::Neg(a) => Ok(match self.term(a)? {
                Value(r) => Value(-r),
                u => u,
            }),
            Term::Sum(x, body) => {
                let mut acc = Rational::zero();
                for v in self.scm.domain().values() {
                    self.summands += 1;
                    if self.summands > self.sum_budget {
                        return Err(EvalError::SumBudgetExceeded {
                            budget: self.sum_budget,
                        });
                    }
                    match self.term(&body.substitute_dummy(x, v))? {
                        Value(r) => acc += r,
                        u @ Undefined(_) => return Ok(u),
                    }
                }
                Ok(Value(acc))
            }
        }
    }

    fn combine(
        &mut self,
        a: &Term,
        b: &Term,
        op: impl FnOnce(Rational, Rational) -> Rational,
    ) -> Result<EvalOutcome, EvalError> {
        let left = self.term(a)?;
        let EvalOutcome::Value(x) = left else {
            return Ok(left);
        };
        let right = self.term(b)?;
        let EvalOutcome::Value(y) = right else {
            return Ok(right);
        };
        Ok(EvalOutcome::Value(op(x, y)))
    }
}

/// Exact value of a closed term in the model.
pub fn term_value(scm: &Scm, t: &Term, opts: &EvalOptions) -> Result<EvalOutcome, EvalError> {
    Evaluator {
        scm,
        sum_budget: opts.sum_budget,
        summands: 0,
    }
    .term(t)
}

/// Three-valued truth of a closed formula in the model. Comparisons on
/// defined values are exact; a comparison touching an undefined term is
/// undefined; connectives are strong Kleene.
pub fn eval_formula(scm: &Scm, f: &Formula, opts: &EvalOptions) -> Result<Verdict, EvalError> {
    let mut ev = Evaluator {
        scm,
        sum_budget: opts.sum_budget,
        summands: 0,
    };
    eval_formula_inner(&mut ev, f)
}

fn eval_formula_inner(ev: &mut Evaluator, f: &Formula) -> Result<Verdict, EvalError> {
    match f {
        Formula::Cmp(a, op, b) => {
            let left = match ev.term(a)? {
                EvalOutcome::Value(r) => r,
                EvalOutcome::Undefined(u) => return Ok(Verdict::Undefined(u)),
            };
            let right = match ev.term(b)? {
                EvalOutcome::Value(r) => r,
                EvalOutcome::Undefined(u) => return Ok(Verdict::Undefined(u)),
            };
            use crate::lang::CmpOp::*;
            let holds = match op {
                Le => left <= right,
                Lt => left < right,
                Eq => left == right,
                Ne => left != right,
                Ge => left >= right,
                Gt => left > right,
            };
            Ok(if holds { Verdict::True } else { Verdict::False })
        }
        Formula::Not(g) => Ok(match eval_formula_inner(ev, g)? {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            u => u,
        }),
        Formula::And(a, b) => {
            let left = eval_formula_inner(ev, a)?;
            let right = eval_formula_inner(ev, b)?;
            Ok(match (left, right) {
                (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
                (Verdict::Undefined(u), _) => Verdict::Undefined(u),
                (_, Verdict::Undefined(u)) => Verdict::Undefined(u),
                _ => Verdict::True,
            })
        }
        Formula::Or(a, b) => {
            let left = eval_formula_inner(ev, a)?;
            let right = eval_formula_inner(ev, b)?;
            Ok(match (left, right) {
                (Verdict::True, _) | (_, Verdict::True) => Verdict::True,
                (Verdict::Undefined(u), _) => Verdict::Undefined(u),
                (_, Verdict::Undefined(u)) => Verdict::Undefined(u),
                _ => Verdict::False,
            })
        }
    }
}

/// Model checking against a Bayesian network: only observational formulas
/// are meaningful, and they are evaluated on the model induced by the
/// network's joint distribution.
pub fn eval_formula_bn(bn: &Bn, f: &Formula, opts: &EvalOptions) -> Result<Verdict, EvalError> {
    let layer = f.classify().layer;
    if layer != 1 {
        return Err(EvalError::InterventionalOnBn { layer });
    }
    eval_formula(&bn.joint_distribution().lift_to_scm(), f, opts)
}

/// Term evaluation against a Bayesian network, same restriction as
/// [`eval_formula_bn`].
pub fn term_value_bn(bn: &Bn, t: &Term, opts: &EvalOptions) -> Result<EvalOutcome, EvalError> {
    let layer = t.classify().layer;
    if layer != 1 {
        return Err(EvalError::InterventionalOnBn { layer });
    }
    term_value(&bn.joint_distribution().lift_to_scm(), t, opts)
}
