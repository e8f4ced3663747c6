//! Independent evaluators used as acceptance oracles.
//!
//! `full_enumeration` walks the complete exogenous domain (not the sparse
//! support), resolves endogenous values by demand-driven recursion, and
//! binds dummies through an environment — a different code path from the
//! library evaluator on every axis. `tables` evaluates observational
//! formulas directly on joint tables with no model machinery at all.

use num::Zero;
use pchsat_core::lang::{CfEvent, CmpOp, Formula, PropEvent, Term, ValueExpr};
use pchsat_core::model::JointTable;
use pchsat_core::rational::Rational;
use pchsat_core::Scm;
use std::collections::BTreeMap;

pub mod full_enumeration {
    use super::*;

    type Env = BTreeMap<String, u32>;

    fn value(v: &ValueExpr, env: &Env) -> u32 {
        match v {
            ValueExpr::Lit(n) => *n,
            ValueExpr::Dummy(d) => env[d],
        }
    }

    fn resolve(
        scm: &Scm,
        i: usize,
        u: &[u32],
        overrides: &BTreeMap<usize, u32>,
        memo: &mut BTreeMap<usize, u32>,
    ) -> u32 {
        if let Some(&v) = overrides.get(&i) {
            return v;
        }
        if let Some(&v) = memo.get(&i) {
            return v;
        }
        let mech = &scm.mechanisms()[i];
        let mut index = 0usize;
        for parent in &mech.parents {
            let pi = scm.var_index(parent).unwrap();
            let pv = resolve(scm, pi, u, overrides, memo);
            index = index * scm.domain().cardinality() as usize + pv as usize;
        }
        for exo in &mech.exo_args {
            let ei = scm.exo().index_of(exo).unwrap();
            let card = scm.exo().vars[ei].card as usize;
            index = index * card + u[ei] as usize;
        }
        let v = mech.table[index];
        memo.insert(i, v);
        v
    }

    fn holds_prop(scm: &Scm, p: &PropEvent, values: &BTreeMap<usize, u32>, env: &Env) -> bool {
        match p {
            PropEvent::Atom { var, value: v } => {
                values[&scm.var_index(var).unwrap()] == value(v, env)
            }
            PropEvent::Not(a) => !holds_prop(scm, a, values, env),
            PropEvent::And(a, b) => {
                holds_prop(scm, a, values, env) && holds_prop(scm, b, values, env)
            }
            PropEvent::Or(a, b) => {
                holds_prop(scm, a, values, env) || holds_prop(scm, b, values, env)
            }
        }
    }

    fn holds_cf(scm: &Scm, e: &CfEvent, u: &[u32], env: &Env) -> bool {
        match e {
            CfEvent::PostInt(ints, p) => {
                let overrides: BTreeMap<usize, u32> = ints
                    .0
                    .iter()
                    .map(|(var, v)| (scm.var_index(var).unwrap(), value(v, env)))
                    .collect();
                let mut memo = BTreeMap::new();
                let values: BTreeMap<usize, u32> = (0..scm.vars().len())
                    .map(|i| (i, resolve(scm, i, u, &overrides, &mut memo)))
                    .collect();
                holds_prop(scm, p, &values, env)
            }
            CfEvent::Not(a) => !holds_cf(scm, a, u, env),
            CfEvent::And(a, b) => holds_cf(scm, a, u, env) && holds_cf(scm, b, u, env),
            CfEvent::Or(a, b) => holds_cf(scm, a, u, env) || holds_cf(scm, b, u, env),
        }
    }

    fn full_domain(scm: &Scm) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for v in &scm.exo().vars {
            let mut next = Vec::with_capacity(out.len() * v.card as usize);
            for prefix in &out {
                for value in 0..v.card {
                    let mut tuple = prefix.clone();
                    tuple.push(value);
                    next.push(tuple);
                }
            }
            out = next;
        }
        out
    }

    fn prob(scm: &Scm, e: &CfEvent, env: &Env) -> Rational {
        let mut total = Rational::zero();
        for u in full_domain(scm) {
            let mass = scm.exo().prob(&u);
            if !mass.is_zero() && holds_cf(scm, e, &u, env) {
                total += mass;
            }
        }
        total
    }

    /// `None` means undefined.
    pub fn term_value(scm: &Scm, t: &Term, env: &mut Env) -> Option<Rational> {
        match t {
            Term::Prob(e) => Some(prob(scm, e, env)),
            Term::CondProb(e, c) => {
                let den = prob(scm, c, env);
                if den.is_zero() {
                    return None;
                }
                let joint = CfEvent::And(Box::new(e.clone()), Box::new(c.clone()));
                Some(prob(scm, &joint, env) / den)
            }
            Term::Const(r) => Some(r.clone()),
            Term::Add(a, b) => Some(term_value(scm, a, env)? + term_value(scm, b, env)?),
            Term::Sub(a, b) => Some(term_value(scm, a, env)? - term_value(scm, b, env)?),
            Term::Neg(a) => Some(-term_value(scm, a, env)?),
            Term::Mul(a, b) => Some(term_value(scm, a, env)? * term_value(scm, b, env)?),
            Term::Sum(x, body) => {
                let mut total = Rational::zero();
                for v in 0..scm.domain().cardinality() {
                    env.insert(x.clone(), v);
                    let summand = term_value(scm, body, env);
                    env.remove(x);
                    total += summand?;
                }
                Some(total)
            }
        }
    }
}

pub mod tables {
    use super::*;

    fn prop_holds(p: &PropEvent, vars: &[String], a: &[u32]) -> bool {
        match p {
            PropEvent::Atom { var, value } => {
                let i = vars.iter().position(|v| v == var).unwrap();
                match value {
                    ValueExpr::Lit(v) => a[i] == *v,
                    ValueExpr::Dummy(_) => panic!("open event"),
                }
            }
            PropEvent::Not(x) => !prop_holds(x, vars, a),
            PropEvent::And(x, y) => prop_holds(x, vars, a) && prop_holds(y, vars, a),
            PropEvent::Or(x, y) => prop_holds(x, vars, a) || prop_holds(y, vars, a),
        }
    }

    fn term_value(t: &Term, jt: &JointTable) -> Rational {
        match t {
            Term::Prob(e) => {
                let CfEvent::PostInt(i, p) = e else {
                    panic!("observational formulas only")
                };
                assert!(i.is_top());
                jt.entries()
                    .filter(|(a, _)| prop_holds(p, jt.vars(), a))
                    .map(|(_, q)| q.clone())
                    .sum()
            }
            Term::Const(r) => r.clone(),
            Term::Add(a, b) => term_value(a, jt) + term_value(b, jt),
            Term::Sub(a, b) => term_value(a, jt) - term_value(b, jt),
            Term::Neg(a) => -term_value(a, jt),
            Term::Mul(a, b) => term_value(a, jt) * term_value(b, jt),
            Term::CondProb(..) | Term::Sum(..) => panic!("oracle corpus is plain"),
        }
    }

    pub fn holds(f: &Formula, jt: &JointTable) -> bool {
        match f {
            Formula::Cmp(a, op, b) => {
                let (l, r) = (term_value(a, jt), term_value(b, jt));
                match op {
                    CmpOp::Le => l <= r,
                    CmpOp::Lt => l < r,
                    CmpOp::Eq => l == r,
                    CmpOp::Ne => l != r,
                    CmpOp::Ge => l >= r,
                    CmpOp::Gt => l > r,
                }
            }
            Formula::Not(g) => !holds(g, jt),
            Formula::And(a, b) => holds(a, jt) && holds(b, jt),
            Formula::Or(a, b) => holds(a, jt) || holds(b, jt),
        }
    }
}
