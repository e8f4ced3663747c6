//! Canonical text rendering. Printing then parsing returns a structurally
//! equal tree: parentheses are emitted exactly where precedence or
//! associativity would otherwise reassociate, counterfactual connectives
//! force explicit `[..](..)` around trivially intervened leaves, and a
//! negated constant is parenthesized so it does not fuse into a negative
//! literal.

use super::ast::{CfEvent, Formula, Intervention, PropEvent, Term, ValueExpr};
use crate::rational::format_rational;
use num::Signed;
use std::fmt;

fn value(v: &ValueExpr) -> String {
    match v {
        ValueExpr::Lit(n) => n.to_string(),
        ValueExpr::Dummy(d) => d.clone(),
    }
}

// event precedence: `||` 0, `&&` 1, `!` 2, primary 3

fn prop(p: &PropEvent, min_prec: u8, out: &mut String) {
    let prec = match p {
        PropEvent::Or(..) => 0,
        PropEvent::And(..) => 1,
        PropEvent::Not(..) => 2,
        PropEvent::Atom { .. } => 3,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match p {
        PropEvent::Atom { var, value: v } => {
            out.push_str(var);
            out.push('=');
            out.push_str(&value(v));
        }
        PropEvent::Not(a) => {
            out.push('!');
            prop(a, 2, out);
        }
        PropEvent::And(a, b) => {
            prop(a, 1, out);
            out.push_str(" && ");
            prop(b, 2, out);
        }
        PropEvent::Or(a, b) => {
            prop(a, 0, out);
            out.push_str(" || ");
            prop(b, 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

fn intervention(i: &Intervention, out: &mut String) {
    out.push('[');
    for (k, (var, v)) in i.0.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(var);
        out.push('=');
        out.push_str(&value(v));
    }
    out.push(']');
}

fn cf(e: &CfEvent, min_prec: u8, out: &mut String) {
    let prec = match e {
        CfEvent::Or(..) => 0,
        CfEvent::And(..) => 1,
        CfEvent::Not(..) => 2,
        CfEvent::PostInt(..) => 3,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        CfEvent::PostInt(i, p) => {
            intervention(i, out);
            out.push('(');
            prop(p, 0, out);
            out.push(')');
        }
        CfEvent::Not(a) => {
            out.push('!');
            cf(a, 2, out);
        }
        CfEvent::And(a, b) => {
            cf(a, 1, out);
            out.push_str(" && ");
            cf(b, 2, out);
        }
        CfEvent::Or(a, b) => {
            cf(a, 0, out);
            out.push_str(" || ");
            cf(b, 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Event as it appears inside `P(..)`: a trivially intervened leaf prints as
/// its bare propositional event, everything else in counterfactual form.
fn cf_top(e: &CfEvent, out: &mut String) {
    match e {
        CfEvent::PostInt(i, p) if i.is_top() => prop(p, 0, out),
        other => cf(other, 0, out),
    }
}

// term precedence: `sum` 0, `+`/`-` 1, unary `-` 2, `*` 3, leaf 4

fn term(t: &Term, min_prec: u8, out: &mut String) {
    let prec = match t {
        Term::Sum(..) => 0,
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Neg(..) => 2,
        Term::Mul(..) => 3,
        Term::Prob(..) | Term::CondProb(..) | Term::Const(..) => 4,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match t {
        Term::Prob(e) => {
            out.push_str("P(");
            cf_top(e, out);
            out.push(')');
        }
        Term::CondProb(e, c) => {
            out.push_str("P(");
            cf_top(e, out);
            out.push_str(" | ");
            cf_top(c, out);
            out.push(')');
        }
        Term::Const(r) => out.push_str(&format_rational(r)),
        Term::Add(a, b) => {
            term(a, 1, out);
            out.push_str(" + ");
            term(b, 2, out);
        }
        Term::Sub(a, b) => {
            term(a, 1, out);
            out.push_str(" - ");
            term(b, 2, out);
        }
        Term::Neg(a) => {
            out.push('-');
            // an operand that renders with a leading numeral would fuse
            // with the minus into a negative literal
            if starts_with_numeral(a) {
                out.push('(');
                term(a, 0, out);
                out.push(')');
            } else {
                term(a, 2, out);
            }
        }
        Term::Mul(a, b) => {
            term(a, 3, out);
            out.push_str(" * ");
            term(b, 4, out);
        }
        Term::Sum(x, a) => {
            out.push_str("sum ");
            out.push_str(x);
            out.push_str(" . ");
            term(a, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Does the minimal rendering of this term begin with a digit? Only
/// unparenthesized left spines matter: constants and products headed by a
/// nonnegative constant.
fn starts_with_numeral(t: &Term) -> bool {
    match t {
        Term::Const(r) => !r.is_negative(),
        Term::Mul(a, _) => starts_with_numeral(a),
        _ => false,
    }
}

// formula precedence: `OR` 0, `AND` 1, `NOT` 2, comparison 3

fn formula(f: &Formula, min_prec: u8, out: &mut String) {
    let prec = match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        Formula::Not(..) => 2,
        Formula::Cmp(..) => 3,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Cmp(a, op, b) => {
            term(a, 0, out);
            out.push(' ');
            out.push_str(op.as_str());
            out.push(' ');
            term(b, 0, out);
        }
        Formula::Not(a) => {
            out.push_str("NOT ");
            formula(a, 2, out);
        }
        Formula::And(a, b) => {
            formula(a, 1, out);
            out.push_str(" AND ");
            formula(b, 2, out);
        }
        Formula::Or(a, b) => {
            formula(a, 0, out);
            out.push_str(" OR ");
            formula(b, 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for CfEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        cf_top(self, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for PropEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        prop(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        intervention(self, &mut s);
        f.write_str(&s)
    }
}

