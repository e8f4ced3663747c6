//! SMT-LIB 2 export of satisfiability instances.
//!
//! Two encodings share the wire format but differ in unknowns. The
//! joint-table encoding (observational formulas only) introduces one real
//! unknown per full endogenous assignment — named `p_<v1>_..._<vn>` in
//! declaration order — with nonnegativity and normalization, and translates
//! the formula in negation normal form, guarding every conditional by
//! positivity of its denominator. The per-structure encoding emits one
//! problem per candidate structure over the support masses `q1..qp`,
//! separated by `(reset)`.

use super::constraints::{compile_formula, MassModel};
use super::structures::{enumerate_structures, RowEvaluator, StructureShape};
use super::{cleared_atom, ConstraintNode, SolveConfig, SolveError};
use crate::lang::{Arithmetic, CfEvent, CmpOp, Formula, PropEvent, Term, ValueExpr};
use crate::model::enumerate_tuples;
use crate::rational::Rational;
use crate::transform::expand_sums;
use num::{One, Signed};
use std::fmt::Write;

/// Which encoding to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportMode {
    /// Unknowns are the `c^n` joint-table entries; observational only.
    JointTable,
    /// One problem per candidate structure, unknowns are support masses.
    PerStructure,
}

/// Hard cap on joint-table unknowns.
const MAX_TABLE: usize = 4096;

pub fn export_smtlib(
    f: &Formula,
    cfg: &SolveConfig,
    mode: ExportMode,
) -> Result<String, SolveError> {
    match mode {
        ExportMode::JointTable => export_joint_table(f, cfg),
        ExportMode::PerStructure => export_per_structure(f, cfg),
    }
}

fn rational_smt(r: &Rational) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let core = if abs.denom().is_one() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if negative {
        format!("(- {core})")
    } else {
        core
    }
}

// ── joint-table encoding ──────────────────────────────────────────────

struct JointCtx<'a> {
    vars: &'a [String],
    assignments: Vec<Vec<u32>>,
}

impl JointCtx<'_> {
    fn unknown_name(&self, assignment: &[u32]) -> String {
        let digits: Vec<String> = assignment.iter().map(|v| v.to_string()).collect();
        format!("p_{}", digits.join("_"))
    }

    fn var_index(&self, name: &str) -> Result<usize, SolveError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| SolveError::UnknownVariable(name.to_string()))
    }

    fn prop_holds(&self, p: &PropEvent, assignment: &[u32]) -> Result<bool, SolveError> {
        match p {
            PropEvent::Atom { var, value } => {
                let i = self.var_index(var)?;
                match value {
                    ValueExpr::Lit(v) => Ok(assignment[i] == *v),
                    ValueExpr::Dummy(d) => Err(SolveError::FreeDummy(d.clone())),
                }
            }
            PropEvent::Not(a) => Ok(!self.prop_holds(a, assignment)?),
            PropEvent::And(a, b) => {
                Ok(self.prop_holds(a, assignment)? && self.prop_holds(b, assignment)?)
            }
            PropEvent::Or(a, b) => {
                Ok(self.prop_holds(a, assignment)? || self.prop_holds(b, assignment)?)
            }
        }
    }

    /// The mass of an observational event as a sum of unknowns.
    fn event_sum(&self, e: &CfEvent) -> Result<String, SolveError> {
        let CfEvent::PostInt(ints, p) = e else {
            return Err(SolveError::Config(
                "joint-table export needs observational events".into(),
            ));
        };
        if !ints.is_top() {
            return Err(SolveError::Config(
                "joint-table export needs observational events".into(),
            ));
        }
        let mut names = Vec::new();
        for a in &self.assignments {
            if self.prop_holds(p, a)? {
                names.push(self.unknown_name(a));
            }
        }
        Ok(match names.len() {
            0 => "0".to_string(),
            1 => names.pop().unwrap(),
            _ => format!("(+ {})", names.join(" ")),
        })
    }

    fn term_smt(&self, t: &Term, guards: &mut Vec<String>) -> Result<String, SolveError> {
        match t {
            Term::Prob(e) => self.event_sum(e),
            Term::CondProb(e, c) => {
                let joint = CfEvent::And(Box::new(e.clone()), Box::new(c.clone()));
                let joint = merge_observational(&joint)?;
                let num = self.event_sum(&joint)?;
                let den = self.event_sum(c)?;
                guards.push(format!("(> {den} 0)"));
                Ok(format!("(/ {num} {den})"))
            }
            Term::Const(r) => Ok(rational_smt(r)),
            Term::Add(a, b) => Ok(format!(
                "(+ {} {})",
                self.term_smt(a, guards)?,
                self.term_smt(b, guards)?
            )),
            Term::Sub(a, b) => Ok(format!(
                "(- {} {})",
                self.term_smt(a, guards)?,
                self.term_smt(b, guards)?
            )),
            Term::Neg(a) => Ok(format!("(- {})", self.term_smt(a, guards)?)),
            Term::Mul(a, b) => Ok(format!(
                "(* {} {})",
                self.term_smt(a, guards)?,
                self.term_smt(b, guards)?
            )),
            Term::Sum(x, _) => Err(SolveError::Internal(format!(
                "sum over `{x}` reached the exporter unexpanded"
            ))),
        }
    }

    /// Negation normal form with definedness guards attached per literal,
    /// so an undefined comparison satisfies neither polarity.
    fn formula_smt(&self, f: &Formula, negated: bool) -> Result<String, SolveError> {
        match f {
            Formula::Cmp(a, op, b) => {
                let eff = if negated { op.negated() } else { *op };
                let mut guards = Vec::new();
                let lhs = self.term_smt(a, &mut guards)?;
                let rhs = self.term_smt(b, &mut guards)?;
                let cmp = match eff {
                    CmpOp::Le => format!("(<= {lhs} {rhs})"),
                    CmpOp::Lt => format!("(< {lhs} {rhs})"),
                    CmpOp::Eq => format!("(= {lhs} {rhs})"),
                    CmpOp::Ne => format!("(not (= {lhs} {rhs}))"),
                    CmpOp::Ge => format!("(>= {lhs} {rhs})"),
                    CmpOp::Gt => format!("(> {lhs} {rhs})"),
                };
                guards.dedup();
                Ok(if guards.is_empty() {
                    cmp
                } else {
                    format!("(and {} {cmp})", guards.join(" "))
                })
            }
            Formula::Not(g) => self.formula_smt(g, !negated),
            Formula::And(a, b) => {
                let (x, y) = (self.formula_smt(a, negated)?, self.formula_smt(b, negated)?);
                Ok(if negated {
                    format!("(or {x} {y})")
                } else {
                    format!("(and {x} {y})")
                })
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.formula_smt(a, negated)?, self.formula_smt(b, negated)?);
                Ok(if negated {
                    format!("(and {x} {y})")
                } else {
                    format!("(or {x} {y})")
                })
            }
        }
    }
}

/// Conjunction of two trivially intervened events as one observational
/// event, so conditionals produce a single mass sum.
fn merge_observational(e: &CfEvent) -> Result<CfEvent, SolveError> {
    fn prop_of(e: &CfEvent) -> Result<PropEvent, SolveError> {
        match e {
            CfEvent::PostInt(i, p) if i.is_top() => Ok(p.clone()),
            CfEvent::Not(a) => Ok(PropEvent::Not(Box::new(prop_of(a)?))),
            CfEvent::And(a, b) => Ok(PropEvent::And(
                Box::new(prop_of(a)?),
                Box::new(prop_of(b)?),
            )),
            CfEvent::Or(a, b) => Ok(PropEvent::Or(
                Box::new(prop_of(a)?),
                Box::new(prop_of(b)?),
            )),
            CfEvent::PostInt(..) => Err(SolveError::Config(
                "joint-table export needs observational events".into(),
            )),
        }
    }
    Ok(CfEvent::observational(prop_of(e)?))
}

fn export_joint_table(f: &Formula, cfg: &SolveConfig) -> Result<String, SolveError> {
    cfg.check()?;
    let cls = f.classify();
    if cls.layer != 1 {
        return Err(SolveError::Config(format!(
            "joint-table export accepts observational formulas only, got layer {}",
            cls.layer
        )));
    }
    let expanded = expand_sums(f, cfg.domain, cfg.sum_budget)?;
    let n = cfg.vars.len();
    let c = cfg.domain.cardinality();
    let table = (c as u128).saturating_pow(n as u32);
    if table > MAX_TABLE as u128 {
        return Err(SolveError::TooLarge);
    }
    let ctx = JointCtx {
        vars: &cfg.vars,
        assignments: enumerate_tuples(&vec![c; n]),
    };
    let logic = if cls.arithmetic == Arithmetic::Poly || cls.uses_cond {
        "QF_NRA"
    } else {
        "QF_LRA"
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "; joint-table encoding over variables {} (domain 0..{})",
        cfg.vars.join(", "),
        c
    );
    let _ = writeln!(
        out,
        "; unknown p_<v1>_..._<vn> is the probability of the assignment ({} = v1, ...)",
        cfg.vars[0]
    );
    let _ = writeln!(out, "(set-logic {logic})");
    let names: Vec<String> = ctx.assignments.iter().map(|a| ctx.unknown_name(a)).collect();
    for name in &names {
        let _ = writeln!(out, "(declare-const {name} Real)");
        let _ = writeln!(out, "(assert (>= {name} 0))");
    }
    let _ = writeln!(out, "(assert (= (+ {}) 1))", names.join(" "));
    let _ = writeln!(out, "(assert {})", ctx.formula_smt(&expanded, false)?);
    let _ = writeln!(out, "(check-sat)");
    let _ = writeln!(out, "(get-model)");
    Ok(out)
}

// ── per-structure encoding ────────────────────────────────────────────

fn poly_smt(poly: &super::PolyQ) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let monomials: Vec<String> = poly
        .terms
        .iter()
        .map(|(exp, coeff)| {
            let mut factors = Vec::new();
            if !coeff.is_one() || exp.iter().all(|&e| e == 0) {
                factors.push(rational_smt(coeff));
            }
            for (i, &e) in exp.iter().enumerate() {
                for _ in 0..e {
                    factors.push(format!("q{}", i + 1));
                }
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                format!("(* {})", factors.join(" "))
            }
        })
        .collect();
    if monomials.len() == 1 {
        monomials.into_iter().next().unwrap()
    } else {
        format!("(+ {})", monomials.join(" "))
    }
}

fn node_smt(node: &ConstraintNode, negated: bool) -> String {
    match node {
        ConstraintNode::Undefined => "false".to_string(),
        ConstraintNode::Atom(atom) => {
            let eff = if negated { atom.op.negated() } else { atom.op };
            let poly = poly_smt(&atom.poly);
            match eff {
                CmpOp::Le => format!("(<= {poly} 0)"),
                CmpOp::Lt => format!("(< {poly} 0)"),
                CmpOp::Eq => format!("(= {poly} 0)"),
                CmpOp::Ne => format!("(not (= {poly} 0))"),
                CmpOp::Ge => format!("(>= {poly} 0)"),
                CmpOp::Gt => format!("(> {poly} 0)"),
            }
        }
        ConstraintNode::Not(g) => node_smt(g, !negated),
        ConstraintNode::And(a, b) => {
            let (x, y) = (node_smt(a, negated), node_smt(b, negated));
            if negated {
                format!("(or {x} {y})")
            } else {
                format!("(and {x} {y})")
            }
        }
        ConstraintNode::Or(a, b) => {
            let (x, y) = (node_smt(a, negated), node_smt(b, negated));
            if negated {
                format!("(and {x} {y})")
            } else {
                format!("(or {x} {y})")
            }
        }
    }
}

fn node_max_degree(node: &ConstraintNode) -> u32 {
    match node {
        ConstraintNode::Undefined => 0,
        ConstraintNode::Atom(atom) => atom.poly.total_degree(),
        ConstraintNode::Not(g) => node_max_degree(g),
        ConstraintNode::And(a, b) | ConstraintNode::Or(a, b) => {
            node_max_degree(a).max(node_max_degree(b))
        }
    }
}

fn export_per_structure(f: &Formula, cfg: &SolveConfig) -> Result<String, SolveError> {
    let dag = cfg.check()?;
    let shape = StructureShape::new(&cfg.vars, cfg.domain, dag.as_ref())?;
    let expanded = expand_sums(f, cfg.domain, cfg.sum_budget)?;
    let compiled = compile_formula(&expanded)?;
    let stream = enumerate_structures(cfg)?;
    if stream.truncated() {
        return Err(SolveError::TooLarge);
    }
    let p = cfg.support_bound;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "; per-structure encoding: one problem per candidate structure, unknowns q1..q{p} are support masses"
    );
    for (index, structure) in stream.enumerate() {
        if index as u64 >= cfg.limits.max_structures {
            return Err(SolveError::TooLarge);
        }
        let mut bits = Vec::with_capacity(structure.rows.len());
        for row in &structure.rows {
            let mut ev = RowEvaluator::new(&shape, row);
            bits.push(
                compiled
                    .events
                    .iter()
                    .map(|e| ev.satisfies(e))
                    .collect::<Result<Vec<bool>, SolveError>>()?,
            );
        }
        let mm = MassModel::joint(bits);
        let node = render_tree(&compiled.tree, &compiled.atoms, &mm)?;
        if index > 0 {
            let _ = writeln!(out, "(reset)");
        }
        let _ = writeln!(out, "; structure {index}");
        for (j, row) in structure.rows.iter().enumerate() {
            let desc: Vec<String> = shape
                .vars
                .iter()
                .zip(&row.responses)
                .map(|(v, table)| format!("{v}={table:?}"))
                .collect();
            let _ = writeln!(out, ";   u={j}: {}", desc.join(" "));
        }
        let logic = if node_max_degree(&node) <= 1 {
            "QF_LRA"
        } else {
            "QF_NRA"
        };
        let _ = writeln!(out, "(set-logic {logic})");
        let names: Vec<String> = (1..=p).map(|j| format!("q{j}")).collect();
        for name in &names {
            let _ = writeln!(out, "(declare-const {name} Real)");
            let _ = writeln!(out, "(assert (> {name} 0))");
        }
        if p == 1 {
            let _ = writeln!(out, "(assert (= {} 1))", names[0]);
        } else {
            let _ = writeln!(out, "(assert (= (+ {}) 1))", names.join(" "));
        }
        let _ = writeln!(out, "(assert {})", node_smt(&node, false));
        let _ = writeln!(out, "(check-sat)");
    }
    Ok(out)
}

fn render_tree(
    node: &super::constraints::Node,
    templates: &[super::constraints::AtomTemplate],
    mm: &MassModel,
) -> Result<ConstraintNode, SolveError> {
    use super::constraints::Node;
    match node {
        Node::Atom(i, op) => cleared_atom(&templates[*i], *op, mm),
        Node::Not(g) => Ok(ConstraintNode::Not(Box::new(render_tree(
            g, templates, mm,
        )?))),
        Node::And(a, b) => Ok(ConstraintNode::And(
            Box::new(render_tree(a, templates, mm)?),
            Box::new(render_tree(b, templates, mm)?),
        )),
        Node::Or(a, b) => Ok(ConstraintNode::Or(
            Box::new(render_tree(a, templates, mm)?),
            Box::new(render_tree(b, templates, mm)?),
        )),
    }
}
