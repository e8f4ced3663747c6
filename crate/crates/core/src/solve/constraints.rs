//! From formulas to constraints over support masses.
//!
//! With the structure (response rows) fixed, each probability leaf becomes a
//! mass expression over the unknown support probabilities: a plain sum of
//! unknowns for a joint support, a sum of product monomials for product-form
//! support. Comparisons compile to polynomial atoms by clearing the (always
//! positive) conditional denominators; the Boolean skeleton is explored as a
//! lazy disjunction of conjunctive branches. Every unknown is strictly
//! positive, so definedness of conditionals and the sign of pure mass
//! expressions are decided statically from support index sets alone.

use super::poly::{PolyAtom, PolyQ};
use super::simplex::{LinConstraint, LinOp};
use super::SolveError;
use crate::lang::{CfEvent, CmpOp, Formula, Term};
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A formula lowered onto interned events: atoms reference events by index,
/// the Boolean skeleton references atoms by index.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    pub events: Vec<CfEvent>,
    pub atoms: Vec<AtomTemplate>,
    pub tree: Node,
}

/// One comparison, sides as expression trees over event masses.
#[derive(Debug, Clone)]
pub struct AtomTemplate {
    pub lhs: MassExpr,
    pub rhs: MassExpr,
}

/// Term shape with probability leaves replaced by event indices.
#[derive(Debug, Clone)]
pub enum MassExpr {
    Prob(usize),
    /// Conditional probability: joint event index, condition event index.
    Cond(usize, usize),
    Const(Rational),
    Add(Box<MassExpr>, Box<MassExpr>),
    Sub(Box<MassExpr>, Box<MassExpr>),
    Neg(Box<MassExpr>),
    Mul(Box<MassExpr>, Box<MassExpr>),
}

#[derive(Debug, Clone)]
pub enum Node {
    Atom(usize, CmpOp),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

/// Lower a sum-free formula: intern every event needed by its probability
/// leaves (conditionals also need the conjunction of their two events).
pub fn compile_formula(f: &Formula) -> Result<CompiledFormula, SolveError> {
    let mut interner = EventInterner::default();
    let mut atoms = Vec::new();
    let tree = lower_formula(f, &mut interner, &mut atoms)?;
    Ok(CompiledFormula {
        events: interner.events,
        atoms,
        tree,
    })
}

#[derive(Default)]
struct EventInterner {
    events: Vec<CfEvent>,
    index: BTreeMap<CfEvent, usize>,
}

impl EventInterner {
    fn intern(&mut self, e: &CfEvent) -> usize {
        if let Some(&i) = self.index.get(e) {
            return i;
        }
        let i = self.events.len();
        self.events.push(e.clone());
        self.index.insert(e.clone(), i);
        i
    }
}

fn lower_formula(
    f: &Formula,
    interner: &mut EventInterner,
    atoms: &mut Vec<AtomTemplate>,
) -> Result<Node, SolveError> {
    match f {
        Formula::Cmp(a, op, b) => {
            let lhs = lower_term(a, interner)?;
            let rhs = lower_term(b, interner)?;
            atoms.push(AtomTemplate { lhs, rhs });
            Ok(Node::Atom(atoms.len() - 1, *op))
        }
        Formula::Not(g) => Ok(Node::Not(Box::new(lower_formula(g, interner, atoms)?))),
        Formula::And(a, b) => Ok(Node::And(
            Box::new(lower_formula(a, interner, atoms)?),
            Box::new(lower_formula(b, interner, atoms)?),
        )),
        Formula::Or(a, b) => Ok(Node::Or(
            Box::new(lower_formula(a, interner, atoms)?),
            Box::new(lower_formula(b, interner, atoms)?),
        )),
    }
}

fn lower_term(t: &Term, interner: &mut EventInterner) -> Result<MassExpr, SolveError> {
    match t {
        Term::Prob(e) => Ok(MassExpr::Prob(interner.intern(e))),
        Term::CondProb(e, c) => {
            let joint = CfEvent::And(Box::new(e.clone()), Box::new(c.clone()));
            Ok(MassExpr::Cond(interner.intern(&joint), interner.intern(c)))
        }
        Term::Const(r) => Ok(MassExpr::Const(r.clone())),
        Term::Add(a, b) => Ok(MassExpr::Add(
            Box::new(lower_term(a, interner)?),
            Box::new(lower_term(b, interner)?),
        )),
        Term::Sub(a, b) => Ok(MassExpr::Sub(
            Box::new(lower_term(a, interner)?),
            Box::new(lower_term(b, interner)?),
        )),
        Term::Neg(a) => Ok(MassExpr::Neg(Box::new(lower_term(a, interner)?))),
        Term::Mul(a, b) => Ok(MassExpr::Mul(
            Box::new(lower_term(a, interner)?),
            Box::new(lower_term(b, interner)?),
        )),
        Term::Sum(x, _) => Err(SolveError::Internal(format!(
            "sum over `{x}` reached the constraint compiler unexpanded"
        ))),
    }
}

/// All conjunctive branches of the skeleton in negation normal form, `!=`
/// literals split into `<` and `>`. `None` once more than `cap` branches
/// would be produced.
pub fn branches(tree: &Node, cap: usize) -> Option<Vec<Vec<(usize, CmpOp)>>> {
    fn go(node: &Node, negated: bool, cap: usize) -> Option<Vec<Vec<(usize, CmpOp)>>> {
        match node {
            Node::Atom(a, op) => {
                let eff = if negated { op.negated() } else { *op };
                let v = match eff {
                    CmpOp::Ne => vec![vec![(*a, CmpOp::Lt)], vec![(*a, CmpOp::Gt)]],
                    other => vec![vec![(*a, other)]],
                };
                (v.len() <= cap).then_some(v)
            }
            Node::Not(g) => go(g, !negated, cap),
            Node::And(x, y) | Node::Or(x, y) => {
                let conjunctive = matches!(node, Node::And(..)) != negated;
                let left = go(x, negated, cap)?;
                let right = go(y, negated, cap)?;
                if conjunctive {
                    let total = left.len().checked_mul(right.len())?;
                    if total > cap {
                        return None;
                    }
                    let mut out = Vec::with_capacity(total);
                    for l in &left {
                        for r in &right {
                            let mut branch = l.clone();
                            branch.extend(r.iter().cloned());
                            out.push(branch);
                        }
                    }
                    Some(out)
                } else {
                    if left.len() + right.len() > cap {
                        return None;
                    }
                    let mut out = left;
                    out.extend(right);
                    Some(out)
                }
            }
        }
    }
    go(tree, false, cap)
}

// ── mass models ───────────────────────────────────────────────────────

/// How support masses attach to the unknowns.
///
/// Each "unit" is one support point of the candidate model; its mass is the
/// product of the listed unknowns (a single unknown for joint support). All
/// unknowns are strictly positive and each group sums to one.
#[derive(Debug, Clone)]
pub struct MassModel {
    pub num_vars: usize,
    pub groups: Vec<Vec<usize>>,
    pub unit_vars: Vec<Vec<usize>>,
    /// Per unit, satisfaction of each interned event.
    pub unit_bits: Vec<Vec<bool>>,
}

impl MassModel {
    /// Joint support over `k` unknowns with the given per-row event bits.
    pub fn joint(bits: Vec<Vec<bool>>) -> MassModel {
        let k = bits.len();
        MassModel {
            num_vars: k,
            groups: vec![(0..k).collect()],
            unit_vars: (0..k).map(|j| vec![j]).collect(),
            unit_bits: bits,
        }
    }

    fn satisfying_units(&self, event: usize) -> impl Iterator<Item = usize> + '_ {
        self.unit_bits
            .iter()
            .enumerate()
            .filter(move |(_, bits)| bits[event])
            .map(|(u, _)| u)
    }

    /// No unit satisfies the event, so its mass is identically zero.
    pub fn event_empty(&self, event: usize) -> bool {
        self.satisfying_units(event).next().is_none()
    }

    /// The event's mass as a polynomial in the unknowns.
    pub fn event_poly(&self, event: usize) -> PolyQ {
        let mut p = PolyQ::zero(self.num_vars);
        for u in self.satisfying_units(event) {
            p = p.add(&PolyQ::monomial(self.num_vars, &self.unit_vars[u]));
        }
        p
    }

    /// Mass degree of one unit: 1 for joint support, the block count for
    /// product-form support.
    pub fn unit_degree(&self) -> u32 {
        self.unit_vars.iter().map(|v| v.len() as u32).max().unwrap_or(1)
    }

    /// Every event's mass at a concrete point.
    pub fn masses_at(&self, point: &[Rational], num_events: usize) -> Vec<Rational> {
        let mut masses = vec![Rational::zero(); num_events];
        for (u, bits) in self.unit_bits.iter().enumerate() {
            let weight: Rational = self.unit_vars[u]
                .iter()
                .map(|&i| point[i].clone())
                .product();
            for (e, mass) in masses.iter_mut().enumerate() {
                if bits[e] {
                    *mass += weight.clone();
                }
            }
        }
        masses
    }
}

// ── atom instantiation ────────────────────────────────────────────────

/// An atom with the structure fixed.
#[derive(Debug, Clone)]
pub enum InstAtom {
    /// Truth value decided from support index sets alone.
    Decided(bool),
    /// Some conditional's condition has empty support: undefined for every
    /// admissible assignment of the unknowns.
    Undefined,
    /// Affine comparison against zero, ready for the exact LP.
    Affine {
        coeffs: Vec<Rational>,
        constant: Rational,
        op: CmpOp,
    },
    /// Polynomial comparison against zero.
    Poly(PolyAtom),
    /// Too large to expand; evaluated pointwise from the template instead.
    Opaque,
}

/// Cap on expanded polynomial size before an atom goes opaque.
const MAX_POLY_TERMS: usize = 4000;
const MAX_POLY_DEGREE: u32 = 24;

/// Per-atom facts that do not depend on the structure: which events gate
/// definedness, and how many mass factors the cleared comparison multiplies
/// together (its degree per unit of mass degree). Computed once per formula
/// so each candidate structure pays only index-set checks before committing
/// to polynomial expansion.
#[derive(Debug, Clone)]
pub struct TemplateMeta {
    pub cond_events: Vec<usize>,
    pub cross_units: u32,
}

pub fn template_meta(t: &AtomTemplate) -> TemplateMeta {
    let mut cond_events = Vec::new();
    let (nl, dl) = units(&t.lhs, &mut cond_events);
    let (nr, dr) = units(&t.rhs, &mut cond_events);
    cond_events.sort_unstable();
    cond_events.dedup();
    TemplateMeta {
        cond_events,
        cross_units: (nl + dr).max(nr + dl),
    }
}

/// Mass-degree of numerator and denominator, counting each probability
/// leaf as one unit. Exact for the cleared form without cancellation.
fn units(expr: &MassExpr, conds: &mut Vec<usize>) -> (u32, u32) {
    match expr {
        MassExpr::Prob(_) => (1, 0),
        MassExpr::Cond(_, c) => {
            conds.push(*c);
            (1, 1)
        }
        MassExpr::Const(_) => (0, 0),
        MassExpr::Neg(a) => units(a, conds),
        MassExpr::Add(a, b) | MassExpr::Sub(a, b) => {
            let (na, da) = units(a, conds);
            let (nb, db) = units(b, conds);
            ((na + db).max(nb + da), da + db)
        }
        MassExpr::Mul(a, b) => {
            let (na, da) = units(a, conds);
            let (nb, db) = units(b, conds);
            (na + nb, da + db)
        }
    }
}

pub(crate) enum Frac {
    Ok { num: PolyQ, den: PolyQ },
    Undefined,
    Oversize,
}

pub(crate) fn frac_of(expr: &MassExpr, mm: &MassModel) -> Frac {
    let one = || PolyQ::constant(mm.num_vars, Rational::one());
    match expr {
        MassExpr::Prob(e) => Frac::Ok {
            num: mm.event_poly(*e),
            den: one(),
        },
        MassExpr::Cond(joint, cond) => {
            if mm.event_empty(*cond) {
                return Frac::Undefined;
            }
            Frac::Ok {
                num: mm.event_poly(*joint),
                den: mm.event_poly(*cond),
            }
        }
        MassExpr::Const(r) => Frac::Ok {
            num: PolyQ::constant(mm.num_vars, r.clone()),
            den: one(),
        },
        MassExpr::Neg(a) => match frac_of(a, mm) {
            Frac::Ok { num, den } => Frac::Ok {
                num: num.neg(),
                den,
            },
            other => other,
        },
        MassExpr::Add(a, b) | MassExpr::Sub(a, b) => {
            let (fa, fb) = (frac_of(a, mm), frac_of(b, mm));
            let (Frac::Ok { num: na, den: da }, Frac::Ok { num: nb, den: db }) = (&fa, &fb) else {
                return undefined_or_oversize(fa, fb);
            };
            let nb = if matches!(expr, MassExpr::Sub(..)) {
                nb.neg()
            } else {
                nb.clone()
            };
            let Some(left) = mul(na, db) else {
                return Frac::Oversize;
            };
            let Some(right) = mul(&nb, da) else {
                return Frac::Oversize;
            };
            let Some(den) = mul(da, db) else {
                return Frac::Oversize;
            };
            Frac::Ok {
                num: left.add(&right),
                den,
            }
        }
        MassExpr::Mul(a, b) => {
            let (fa, fb) = (frac_of(a, mm), frac_of(b, mm));
            let (Frac::Ok { num: na, den: da }, Frac::Ok { num: nb, den: db }) = (&fa, &fb) else {
                return undefined_or_oversize(fa, fb);
            };
            let (Some(num), Some(den)) = (mul(na, nb), mul(da, db)) else {
                return Frac::Oversize;
            };
            Frac::Ok { num, den }
        }
    }
}

fn undefined_or_oversize(a: Frac, b: Frac) -> Frac {
    if matches!(a, Frac::Undefined) || matches!(b, Frac::Undefined) {
        Frac::Undefined
    } else {
        Frac::Oversize
    }
}

fn mul(a: &PolyQ, b: &PolyQ) -> Option<PolyQ> {
    if a.is_one() {
        return Some(b.clone());
    }
    if b.is_one() {
        return Some(a.clone());
    }
    let out = a.mul_capped(b, MAX_POLY_TERMS)?;
    (out.total_degree() <= MAX_POLY_DEGREE).then_some(out)
}

/// Truth decided by coefficient signs: with all unknowns strictly positive,
/// an all-nonnegative polynomial is nonnegative, and strictly positive iff
/// it has any term at all; mirrored for all-nonpositive.
fn static_decide(poly: &PolyQ, op: CmpOp) -> Option<bool> {
    let all_nonneg = poly.terms.values().all(|c| c.is_positive());
    let all_nonpos = poly.terms.values().all(|c| c.is_negative());
    let empty = poly.is_zero();
    if empty {
        return Some(matches!(op, CmpOp::Le | CmpOp::Eq | CmpOp::Ge));
    }
    if all_nonneg {
        // value > 0 everywhere on the open domain
        return Some(matches!(op, CmpOp::Gt | CmpOp::Ge | CmpOp::Ne));
    }
    if all_nonpos {
        return Some(matches!(op, CmpOp::Lt | CmpOp::Le | CmpOp::Ne));
    }
    None
}

/// Instantiate one literal of a branch against a mass model. Definedness is
/// decided first from the condition support sets; atoms whose cleared form
/// would be too large stay opaque without any polynomial work.
pub fn instantiate(
    template: &AtomTemplate,
    meta: &TemplateMeta,
    op: CmpOp,
    mm: &MassModel,
) -> InstAtom {
    if meta.cond_events.iter().any(|&e| mm.event_empty(e)) {
        return InstAtom::Undefined;
    }
    if meta.cross_units.saturating_mul(mm.unit_degree()) > MAX_POLY_DEGREE {
        return InstAtom::Opaque;
    }
    let (lhs, rhs) = (frac_of(&template.lhs, mm), frac_of(&template.rhs, mm));
    let (
        Frac::Ok { num: nl, den: dl },
        Frac::Ok { num: nr, den: dr },
    ) = (&lhs, &rhs)
    else {
        return match undefined_or_oversize(lhs, rhs) {
            Frac::Undefined => InstAtom::Undefined,
            _ => InstAtom::Opaque,
        };
    };
    // clear the positive denominators: nl/dl op nr/dr  ⇔  nl·dr − nr·dl op 0
    let (Some(left), Some(right)) = (mul(nl, dr), mul(nr, dl)) else {
        return InstAtom::Opaque;
    };
    let diff = left.sub(&right);
    if let Some(truth) = static_decide(&diff, op) {
        return InstAtom::Decided(truth);
    }
    match diff.as_affine() {
        Some((coeffs, constant)) => InstAtom::Affine {
            coeffs,
            constant,
            op,
        },
        None => InstAtom::Poly(PolyAtom { poly: diff, op }),
    }
}

/// Value of a mass expression at a point, given precomputed event masses;
/// `None` when a conditional hits a zero denominator there.
pub fn expr_value_at(expr: &MassExpr, masses: &[Rational]) -> Option<Rational> {
    match expr {
        MassExpr::Prob(e) => Some(masses[*e].clone()),
        MassExpr::Cond(joint, cond) => {
            if masses[*cond].is_zero() {
                None
            } else {
                Some(masses[*joint].clone() / masses[*cond].clone())
            }
        }
        MassExpr::Const(r) => Some(r.clone()),
        MassExpr::Add(a, b) => Some(expr_value_at(a, masses)? + expr_value_at(b, masses)?),
        MassExpr::Sub(a, b) => Some(expr_value_at(a, masses)? - expr_value_at(b, masses)?),
        MassExpr::Neg(a) => Some(-expr_value_at(a, masses)?),
        MassExpr::Mul(a, b) => Some(expr_value_at(a, masses)? * expr_value_at(b, masses)?),
    }
}

/// Exact check of one literal at a point.
pub fn literal_holds_at(
    template: &AtomTemplate,
    op: CmpOp,
    masses: &[Rational],
) -> bool {
    let (Some(l), Some(r)) = (
        expr_value_at(&template.lhs, masses),
        expr_value_at(&template.rhs, masses),
    ) else {
        return false;
    };
    match op {
        CmpOp::Le => l <= r,
        CmpOp::Lt => l < r,
        CmpOp::Eq => l == r,
        CmpOp::Ne => l != r,
        CmpOp::Ge => l >= r,
        CmpOp::Gt => l > r,
    }
}

/// Violation magnitude of one literal at a point, zero iff it holds;
/// undefined conditionals and strict boundaries get a unit penalty.
pub fn literal_violation_at(
    template: &AtomTemplate,
    op: CmpOp,
    masses: &[Rational],
) -> Rational {
    let (Some(l), Some(r)) = (
        expr_value_at(&template.lhs, masses),
        expr_value_at(&template.rhs, masses),
    ) else {
        return Rational::one();
    };
    let v = l - r;
    match op {
        CmpOp::Le => v.max(Rational::zero()),
        CmpOp::Ge => (-v).max(Rational::zero()),
        CmpOp::Eq => v.abs(),
        CmpOp::Lt => {
            if v.is_negative() {
                Rational::zero()
            } else {
                v + Rational::one()
            }
        }
        CmpOp::Gt => {
            if v.is_positive() {
                Rational::zero()
            } else {
                -v + Rational::one()
            }
        }
        CmpOp::Ne => {
            if v.is_zero() {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    }
}

/// Normalization and positivity of the unknowns as LP rows: each group sums
/// to one, every unknown strictly positive.
pub fn simplex_constraints(mm: &MassModel) -> Vec<LinConstraint> {
    let mut out = Vec::new();
    for group in &mm.groups {
        let mut ones = vec![Rational::zero(); mm.num_vars];
        for &i in group {
            ones[i] = Rational::one();
        }
        out.push(LinConstraint::new(ones, LinOp::Eq, Rational::one()));
    }
    for i in 0..mm.num_vars {
        let mut neg = vec![Rational::zero(); mm.num_vars];
        neg[i] = -Rational::one();
        out.push(LinConstraint::new(neg, LinOp::Lt, Rational::zero()));
    }
    out
}

/// Affine atom as an LP row: `coeffs·q + constant op 0`.
pub fn affine_to_constraint(
    coeffs: &[Rational],
    constant: &Rational,
    op: CmpOp,
) -> Option<LinConstraint> {
    let rhs = -constant.clone();
    match op {
        CmpOp::Le => Some(LinConstraint::new(coeffs.to_vec(), LinOp::Le, rhs)),
        CmpOp::Lt => Some(LinConstraint::new(coeffs.to_vec(), LinOp::Lt, rhs)),
        CmpOp::Eq => Some(LinConstraint::new(coeffs.to_vec(), LinOp::Eq, rhs)),
        CmpOp::Ge => Some(LinConstraint::new(
            coeffs.iter().map(|c| -c.clone()).collect(),
            LinOp::Le,
            -rhs,
        )),
        CmpOp::Gt => Some(LinConstraint::new(
            coeffs.iter().map(|c| -c.clone()).collect(),
            LinOp::Lt,
            -rhs,
        )),
        CmpOp::Ne => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, LangContext};
    use crate::model::Domain;
    use crate::rational::ratio;

    fn compiled(text: &str) -> CompiledFormula {
        let ctx = LangContext::new(vec!["X".into(), "Y".into()], Domain::binary()).unwrap();
        compile_formula(&parse_formula(text, &ctx).unwrap()).unwrap()
    }

    #[test]
    fn events_are_interned_once() {
        let c = compiled("P(X=1) = 1/2 AND P(X=1) > 0");
        assert_eq!(c.events.len(), 1);
        assert_eq!(c.atoms.len(), 2);
    }

    #[test]
    fn conditionals_intern_joint_and_condition() {
        let c = compiled("P(X=1 | Y=0) = 1/2");
        assert_eq!(c.events.len(), 2);
    }

    #[test]
    fn branch_split_of_disequality() {
        let c = compiled("NOT (P(X=1) = 1/2 AND P(Y=1) <= 1/4)");
        // ¬(a=b ∧ c≤d) → a<b | a>b | c>d
        let bs = branches(&c.tree, 100).unwrap();
        assert_eq!(bs.len(), 3);
    }

    #[test]
    fn static_decisions_from_support_sets() {
        let c = compiled("P(X=1) > 0 AND P(Y=1) = 0");
        // two rows: row 0 satisfies X=1 only, row 1 satisfies neither
        let mm = MassModel::joint(vec![vec![true, false], vec![false, false]]);
        match instantiate(&c.atoms[0], &template_meta(&c.atoms[0]), CmpOp::Gt, &mm) {
            InstAtom::Decided(true) => {}
            other => panic!("expected decided true, got {other:?}"),
        }
        match instantiate(&c.atoms[1], &template_meta(&c.atoms[1]), CmpOp::Eq, &mm) {
            InstAtom::Decided(true) => {}
            other => panic!("expected decided true, got {other:?}"),
        }
        // a row satisfying Y=1 flips the equality to undecidable-from-signs
        let mm = MassModel::joint(vec![vec![true, true]]);
        match instantiate(&c.atoms[1], &template_meta(&c.atoms[1]), CmpOp::Eq, &mm) {
            InstAtom::Decided(false) => {}
            other => panic!("expected decided false, got {other:?}"),
        }
    }

    #[test]
    fn affine_instantiation_against_constants() {
        let c = compiled("P(X=1) = 1/2");
        let mm = MassModel::joint(vec![vec![true], vec![false]]);
        match instantiate(&c.atoms[0], &template_meta(&c.atoms[0]), CmpOp::Eq, &mm) {
            InstAtom::Affine {
                coeffs,
                constant,
                op: CmpOp::Eq,
            } => {
                assert_eq!(coeffs, vec![ratio(1, 1), ratio(0, 1)]);
                assert_eq!(constant, ratio(-1, 2));
            }
            other => panic!("expected affine, got {other:?}"),
        }
    }

    #[test]
    fn undefined_conditional_is_static() {
        let c = compiled("P(X=1 | Y=1) = 1");
        // no row satisfies Y=1
        let mm = MassModel::joint(vec![vec![false, false], vec![false, false]]);
        assert!(matches!(
            instantiate(&c.atoms[0], &template_meta(&c.atoms[0]), CmpOp::Eq, &mm),
            InstAtom::Undefined
        ));
    }

    #[test]
    fn products_become_polynomial_atoms() {
        let c = compiled("P(X=1) * P(Y=1) = 1/4");
        let mm = MassModel::joint(vec![vec![true, false], vec![false, true]]);
        match instantiate(&c.atoms[0], &template_meta(&c.atoms[0]), CmpOp::Eq, &mm) {
            InstAtom::Poly(atom) => {
                assert_eq!(atom.poly.total_degree(), 2);
                // q0·q1 = 1/4 at (1/2, 1/2)
                assert!(atom.holds_at(&[ratio(1, 2), ratio(1, 2)]));
                assert!(!atom.holds_at(&[ratio(1, 3), ratio(2, 3)]));
            }
            other => panic!("expected poly, got {other:?}"),
        }
    }

    #[test]
    fn pointwise_evaluation_matches_cleared_form() {
        let c = compiled("P(X=1 | Y=0) = 1/2");
        let mm = MassModel::joint(vec![
            vec![true, true],   // X=1&&Y=0, Y=0
            vec![false, true],  // Y=0 only
            vec![false, false], // neither
        ]);
        let point = [ratio(1, 4), ratio(1, 4), ratio(1, 2)];
        let masses = mm.masses_at(&point, c.events.len());
        assert!(literal_holds_at(&c.atoms[0], CmpOp::Eq, &masses));
        let point = [ratio(1, 2), ratio(1, 4), ratio(1, 4)];
        let masses = mm.masses_at(&point, c.events.len());
        assert!(!literal_holds_at(&c.atoms[0], CmpOp::Eq, &masses));
    }
}
