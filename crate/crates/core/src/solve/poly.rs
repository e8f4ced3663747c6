//! Multivariate polynomials over the support probabilities, and a naive
//! feasibility search for polynomial residuals.
//!
//! The search samples simplex grids of increasing resolution, refines around
//! the least-violated point by moving mass between coordinates, and verifies
//! every candidate exactly before returning it. It can only ever answer
//! "here is a solution" or "unknown" — deciding polynomial infeasibility is
//! out of its scope by design.

use super::simplex::{linear_feasibility, LinConstraint, LinOp, LinearSystem, LpOutcome};
use crate::lang::CmpOp;
use crate::rational::Rational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A polynomial over `num_vars` unknowns: exponent vector → coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyQ {
    pub num_vars: usize,
    pub terms: BTreeMap<Vec<u8>, Rational>,
}

impl PolyQ {
    pub fn zero(num_vars: usize) -> Self {
        PolyQ {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, r: Rational) -> Self {
        let mut p = PolyQ::zero(num_vars);
        if !r.is_zero() {
            p.terms.insert(vec![0; num_vars], r);
        }
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut exp = vec![0u8; num_vars];
        exp[i] = 1;
        let mut p = PolyQ::zero(num_vars);
        p.terms.insert(exp, Rational::one());
        p
    }

    /// Sum of distinct variables, the shape of every probability leaf.
    pub fn sum_of_vars(num_vars: usize, indices: &[usize]) -> Self {
        let mut p = PolyQ::zero(num_vars);
        for &i in indices {
            let mut exp = vec![0u8; num_vars];
            exp[i] = 1;
            p.terms.insert(exp, Rational::one());
        }
        p
    }

    fn insert(&mut self, exp: Vec<u8>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &PolyQ) -> PolyQ {
        let mut out = self.clone();
        for (exp, coeff) in &other.terms {
            out.insert(exp.clone(), coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> PolyQ {
        PolyQ {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyQ) -> PolyQ {
        self.add(&other.neg())
    }

    /// Product, or `None` once the result would exceed `max_terms` monomials.
    pub fn mul_capped(&self, other: &PolyQ, max_terms: usize) -> Option<PolyQ> {
        let mut out = PolyQ::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u8> = ea
                    .iter()
                    .zip(eb)
                    .map(|(x, y)| x.saturating_add(*y))
                    .collect();
                out.insert(exp, ca.clone() * cb.clone());
                if out.terms.len() > max_terms {
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Product monomial of the given variables (one each).
    pub fn monomial(num_vars: usize, indices: &[usize]) -> Self {
        let mut exp = vec![0u8; num_vars];
        for &i in indices {
            exp[i] = exp[i].saturating_add(1);
        }
        let mut p = PolyQ::zero(num_vars);
        p.terms.insert(exp, Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(vec![0u8; self.num_vars].as_slice())
                .is_some_and(|c| c.is_one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// `(coeffs, constant)` when the polynomial is affine.
    pub fn as_affine(&self) -> Option<(Vec<Rational>, Rational)> {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        let mut constant = Rational::zero();
        for (exp, coeff) in &self.terms {
            let degree: u32 = exp.iter().map(|&x| x as u32).sum();
            match degree {
                0 => constant = coeff.clone(),
                1 => {
                    let i = exp.iter().position(|&x| x == 1).expect("degree one");
                    coeffs[i] = coeff.clone();
                }
                _ => return None,
            }
        }
        Some((coeffs, constant))
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (exp, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (i, &e) in exp.iter().enumerate() {
                for _ in 0..e {
                    term *= point[i].clone();
                }
            }
            total += term;
        }
        total
    }
}

/// A polynomial comparison against zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyAtom {
    pub poly: PolyQ,
    pub op: CmpOp,
}

impl PolyAtom {
    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let v = self.poly.eval(point);
        match self.op {
            CmpOp::Le => !v.is_positive(),
            CmpOp::Lt => v.is_negative(),
            CmpOp::Eq => v.is_zero(),
            CmpOp::Ne => !v.is_zero(),
            CmpOp::Ge => !v.is_negative(),
            CmpOp::Gt => v.is_positive(),
        }
    }

    /// How far the point is from satisfying the atom; zero iff it holds.
    /// Strict and disequality atoms get a unit penalty on their boundary so
    /// refinement is pushed off it.
    fn violation(&self, point: &[Rational]) -> Rational {
        let v = self.poly.eval(point);
        let one = Rational::one;
        match self.op {
            CmpOp::Le => v.max(Rational::zero()),
            CmpOp::Ge => (-v).max(Rational::zero()),
            CmpOp::Eq => v.abs(),
            CmpOp::Lt => {
                if v.is_negative() {
                    Rational::zero()
                } else {
                    v + one()
                }
            }
            CmpOp::Gt => {
                if v.is_positive() {
                    Rational::zero()
                } else {
                    -v + one()
                }
            }
            CmpOp::Ne => {
                if v.is_zero() {
                    one()
                } else {
                    Rational::zero()
                }
            }
        }
    }
}

/// A feasibility problem over unknowns partitioned into simplex groups:
/// each group sums to one with strictly positive entries.
#[derive(Debug, Clone)]
pub struct PolyProblem {
    pub num_vars: usize,
    pub atoms: Vec<PolyAtom>,
    pub groups: Vec<Vec<usize>>,
}

impl PolyProblem {
    pub fn holds_at(&self, point: &[Rational]) -> bool {
        self.on_simplexes(point) && self.atoms.iter().all(|a| a.holds_at(point))
    }

    fn on_simplexes(&self, point: &[Rational]) -> bool {
        self.groups.iter().all(|g| {
            g.iter().all(|&i| point[i].is_positive())
                && g.iter().map(|&i| point[i].clone()).sum::<Rational>().is_one()
        })
    }

    fn score(&self, point: &[Rational]) -> Rational {
        self.atoms.iter().map(|a| a.violation(point)).sum()
    }
}

/// Search controls for the naive backend.
#[derive(Debug, Clone)]
pub struct NaiveLimits {
    pub max_points: usize,
    pub refine_steps: usize,
}

impl Default for NaiveLimits {
    fn default() -> Self {
        NaiveLimits {
            max_points: 200_000,
            refine_steps: 300,
        }
    }
}

/// Grid search plus local refinement over the simplex groups. Returns a
/// verified exact solution or `None` for "unknown" — never a claim of
/// infeasibility. Degree-one problems are delegated to the exact linear
/// backend.
pub fn poly_feasibility_naive(
    problem: &PolyProblem,
    hints: &[Vec<Rational>],
    limits: &NaiveLimits,
) -> Option<Vec<Rational>> {
    if problem.groups.iter().any(|g| g.is_empty()) {
        return None;
    }

    // degree <= 1 throughout: the exact linear backend decides it
    if problem.atoms.iter().all(|a| a.poly.total_degree() <= 1) {
        let mut constraints = Vec::new();
        for atom in &problem.atoms {
            let (coeffs, constant) = atom.poly.as_affine().expect("degree checked");
            let rhs = -constant;
            match atom.op {
                CmpOp::Le => constraints.push(LinConstraint::new(coeffs, LinOp::Le, rhs)),
                CmpOp::Lt => constraints.push(LinConstraint::new(coeffs, LinOp::Lt, rhs)),
                CmpOp::Eq => constraints.push(LinConstraint::new(coeffs, LinOp::Eq, rhs)),
                CmpOp::Ge => constraints.push(LinConstraint::new(
                    coeffs.iter().map(|c| -c.clone()).collect(),
                    LinOp::Le,
                    -rhs,
                )),
                CmpOp::Gt => constraints.push(LinConstraint::new(
                    coeffs.iter().map(|c| -c.clone()).collect(),
                    LinOp::Lt,
                    -rhs,
                )),
                // a linear disequality cannot be fed to the LP; fall back
                CmpOp::Ne => return grid_search(problem, hints, limits),
            }
        }
        for group in &problem.groups {
            let mut ones = vec![Rational::zero(); problem.num_vars];
            for &i in group {
                ones[i] = Rational::one();
            }
            constraints.push(LinConstraint::new(ones, LinOp::Eq, Rational::one()));
            for &i in group {
                let mut neg = vec![Rational::zero(); problem.num_vars];
                neg[i] = -Rational::one();
                constraints.push(LinConstraint::new(neg, LinOp::Lt, Rational::zero()));
            }
        }
        let sys = LinearSystem {
            num_vars: problem.num_vars,
            constraints,
        };
        return match linear_feasibility(&sys, 200_000) {
            LpOutcome::Feasible(point) => Some(point),
            _ => None,
        };
    }

    grid_search(problem, hints, limits)
}

fn grid_search(
    problem: &PolyProblem,
    hints: &[Vec<Rational>],
    limits: &NaiveLimits,
) -> Option<Vec<Rational>> {
    search_with(
        problem.num_vars,
        &problem.groups,
        hints,
        limits,
        &|point| problem.holds_at(point),
        &|point| problem.score(point),
    )
}

/// Generic point search over simplex groups: hints first, then grids of
/// increasing resolution, then mass-shifting refinement around the
/// least-violated point. `satisfied` is the exact acceptance check; `score`
/// is zero exactly on satisfying points and guides refinement elsewhere.
pub(crate) fn search_with(
    num_vars: usize,
    groups: &[Vec<usize>],
    hints: &[Vec<Rational>],
    limits: &NaiveLimits,
    satisfied: &dyn Fn(&[Rational]) -> bool,
    score: &dyn Fn(&[Rational]) -> Rational,
) -> Option<Vec<Rational>> {
    let on_simplexes = |point: &[Rational]| {
        groups.iter().all(|g| {
            g.iter().all(|&i| point[i].is_positive())
                && g.iter().map(|&i| point[i].clone()).sum::<Rational>().is_one()
        })
    };
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut seen = 0usize;

    let consider = |point: Vec<Rational>,
                    best: &mut Option<(Rational, Vec<Rational>)>|
     -> Option<Vec<Rational>> {
        if !on_simplexes(&point) {
            return None;
        }
        if satisfied(&point) {
            return Some(point);
        }
        let s = score(&point);
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            *best = Some((s, point));
        }
        None
    };

    for hint in hints {
        if let Some(found) = consider(hint.clone(), &mut best) {
            return Some(found);
        }
    }

    for denom in [1u32, 2, 3, 4, 5, 6, 8, 12, 16, 24, 32] {
        let per_group: Vec<Vec<Vec<Rational>>> =
            groups.iter().map(|g| compositions(denom, g.len())).collect();
        if per_group.iter().any(|c| c.is_empty()) {
            continue;
        }
        let total: usize = per_group.iter().map(|c| c.len()).product();
        if seen + total > limits.max_points {
            continue;
        }
        seen += total;
        let mut idx = vec![0usize; per_group.len()];
        loop {
            let mut point = vec![Rational::zero(); num_vars];
            for (gi, group) in groups.iter().enumerate() {
                for (slot, &var) in group.iter().enumerate() {
                    point[var] = per_group[gi][idx[gi]][slot].clone();
                }
            }
            if let Some(found) = consider(point, &mut best) {
                return Some(found);
            }
            // odometer over the group grids
            let mut gi = 0;
            loop {
                if gi == idx.len() {
                    break;
                }
                idx[gi] += 1;
                if idx[gi] < per_group[gi].len() {
                    break;
                }
                idx[gi] = 0;
                gi += 1;
            }
            if gi == idx.len() {
                break;
            }
        }
    }

    // mass-shifting refinement around the best point seen
    let (mut best_score, mut point) = best?;
    let mut step = Rational::new(1.into(), 8.into());
    for _ in 0..limits.refine_steps {
        let mut improved = false;
        'moves: for group in groups {
            for &i in group {
                for &j in group {
                    if i == j || point[j] <= step {
                        continue;
                    }
                    let mut cand = point.clone();
                    cand[i] += step.clone();
                    cand[j] -= step.clone();
                    if on_simplexes(&cand) && satisfied(&cand) {
                        return Some(cand);
                    }
                    let s = score(&cand);
                    if s < best_score {
                        best_score = s;
                        point = cand;
                        improved = true;
                        break 'moves;
                    }
                }
            }
        }
        if !improved {
            step /= Rational::from_integer(2.into());
            if step < Rational::new(1.into(), 4096.into()) {
                break;
            }
        }
    }
    None
}

/// All positive rational vectors of length `k` with entries `a/denom`
/// summing to one, in lexicographic order.
fn compositions(denom: u32, k: usize) -> Vec<Vec<Rational>> {
    if k == 0 || (denom as usize) < k {
        return Vec::new();
    }
    fn rec(left: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            current.push(left);
            out.push(current.clone());
            current.pop();
            return;
        }
        for take in 1..=(left - slots as u32 + 1) {
            current.push(take);
            rec(left - take, slots - 1, current, out);
            current.pop();
        }
    }
    let mut raw = Vec::new();
    rec(denom, k, &mut Vec::with_capacity(k), &mut raw);
    raw.into_iter()
        .map(|parts| {
            parts
                .into_iter()
                .map(|a| Rational::new(a.into(), denom.into()))
                .collect()
        })
        .collect()
}
