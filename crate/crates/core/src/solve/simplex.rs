//! Exact rational linear feasibility over nonnegative variables.
//!
//! A dense two-phase simplex with Bland's rule: every pivot is exact, so
//! feasibility answers are decisions, not approximations. Strict
//! inequalities are handled by a shared slack variable that the second
//! phase maximizes; the system is strictly feasible iff the optimum is
//! positive, and the optimal vertex then satisfies every strict row with
//! room to spare. Infeasibility comes with a subsystem certificate obtained
//! by a deletion filter, so the certificate is itself verified.

use crate::rational::Rational;
use num::{One, Signed, Zero};

/// Constraint sense for `coeffs · x  op  rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinOp {
    Le,
    Lt,
    Eq,
}

/// One linear constraint over implicitly nonnegative variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConstraint {
    pub coeffs: Vec<Rational>,
    pub op: LinOp,
    pub rhs: Rational,
}

impl LinConstraint {
    pub fn new(coeffs: Vec<Rational>, op: LinOp, rhs: Rational) -> Self {
        LinConstraint { coeffs, op, rhs }
    }

    fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c.clone() * v.clone())
            .sum();
        match self.op {
            LinOp::Le => lhs <= self.rhs,
            LinOp::Lt => lhs < self.rhs,
            LinOp::Eq => lhs == self.rhs,
        }
    }
}

/// A finite system of linear constraints over `num_vars` nonnegative
/// unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub constraints: Vec<LinConstraint>,
}

impl LinearSystem {
    pub fn holds_at(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(x))
    }
}

/// Outcome of a feasibility query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// An exact point satisfying every constraint, strict ones strictly.
    Feasible(Vec<Rational>),
    /// No point exists; the listed constraint indices are already
    /// infeasible on their own.
    Infeasible { certificate: Vec<usize> },
    /// The pivot budget ran out before a decision.
    BudgetExceeded,
}

/// Decide feasibility of the system, returning a canonical satisfying
/// vertex, an infeasible-subsystem certificate, or budget exhaustion.
pub fn linear_feasibility(sys: &LinearSystem, pivot_budget: usize) -> LpOutcome {
    let mut budget = Budget {
        left: pivot_budget,
    };
    match solve_once(sys, &mut budget) {
        Ok(Some(point)) => {
            debug_assert!(sys.holds_at(&point));
            LpOutcome::Feasible(point)
        }
        Ok(None) => {
            let certificate = deletion_filter(sys, &mut budget);
            LpOutcome::Infeasible { certificate }
        }
        Err(OutOfBudget) => LpOutcome::BudgetExceeded,
    }
}

struct Budget {
    left: usize,
}

struct OutOfBudget;

impl Budget {
    fn spend(&mut self) -> Result<(), OutOfBudget> {
        if self.left == 0 {
            return Err(OutOfBudget);
        }
        self.left -= 1;
        Ok(())
    }
}

/// Shrink to a subsystem that is still infeasible: drop each constraint in
/// turn and keep the drop whenever infeasibility survives. On a budget
/// miss the current (correct, possibly non-minimal) index set is returned.
fn deletion_filter(sys: &LinearSystem, budget: &mut Budget) -> Vec<usize> {
    let mut kept: Vec<usize> = (0..sys.constraints.len()).collect();
    if kept.len() > 64 {
        return kept;
    }
    let mut i = 0;
    while i < kept.len() {
        let mut trial: Vec<LinConstraint> = Vec::with_capacity(kept.len() - 1);
        for (k, &idx) in kept.iter().enumerate() {
            if k != i {
                trial.push(sys.constraints[idx].clone());
            }
        }
        let trial_sys = LinearSystem {
            num_vars: sys.num_vars,
            constraints: trial,
        };
        match solve_once(&trial_sys, budget) {
            Ok(None) => {
                kept.remove(i);
            }
            Ok(Some(_)) => i += 1,
            Err(OutOfBudget) => break,
        }
    }
    kept
}

/// Feasibility decision without certificates: `Some(point)` or `None`.
fn solve_once(sys: &LinearSystem, budget: &mut Budget) -> Result<Option<Vec<Rational>>, OutOfBudget> {
    let n = sys.num_vars;
    let has_strict = sys.constraints.iter().any(|c| c.op == LinOp::Lt);
    // columns: x_0..x_{n-1}, then ε when strict rows exist
    let eps_col = has_strict.then_some(n);
    let structural = n + usize::from(has_strict);

    // assemble rows: strict rows gain +ε; one extra row bounds ε ≤ 1
    let mut rows: Vec<(Vec<Rational>, LinOp, Rational)> = Vec::new();
    for c in &sys.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.resize(structural, Rational::zero());
        if c.op == LinOp::Lt {
            coeffs[n] = Rational::one();
        }
        let op = if c.op == LinOp::Eq { LinOp::Eq } else { LinOp::Le };
        rows.push((coeffs, op, c.rhs.clone()));
    }
    if let Some(e) = eps_col {
        let mut coeffs = vec![Rational::zero(); structural];
        coeffs[e] = Rational::one();
        rows.push((coeffs, LinOp::Le, Rational::one()));
    }

    let m = rows.len();
    if m == 0 {
        return Ok(Some(vec![Rational::zero(); n]));
    }

    // slack per Le row, artificial wherever the slack cannot start basic
    let num_slack = rows.iter().filter(|(_, op, _)| *op == LinOp::Le).count();
    let mut tab = Tableau::new(m, structural + num_slack);
    let mut col = structural;
    let mut artificial_cols = Vec::new();
    for (r, (coeffs, op, rhs)) in rows.into_iter().enumerate() {
        let flip = rhs.is_negative();
        let sign = if flip { -Rational::one() } else { Rational::one() };
        for (j, c) in coeffs.iter().enumerate() {
            tab.a[r][j] = c.clone() * sign.clone();
        }
        tab.b[r] = rhs * sign.clone();
        if op == LinOp::Le {
            tab.a[r][col] = sign.clone();
            if !flip {
                tab.basis[r] = col;
            }
            col += 1;
        }
        if tab.basis[r] == usize::MAX {
            let art = tab.add_column();
            tab.a[r][art] = Rational::one();
            tab.basis[r] = art;
            artificial_cols.push(art);
        }
    }

    // phase 1: drive the artificials to zero
    if !artificial_cols.is_empty() {
        let mut objective = vec![Rational::zero(); tab.cols];
        for &c in &artificial_cols {
            objective[c] = -Rational::one();
        }
        let value = tab.maximize(&objective, &[], budget)?;
        if value.is_negative() {
            return Ok(None);
        }
        tab.evict_artificials(&artificial_cols, budget)?;
    }

    // phase 2: maximize ε over the feasible region
    if let Some(e) = eps_col {
        let mut objective = vec![Rational::zero(); tab.cols];
        objective[e] = Rational::one();
        let value = tab.maximize(&objective, &artificial_cols, budget)?;
        if !value.is_positive() {
            return Ok(None);
        }
    }

    let mut point = vec![Rational::zero(); n];
    for (r, &bc) in tab.basis.iter().enumerate() {
        if bc < n {
            point[bc] = tab.b[r].clone();
        }
    }
    Ok(Some(point))
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(rows: usize, cols: usize) -> Self {
        Tableau {
            rows,
            cols,
            a: vec![vec![Rational::zero(); cols]; rows],
            b: vec![Rational::zero(); rows],
            basis: vec![usize::MAX; rows],
        }
    }

    fn add_column(&mut self) -> usize {
        for row in &mut self.a {
            row.push(Rational::zero());
        }
        self.cols += 1;
        self.cols - 1
    }

    /// Maximize `objective · columns` from the current basis with Bland's
    /// rule, never entering a banned column. Returns the optimal value.
    fn maximize(
        &mut self,
        objective: &[Rational],
        banned: &[usize],
        budget: &mut Budget,
    ) -> Result<Rational, OutOfBudget> {
        // reduced costs for the current basis
        let mut red = objective.to_vec();
        let mut value = Rational::zero();
        for r in 0..self.rows {
            let cb = objective[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, slot) in red.iter_mut().enumerate() {
                let adj = cb.clone() * self.a[r][j].clone();
                *slot -= adj;
            }
            value += cb * self.b[r].clone();
        }
        loop {
            let entering = (0..self.cols)
                .find(|&j| red[j].is_positive() && !banned.contains(&j));
            let Some(j) = entering else {
                return Ok(value);
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows {
                if self.a[r][j].is_positive() {
                    let ratio = self.b[r].clone() / self.a[r][j].clone();
                    let better = match &leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leaving else {
                // objective unbounded; with our bounded objectives this is
                // unreachable, but fail closed rather than loop
                return Ok(value);
            };
            budget.spend()?;
            self.pivot(r, j);
            // update reduced costs and objective value with the pivot row
            let factor = red[j].clone();
            if !factor.is_zero() {
                for (col, slot) in red.iter_mut().enumerate() {
                    let adj = factor.clone() * self.a[r][col].clone();
                    *slot -= adj;
                }
                value += factor * self.b[r].clone();
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.a[r][j].clone();
        for col in 0..self.cols {
            self.a[r][col] /= inv.clone();
        }
        self.b[r] /= inv;
        for row in 0..self.rows {
            if row == r {
                continue;
            }
            let factor = self.a[row][j].clone();
            if factor.is_zero() {
                continue;
            }
            for col in 0..self.cols {
                let adj = factor.clone() * self.a[r][col].clone();
                self.a[row][col] -= adj;
            }
            let adj = factor * self.b[r].clone();
            self.b[row] -= adj;
        }
        self.basis[r] = j;
    }

    /// After phase 1, pivot any artificial still in the basis out on a
    /// non-artificial column; an all-zero row is redundant and stays inert.
    fn evict_artificials(
        &mut self,
        artificial_cols: &[usize],
        budget: &mut Budget,
    ) -> Result<(), OutOfBudget> {
        for r in 0..self.rows {
            if !artificial_cols.contains(&self.basis[r]) {
                continue;
            }
            let replacement = (0..self.cols)
                .find(|j| !artificial_cols.contains(j) && !self.a[r][*j].is_zero());
            if let Some(j) = replacement {
                budget.spend()?;
                self.pivot(r, j);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn le(coeffs: &[i64], rhs: i64) -> LinConstraint {
        LinConstraint::new(coeffs.iter().map(|&c| ratio(c, 1)).collect(), LinOp::Le, ratio(rhs, 1))
    }

    fn eq(coeffs: &[i64], rhs: i64) -> LinConstraint {
        LinConstraint::new(coeffs.iter().map(|&c| ratio(c, 1)).collect(), LinOp::Eq, ratio(rhs, 1))
    }

    fn lt(coeffs: &[i64], rhs: i64) -> LinConstraint {
        LinConstraint::new(coeffs.iter().map(|&c| ratio(c, 1)).collect(), LinOp::Lt, ratio(rhs, 1))
    }

    #[test]
    fn balanced_pair_solves_to_half() {
        // q1 + q2 = 1, q1 - q2 = 0, q strictly positive
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![
                eq(&[1, 1], 1),
                eq(&[1, -1], 0),
                lt(&[-1, 0], 0),
                lt(&[0, -1], 0),
            ],
        };
        match linear_feasibility(&sys, 1000) {
            LpOutcome::Feasible(q) => {
                assert_eq!(q, vec![ratio(1, 2), ratio(1, 2)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_bounds_are_infeasible_with_certificate() {
        // q1 >= 1 (as -q1 <= -1) and q1 <= 0
        let sys = LinearSystem {
            num_vars: 1,
            constraints: vec![le(&[-1], -1), le(&[1], 0)],
        };
        match linear_feasibility(&sys, 1000) {
            LpOutcome::Infeasible { certificate } => {
                assert_eq!(certificate, vec![0, 1]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn strict_witness_is_strict() {
        // q1 > 0, q1 + q2 = 1, q2 >= 2/3
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![
                lt(&[-1, 0], 0),
                eq(&[1, 1], 1),
                le(&[0, -3], -2),
            ],
        };
        match linear_feasibility(&sys, 1000) {
            LpOutcome::Feasible(q) => {
                assert!(q[0].is_positive());
                assert_eq!(q[0].clone() + q[1].clone(), ratio(1, 1));
                assert!(q[1] >= ratio(2, 3));
                // determinism: the same vertex every time
                let again = linear_feasibility(&sys, 1000);
                assert_eq!(again, LpOutcome::Feasible(q));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn strict_cycle_is_detected() {
        // q1 < q2 and q2 < q1
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![lt(&[1, -1], 0), lt(&[-1, 1], 0)],
        };
        assert!(matches!(
            linear_feasibility(&sys, 1000),
            LpOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn certificate_is_minimal_under_deletion() {
        // an irrelevant satisfiable row plus a contradictory pair
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![le(&[1, 1], 10), eq(&[1, 0], 2), le(&[1, 0], 1)],
        };
        match linear_feasibility(&sys, 10_000) {
            LpOutcome::Infeasible { certificate } => {
                assert_eq!(certificate, vec![1, 2]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_system_is_feasible_at_origin() {
        let sys = LinearSystem {
            num_vars: 3,
            constraints: vec![],
        };
        assert_eq!(
            linear_feasibility(&sys, 10),
            LpOutcome::Feasible(vec![ratio(0, 1); 3])
        );
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![eq(&[1, 1], 1), eq(&[1, -1], 0)],
        };
        assert_eq!(linear_feasibility(&sys, 0), LpOutcome::BudgetExceeded);
    }

    #[test]
    fn fractional_coefficients_stay_exact() {
        // 2/3 q1 + 1/6 q2 = 1/2 with q1 = q2 forces q = (3/5, 3/5)
        let sys = LinearSystem {
            num_vars: 2,
            constraints: vec![
                LinConstraint::new(vec![ratio(2, 3), ratio(1, 6)], LinOp::Eq, ratio(1, 2)),
                eq(&[1, -1], 0),
            ],
        };
        match linear_feasibility(&sys, 1000) {
            LpOutcome::Feasible(q) => {
                assert_eq!(q, vec![ratio(3, 5), ratio(3, 5)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }
}
