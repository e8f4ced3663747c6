//! Bounded-model satisfiability and validity.
//!
//! The model class is canonical and finite: response-function rows over a
//! support of size at most `p`, with parents fixed by an optional DAG (or
//! all earlier variables in declaration order). Structures are enumerated
//! canonically; with the structure fixed, the residual constraints over the
//! support probabilities are decided exactly by a rational simplex when
//! linear and attacked by a verified naive search when polynomial. Every
//! SAT verdict re-checks its witness through the independent evaluation
//! path before being returned; UNSAT verdicts always mean "within bounds".

mod constraints;
mod poly;
mod simplex;
mod smtlib;
mod structures;

pub use constraints::{CompiledFormula, InstAtom, MassExpr, MassModel};
pub use poly::{poly_feasibility_naive, NaiveLimits, PolyAtom, PolyProblem, PolyQ};
pub use simplex::{linear_feasibility, LinConstraint, LinOp, LinearSystem, LpOutcome};
pub use smtlib::{export_smtlib, ExportMode};
pub use structures::{
    enumerate_structures, CandidateStructure, StructureRow, StructureShape, StructureStream,
};

use crate::eval::{eval_formula, EvalOptions, Verdict};
use crate::lang::{CmpOp, Formula};
use crate::model::{Dag, Domain, Scm};
use crate::rational::Rational;
use crate::transform::{expand_sums, CausalOrdering, TransformError};
use constraints::{
    affine_to_constraint, branches, compile_formula, instantiate, literal_holds_at,
    literal_violation_at, simplex_constraints, template_meta, AtomTemplate, Node, TemplateMeta,
};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("dummy `{0}` escaped expansion")]
    FreeDummy(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("constraint expansion too large for the in-process backends")]
    TooLarge,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Which engine decides the residual constraints once a structure is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Exact LP for linear residuals, naive search for polynomial ones.
    #[default]
    Auto,
    /// Exact LP only; polynomial residuals give up with unknown.
    LinearExact,
    /// Like `Auto`; polynomial residuals use the incomplete grid search.
    PolyNaive,
    /// No in-process polynomial solving; intended for SMT-LIB export.
    PolyExport,
}

/// Resource limits for one solver call.
#[derive(Debug, Clone)]
pub struct SolveLimits {
    /// Cap on candidate structures (and response-row spaces) examined.
    pub max_structures: u64,
    /// Pivot budget per LP call.
    pub max_lp_pivots: usize,
    /// Cooperative wall-clock budget.
    pub time_budget: Option<Duration>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_structures: 1_000_000,
            max_lp_pivots: 100_000,
            time_budget: None,
        }
    }
}

/// Everything a bounded search needs besides the formula.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub vars: Vec<String>,
    pub domain: Domain,
    /// Support-size bound `p`: models may use at most this many
    /// positive-probability exogenous assignments.
    pub support_bound: usize,
    pub dag: Option<Dag>,
    pub ordering: Option<CausalOrdering>,
    pub backend: Backend,
    /// Restrict the class to product-form (Markovian) support: each
    /// variable draws its response from its own independent exogenous
    /// variable. Strictly smaller than the default joint-support class.
    pub markovian: bool,
    pub jobs: usize,
    pub sum_budget: usize,
    pub limits: SolveLimits,
}

impl SolveConfig {
    pub fn new(vars: Vec<String>, domain: Domain, support_bound: usize) -> SolveConfig {
        SolveConfig {
            vars,
            domain,
            support_bound,
            dag: None,
            ordering: None,
            backend: Backend::Auto,
            markovian: false,
            jobs: 1,
            sum_budget: 1_000_000,
            limits: SolveLimits::default(),
        }
    }

    /// Validate the configuration and resolve the effective DAG constraint
    /// (an ordering is the complete DAG along it).
    pub fn check(&self) -> Result<Option<Dag>, SolveError> {
        if self.support_bound == 0 {
            return Err(SolveError::Config("support bound must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(SolveError::Config("jobs must be at least 1".into()));
        }
        if self.vars.is_empty() {
            return Err(SolveError::Config("no variables declared".into()));
        }
        for (i, v) in self.vars.iter().enumerate() {
            if self.vars[..i].contains(v) {
                return Err(SolveError::Config(format!("variable `{v}` declared twice")));
            }
        }
        match (&self.ordering, &self.dag) {
            (Some(ord), Some(dag)) => {
                let complete = ord.complete_dag();
                if *dag != complete {
                    return Err(SolveError::Config(
                        "ordering and DAG constraints disagree".into(),
                    ));
                }
                Ok(Some(complete))
            }
            (Some(ord), None) => {
                let mut sorted: Vec<&String> = ord.vars().iter().collect();
                sorted.sort();
                let mut declared: Vec<&String> = self.vars.iter().collect();
                declared.sort();
                if sorted != declared {
                    return Err(SolveError::Config(
                        "ordering must be a permutation of the declared variables".into(),
                    ));
                }
                Ok(Some(ord.complete_dag()))
            }
            (None, dag) => Ok(dag.clone()),
        }
    }
}

/// Verdict of a bounded search. `UnsatWithinBounds` is a statement about
/// the configured class only, never about all models.
#[derive(Debug, Clone)]
pub enum SatVerdict {
    Sat(Box<Scm>),
    UnsatWithinBounds,
    Unknown(String),
}

impl SatVerdict {
    pub fn witness(&self) -> Option<&Scm> {
        match self {
            SatVerdict::Sat(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }

    pub fn is_unsat_within_bounds(&self) -> bool {
        matches!(self, SatVerdict::UnsatWithinBounds)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub structures_examined: u64,
    pub lp_calls: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub verdict: SatVerdict,
    pub stats: SolveStats,
}

const MAX_BRANCHES: usize = 4096;

/// Point-search budget for polynomial residuals inside the candidate scan;
/// deliberately small, the scan visits many candidates.
fn inner_naive_limits() -> NaiveLimits {
    NaiveLimits {
        max_points: 800,
        refine_steps: 48,
    }
}

/// Is there a model in the configured class satisfying the formula?
///
/// SAT witnesses are re-verified through [`eval_formula`] before being
/// returned. The search is deterministic: the witness is the first
/// satisfiable candidate in canonical order, independent of `jobs`.
pub fn solve_sat(f: &Formula, cfg: &SolveConfig) -> Result<SatResult, SolveError> {
    let started = Instant::now();
    let dag = cfg.check()?;
    if !f.is_closed() {
        return Err(SolveError::Config("formula has free dummies".into()));
    }
    let expanded = expand_sums(f, cfg.domain, cfg.sum_budget)?;
    let compiled = compile_formula(&expanded)?;
    let metas: Vec<TemplateMeta> = compiled.atoms.iter().map(template_meta).collect();
    let counters = Counters::default();

    let Some(branch_list) = branches(&compiled.tree, MAX_BRANCHES) else {
        return Ok(SatResult {
            verdict: SatVerdict::Unknown(format!(
                "Boolean structure expands past {MAX_BRANCHES} branches"
            )),
            stats: counters.finish(started),
        });
    };

    let shape = StructureShape::new(&cfg.vars, cfg.domain, dag.as_ref())?;
    let search = Search {
        original: f,
        cfg,
        shape: &shape,
        compiled: &compiled,
        metas: &metas,
        branch_list: &branch_list,
        counters: &counters,
        deadline: Deadline::new(started, &cfg.limits.time_budget),
    };
    let verdict = if cfg.markovian {
        search.product()?
    } else {
        search.joint()?
    };
    Ok(SatResult {
        verdict,
        stats: counters.finish(started),
    })
}

/// Bounded refutation: search for a countermodel of `f`. A SAT verdict
/// carries the counterexample; UNSAT means "valid within bounds".
pub fn solve_validity_bounded(f: &Formula, cfg: &SolveConfig) -> Result<SatResult, SolveError> {
    solve_sat(&Formula::Not(Box::new(f.clone())), cfg)
}

#[derive(Default)]
struct Counters {
    structures: AtomicU64,
    lp_calls: AtomicU64,
}

impl Counters {
    fn finish(&self, started: Instant) -> SolveStats {
        SolveStats {
            structures_examined: self.structures.load(AtomicOrdering::Relaxed),
            lp_calls: self.lp_calls.load(AtomicOrdering::Relaxed),
            elapsed: started.elapsed(),
        }
    }
}

enum BranchOutcome {
    Sat(Vec<Rational>),
    Unsat,
    Unknown,
}

#[derive(Clone, Copy)]
struct Deadline {
    at: Option<Instant>,
}

impl Deadline {
    fn new(started: Instant, budget: &Option<Duration>) -> Deadline {
        Deadline {
            at: budget.map(|b| started + b),
        }
    }

    fn passed(&self) -> bool {
        self.at.is_some_and(|t| Instant::now() >= t)
    }
}

struct Search<'a> {
    original: &'a Formula,
    cfg: &'a SolveConfig,
    shape: &'a StructureShape,
    compiled: &'a CompiledFormula,
    metas: &'a [TemplateMeta],
    branch_list: &'a [Vec<(usize, CmpOp)>],
    counters: &'a Counters,
    deadline: Deadline,
}

impl Search<'_> {
    /// Decide one conjunctive branch against a fixed mass model.
    fn check_branch(&self, mm: &MassModel, literals: &[(usize, CmpOp)]) -> BranchOutcome {
        let templates = &self.compiled.atoms;
        let mut lin = simplex_constraints(mm);
        let mut residual: Vec<(usize, CmpOp)> = Vec::new();
        for &(atom, op) in literals {
            match instantiate(&templates[atom], &self.metas[atom], op, mm) {
                InstAtom::Decided(true) => {}
                InstAtom::Decided(false) | InstAtom::Undefined => return BranchOutcome::Unsat,
                InstAtom::Affine {
                    coeffs,
                    constant,
                    op,
                } => match affine_to_constraint(&coeffs, &constant, op) {
                    Some(c) => lin.push(c),
                    None => residual.push((atom, op)),
                },
                InstAtom::Poly(_) | InstAtom::Opaque => residual.push((atom, op)),
            }
        }

        self.counters.lp_calls.fetch_add(1, AtomicOrdering::Relaxed);
        let sys = LinearSystem {
            num_vars: mm.num_vars,
            constraints: lin,
        };
        let lp_point = match linear_feasibility(&sys, self.cfg.limits.max_lp_pivots) {
            LpOutcome::Infeasible { .. } => return BranchOutcome::Unsat,
            LpOutcome::BudgetExceeded => return BranchOutcome::Unknown,
            LpOutcome::Feasible(point) => point,
        };
        if residual.is_empty() {
            return BranchOutcome::Sat(lp_point);
        }
        match self.cfg.backend {
            Backend::LinearExact | Backend::PolyExport => BranchOutcome::Unknown,
            Backend::Auto | Backend::PolyNaive => {
                let num_events = self.compiled.events.len();
                let holds = |point: &[Rational]| {
                    let masses = mm.masses_at(point, num_events);
                    literals
                        .iter()
                        .all(|&(atom, op)| literal_holds_at(&templates[atom], op, &masses))
                };
                let score = |point: &[Rational]| {
                    let masses = mm.masses_at(point, num_events);
                    residual
                        .iter()
                        .map(|&(atom, op)| literal_violation_at(&templates[atom], op, &masses))
                        .sum()
                };
                match poly::search_with(
                    mm.num_vars,
                    &mm.groups,
                    &[lp_point],
                    &inner_naive_limits(),
                    &holds,
                    &score,
                ) {
                    Some(point) => BranchOutcome::Sat(point),
                    None => BranchOutcome::Unknown,
                }
            }
        }
    }

    /// One candidate's check across all branches.
    fn check_candidate(&self, mm: &MassModel) -> BranchOutcome {
        let mut unknown = false;
        for literals in self.branch_list {
            match self.check_branch(mm, literals) {
                BranchOutcome::Sat(point) => return BranchOutcome::Sat(point),
                BranchOutcome::Unsat => {}
                BranchOutcome::Unknown => unknown = true,
            }
        }
        if unknown {
            BranchOutcome::Unknown
        } else {
            BranchOutcome::Unsat
        }
    }

    /// Re-verify a SAT witness through the independent evaluation path.
    fn verify_witness(&self, witness: &Scm) -> Result<(), SolveError> {
        if !witness.validate().is_empty() {
            return Err(SolveError::Internal("witness fails model validation".into()));
        }
        if witness.count_support_u() > self.cfg.support_bound {
            return Err(SolveError::Internal("witness exceeds the support bound".into()));
        }
        let opts = EvalOptions {
            sum_budget: self.cfg.sum_budget,
        };
        match eval_formula(witness, self.original, &opts) {
            Ok(Verdict::True) => Ok(()),
            Ok(other) => Err(SolveError::Internal(format!(
                "witness re-verification produced {other:?}"
            ))),
            Err(e) => Err(SolveError::Internal(format!(
                "witness re-verification failed: {e}"
            ))),
        }
    }

    /// Joint-support search: subsets of distinct response profiles of size
    /// up to `p`, each with strictly positive masses summing to one.
    /// Profile deduplication is sound and complete: support points with
    /// equal profiles can always merge their masses.
    fn joint(&self) -> Result<SatVerdict, SolveError> {
        let cfg = self.cfg;
        let Some(rows) = self
            .shape
            .enumerate_rows(cfg.limits.max_structures as usize)
        else {
            return Ok(SatVerdict::Unknown(format!(
                "response-row space exceeds max_structures = {}",
                cfg.limits.max_structures
            )));
        };

        let mut profiles: Vec<(StructureRow, Vec<bool>)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for row in rows {
            let mut ev = structures::RowEvaluator::new(self.shape, &row);
            let bits = self
                .compiled
                .events
                .iter()
                .map(|e| ev.satisfies(e))
                .collect::<Result<Vec<bool>, SolveError>>()?;
            if seen.insert(bits.clone()) {
                profiles.push((row, bits));
            }
        }

        let mut any_unknown: Option<String> = None;
        let mut truncated = false;
        let batch_size = cfg.jobs.max(1) * 8;
        'outer: for k in 1..=cfg.support_bound.min(profiles.len()) {
            let mut combo: Option<Vec<usize>> = Some((0..k).collect());
            while combo.is_some() {
                if self.deadline.passed() {
                    return Ok(SatVerdict::Unknown("time budget exhausted".into()));
                }
                // collect the next batch of combinations in canonical order
                let mut batch: Vec<Vec<usize>> = Vec::with_capacity(batch_size);
                while let Some(current) = combo.clone() {
                    if self.counters.structures.fetch_add(1, AtomicOrdering::Relaxed)
                        >= cfg.limits.max_structures
                    {
                        truncated = true;
                        combo = None;
                        break;
                    }
                    batch.push(current.clone());
                    let mut next = current;
                    combo = next_combination(&mut next, profiles.len()).then_some(next);
                    if batch.len() == batch_size {
                        break;
                    }
                }
                let outcomes: Vec<BranchOutcome> = if cfg.jobs > 1 {
                    batch
                        .par_iter()
                        .map(|c| self.check_candidate(&self.joint_model(&profiles, c)))
                        .collect()
                } else {
                    batch
                        .iter()
                        .map(|c| self.check_candidate(&self.joint_model(&profiles, c)))
                        .collect()
                };
                for (c, outcome) in batch.iter().zip(outcomes) {
                    match outcome {
                        BranchOutcome::Sat(point) => {
                            let rows: Vec<StructureRow> =
                                c.iter().map(|&i| profiles[i].0.clone()).collect();
                            let witness = structures::rows_to_scm(self.shape, &rows, &point)?;
                            self.verify_witness(&witness)?;
                            return Ok(SatVerdict::Sat(Box::new(witness)));
                        }
                        BranchOutcome::Unsat => {}
                        BranchOutcome::Unknown => {
                            any_unknown.get_or_insert_with(|| {
                                "incomplete backend on some candidate".into()
                            });
                        }
                    }
                }
                if truncated {
                    break 'outer;
                }
            }
        }
        Ok(final_verdict(any_unknown, truncated, cfg))
    }

    fn joint_model(&self, profiles: &[(StructureRow, Vec<bool>)], combo: &[usize]) -> MassModel {
        MassModel::joint(combo.iter().map(|&i| profiles[i].1.clone()).collect())
    }

    /// Product-form (Markovian) search: per variable an independent block
    /// of response tables; the joint support is the product of the blocks.
    fn product(&self) -> Result<SatVerdict, SolveError> {
        let cfg = self.cfg;
        let n = self.shape.vars.len();
        let c = self.shape.domain.cardinality();

        let mut tables_per_var: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
        for i in 0..n {
            let len = self.shape.table_len(i);
            let count = (c as u128).saturating_pow(len as u32);
            if count > cfg.limits.max_structures as u128 {
                return Ok(SatVerdict::Unknown(format!(
                    "response-table space exceeds max_structures = {}",
                    cfg.limits.max_structures
                )));
            }
            let mut tables = Vec::with_capacity(count as usize);
            let mut cells = vec![0u32; len];
            loop {
                tables.push(cells.clone());
                let mut k = len;
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    cells[k] += 1;
                    if cells[k] < c {
                        done = false;
                        break;
                    }
                    cells[k] = 0;
                }
                if done {
                    break;
                }
            }
            tables_per_var.push(tables);
        }

        let mut any_unknown: Option<String> = None;
        let mut truncated = false;
        let mut sizes = vec![1usize; n];
        'sizes: loop {
            let product: usize = sizes.iter().product();
            let admissible = product <= cfg.support_bound
                && sizes
                    .iter()
                    .enumerate()
                    .all(|(i, &s)| s <= tables_per_var[i].len());
            if admissible {
                let mut selections: Vec<Vec<usize>> =
                    sizes.iter().map(|&s| (0..s).collect()).collect();
                'subsets: loop {
                    if self.deadline.passed() {
                        return Ok(SatVerdict::Unknown("time budget exhausted".into()));
                    }
                    if self.counters.structures.fetch_add(1, AtomicOrdering::Relaxed)
                        >= cfg.limits.max_structures
                    {
                        truncated = true;
                        break 'sizes;
                    }
                    match self.check_product(&tables_per_var, &selections)? {
                        ProductOutcome::Sat(witness) => {
                            return Ok(SatVerdict::Sat(witness));
                        }
                        ProductOutcome::Unsat => {}
                        ProductOutcome::Unknown => {
                            any_unknown.get_or_insert_with(|| {
                                "incomplete backend on some candidate".into()
                            });
                        }
                    }
                    // advance the per-variable combinations like an odometer
                    let mut vi = n;
                    loop {
                        if vi == 0 {
                            break 'subsets;
                        }
                        vi -= 1;
                        if next_combination(&mut selections[vi], tables_per_var[vi].len()) {
                            break;
                        }
                        selections[vi] = (0..sizes[vi]).collect();
                    }
                }
            }
            // next size vector with entries in 1..=p
            let mut vi = n;
            loop {
                if vi == 0 {
                    break 'sizes;
                }
                vi -= 1;
                sizes[vi] += 1;
                if sizes[vi] <= cfg.support_bound {
                    break;
                }
                sizes[vi] = 1;
            }
        }
        Ok(final_verdict(any_unknown, truncated, cfg))
    }

    fn check_product(
        &self,
        tables_per_var: &[Vec<Vec<u32>>],
        selections: &[Vec<usize>],
    ) -> Result<ProductOutcome, SolveError> {
        let n = self.shape.vars.len();
        let mut groups = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0usize;
        for selection in selections {
            offsets.push(total);
            groups.push((total..total + selection.len()).collect::<Vec<usize>>());
            total += selection.len();
        }
        // units: the cartesian product of per-variable choices
        let mut unit_vars: Vec<Vec<usize>> = vec![Vec::new()];
        let mut unit_choice: Vec<Vec<usize>> = vec![Vec::new()];
        for (i, selection) in selections.iter().enumerate() {
            let mut next_vars = Vec::with_capacity(unit_vars.len() * selection.len());
            let mut next_choice = Vec::with_capacity(next_vars.capacity());
            for (vars, choice) in unit_vars.iter().zip(&unit_choice) {
                for (slot, &table_idx) in selection.iter().enumerate() {
                    let mut v = vars.clone();
                    v.push(offsets[i] + slot);
                    let mut ch = choice.clone();
                    ch.push(table_idx);
                    next_vars.push(v);
                    next_choice.push(ch);
                }
            }
            unit_vars = next_vars;
            unit_choice = next_choice;
        }
        let mut unit_bits = Vec::with_capacity(unit_vars.len());
        for choice in &unit_choice {
            let row = StructureRow {
                responses: choice
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| tables_per_var[i][t].clone())
                    .collect(),
            };
            let mut ev = structures::RowEvaluator::new(self.shape, &row);
            let bits = self
                .compiled
                .events
                .iter()
                .map(|e| ev.satisfies(e))
                .collect::<Result<Vec<bool>, SolveError>>()?;
            unit_bits.push(bits);
        }
        let mm = MassModel {
            num_vars: total,
            groups,
            unit_vars,
            unit_bits,
        };
        match self.check_candidate(&mm) {
            BranchOutcome::Sat(point) => {
                let chosen: Vec<Vec<Vec<u32>>> = selections
                    .iter()
                    .enumerate()
                    .map(|(i, sel)| sel.iter().map(|&t| tables_per_var[i][t].clone()).collect())
                    .collect();
                let probs: Vec<Vec<Rational>> = selections
                    .iter()
                    .enumerate()
                    .map(|(i, sel)| {
                        (0..sel.len())
                            .map(|slot| point[offsets[i] + slot].clone())
                            .collect()
                    })
                    .collect();
                let witness = structures::markovian_to_scm(self.shape, &chosen, &probs)?;
                self.verify_witness(&witness)?;
                Ok(ProductOutcome::Sat(Box::new(witness)))
            }
            BranchOutcome::Unsat => Ok(ProductOutcome::Unsat),
            BranchOutcome::Unknown => Ok(ProductOutcome::Unknown),
        }
    }
}

enum ProductOutcome {
    Sat(Box<Scm>),
    Unsat,
    Unknown,
}

fn final_verdict(any_unknown: Option<String>, truncated: bool, cfg: &SolveConfig) -> SatVerdict {
    if truncated {
        SatVerdict::Unknown(format!(
            "structure enumeration truncated at max_structures = {}",
            cfg.limits.max_structures
        ))
    } else if let Some(reason) = any_unknown {
        SatVerdict::Unknown(reason)
    } else {
        SatVerdict::UnsatWithinBounds
    }
}

/// Advance a strictly increasing index combination; false when exhausted.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
}

// ── structure-to-constraints (public, per the module contract) ────────

/// The residual constraint system of a formula under one fixed structure:
/// a Boolean tree over polynomial atoms `poly op 0` in the support masses.
/// Conditionals clear their denominators, which is sound because every
/// support mass is strictly positive, so a nonempty condition support makes
/// the denominator positive; an empty one makes the conditional undefined
/// for every admissible assignment, the never-satisfiable
/// [`ConstraintNode::Undefined`].
#[derive(Debug, Clone)]
pub enum ConstraintNode {
    Atom(PolyAtom),
    Undefined,
    Not(Box<ConstraintNode>),
    And(Box<ConstraintNode>, Box<ConstraintNode>),
    Or(Box<ConstraintNode>, Box<ConstraintNode>),
}

#[derive(Debug, Clone)]
pub struct StructureConstraints {
    pub num_unknowns: usize,
    pub tree: ConstraintNode,
}

pub fn structure_to_constraints(
    f: &Formula,
    s: &CandidateStructure,
    cfg: &SolveConfig,
) -> Result<StructureConstraints, SolveError> {
    let dag = cfg.check()?;
    let shape = StructureShape::new(&cfg.vars, cfg.domain, dag.as_ref())?;
    let expanded = expand_sums(f, cfg.domain, cfg.sum_budget)?;
    let compiled = compile_formula(&expanded)?;
    let mut bits = Vec::with_capacity(s.rows.len());
    for row in &s.rows {
        let mut ev = structures::RowEvaluator::new(&shape, row);
        bits.push(
            compiled
                .events
                .iter()
                .map(|e| ev.satisfies(e))
                .collect::<Result<Vec<bool>, SolveError>>()?,
        );
    }
    let mm = MassModel::joint(bits);
    let tree = constraint_tree(&compiled.tree, &compiled.atoms, &mm)?;
    Ok(StructureConstraints {
        num_unknowns: s.rows.len(),
        tree,
    })
}

fn constraint_tree(
    node: &Node,
    templates: &[AtomTemplate],
    mm: &MassModel,
) -> Result<ConstraintNode, SolveError> {
    match node {
        Node::Atom(i, op) => cleared_atom(&templates[*i], *op, mm),
        Node::Not(g) => Ok(ConstraintNode::Not(Box::new(constraint_tree(
            g, templates, mm,
        )?))),
        Node::And(a, b) => Ok(ConstraintNode::And(
            Box::new(constraint_tree(a, templates, mm)?),
            Box::new(constraint_tree(b, templates, mm)?),
        )),
        Node::Or(a, b) => Ok(ConstraintNode::Or(
            Box::new(constraint_tree(a, templates, mm)?),
            Box::new(constraint_tree(b, templates, mm)?),
        )),
    }
}

/// The cleared polynomial form of one comparison, without the sign
/// shortcuts the branch engine uses.
pub(crate) fn cleared_atom(
    template: &AtomTemplate,
    op: CmpOp,
    mm: &MassModel,
) -> Result<ConstraintNode, SolveError> {
    use constraints::{frac_of, Frac};
    let (lhs, rhs) = (frac_of(&template.lhs, mm), frac_of(&template.rhs, mm));
    match (lhs, rhs) {
        (Frac::Undefined, _) | (_, Frac::Undefined) => Ok(ConstraintNode::Undefined),
        (Frac::Oversize, _) | (_, Frac::Oversize) => Err(SolveError::TooLarge),
        (Frac::Ok { num: nl, den: dl }, Frac::Ok { num: nr, den: dr }) => {
            let (Some(left), Some(right)) = (nl.mul_capped(&dr, 4000), nr.mul_capped(&dl, 4000))
            else {
                return Err(SolveError::TooLarge);
            };
            Ok(ConstraintNode::Atom(PolyAtom {
                poly: left.sub(&right),
                op,
            }))
        }
    }
}
