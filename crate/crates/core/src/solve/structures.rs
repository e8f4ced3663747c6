//! Canonical discrete structures for bounded-model search.
//!
//! A candidate model is a multiset of "rows": per support point, one full
//! response table per variable over its parents. Parents come from the
//! configured DAG (in its topological order) or default to all earlier
//! variables in declaration order. Rows are ordered lexicographically by
//! their concatenated tables; multisets are kept nondecreasing, which
//! quotients away support-point permutations.

use super::{SolveConfig, SolveError};
use crate::lang::{CfEvent, PropEvent, ValueExpr};
use crate::model::{Dag, Domain, ExoMode, ExoVar, ExogenousSpec, Mechanism, Scm};
use crate::rational::Rational;
use std::collections::BTreeMap;

/// The fixed part of the candidate class: variable order (parents always
/// earlier) and parent sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureShape {
    pub vars: Vec<String>,
    pub parents: Vec<Vec<usize>>,
    pub domain: Domain,
}

impl StructureShape {
    /// Shape for a variable list with an optional DAG constraint. With a
    /// DAG, its topological order becomes the evaluation order; without
    /// one, every variable may respond to all earlier ones.
    pub fn new(
        vars: &[String],
        domain: Domain,
        dag: Option<&Dag>,
    ) -> Result<StructureShape, SolveError> {
        match dag {
            None => Ok(StructureShape {
                vars: vars.to_vec(),
                parents: (0..vars.len()).map(|i| (0..i).collect()).collect(),
                domain,
            }),
            Some(g) => {
                let mut g_sorted: Vec<&String> = g.vars().iter().collect();
                let mut c_sorted: Vec<&String> = vars.iter().collect();
                g_sorted.sort();
                c_sorted.sort();
                if g_sorted != c_sorted {
                    return Err(SolveError::Config(
                        "DAG variables differ from the declared variables".to_string(),
                    ));
                }
                let order: Vec<String> = g
                    .topological_order()
                    .iter()
                    .map(|&i| g.vars()[i].clone())
                    .collect();
                let index_of = |name: &str| order.iter().position(|v| v == name).unwrap();
                let parents = order
                    .iter()
                    .map(|v| {
                        let mut ps: Vec<usize> =
                            g.parents_of(v).into_iter().map(index_of).collect();
                        ps.sort_unstable();
                        ps
                    })
                    .collect();
                Ok(StructureShape {
                    vars: order,
                    parents,
                    domain,
                })
            }
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Table length for variable `i`.
    pub fn table_len(&self, i: usize) -> usize {
        (self.domain.cardinality() as usize).pow(self.parents[i].len() as u32)
    }

    /// Number of distinct response rows, saturating.
    pub fn row_count(&self) -> u128 {
        let c = self.domain.cardinality() as u128;
        let mut total = 1u128;
        for i in 0..self.vars.len() {
            for _ in 0..self.table_len(i) {
                total = total.saturating_mul(c);
            }
        }
        total
    }

    /// All response rows in lexicographic order of their concatenated
    /// tables; `None` once the count would exceed `limit`.
    pub fn enumerate_rows(&self, limit: usize) -> Option<Vec<StructureRow>> {
        if self.row_count() > limit as u128 {
            return None;
        }
        let c = self.domain.cardinality();
        let lens: Vec<usize> = (0..self.vars.len()).map(|i| self.table_len(i)).collect();
        let total_cells: usize = lens.iter().sum();
        let mut cells = vec![0u32; total_cells];
        let mut out = Vec::new();
        loop {
            let mut responses = Vec::with_capacity(lens.len());
            let mut offset = 0;
            for &len in &lens {
                responses.push(cells[offset..offset + len].to_vec());
                offset += len;
            }
            out.push(StructureRow { responses });
            // odometer, most significant cell first
            let mut k = total_cells;
            loop {
                if k == 0 {
                    return Some(out);
                }
                k -= 1;
                cells[k] += 1;
                if cells[k] < c {
                    break;
                }
                cells[k] = 0;
            }
        }
    }
}

/// One support point's responses: per variable, a total table over its
/// parent assignments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StructureRow {
    pub responses: Vec<Vec<u32>>,
}

impl StructureRow {
    /// Endogenous values under the given per-variable overrides.
    pub fn outcome(&self, shape: &StructureShape, overrides: &[Option<u32>]) -> Vec<u32> {
        let c = shape.domain.cardinality();
        let mut values = vec![0u32; shape.vars.len()];
        for i in 0..shape.vars.len() {
            values[i] = match overrides[i] {
                Some(v) => v,
                None => {
                    let mut idx = 0usize;
                    for &p in &shape.parents[i] {
                        idx = idx * c as usize + values[p] as usize;
                    }
                    self.responses[i][idx]
                }
            };
        }
        values
    }
}

/// Evaluates closed events against one row, caching outcomes per
/// intervention.
pub struct RowEvaluator<'a> {
    shape: &'a StructureShape,
    row: &'a StructureRow,
    cache: BTreeMap<Vec<(usize, u32)>, Vec<u32>>,
}

impl<'a> RowEvaluator<'a> {
    pub fn new(shape: &'a StructureShape, row: &'a StructureRow) -> Self {
        RowEvaluator {
            shape,
            row,
            cache: BTreeMap::new(),
        }
    }

    pub fn satisfies(&mut self, event: &CfEvent) -> Result<bool, SolveError> {
        match event {
            CfEvent::PostInt(ints, prop) => {
                let mut key = Vec::with_capacity(ints.0.len());
                for (var, value) in &ints.0 {
                    let i = self
                        .shape
                        .var_index(var)
                        .ok_or_else(|| SolveError::UnknownVariable(var.clone()))?;
                    key.push((i, literal(value)?));
                }
                key.sort_unstable();
                let values = match self.cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let mut overrides = vec![None; self.shape.vars.len()];
                        for &(i, v) in &key {
                            overrides[i] = Some(v);
                        }
                        let values = self.row.outcome(self.shape, &overrides);
                        self.cache.insert(key, values.clone());
                        values
                    }
                };
                self.prop(prop, &values)
            }
            CfEvent::Not(a) => Ok(!self.satisfies(a)?),
            CfEvent::And(a, b) => Ok(self.satisfies(a)? && self.satisfies(b)?),
            CfEvent::Or(a, b) => Ok(self.satisfies(a)? || self.satisfies(b)?),
        }
    }

    fn prop(&self, p: &PropEvent, values: &[u32]) -> Result<bool, SolveError> {
        match p {
            PropEvent::Atom { var, value } => {
                let i = self
                    .shape
                    .var_index(var)
                    .ok_or_else(|| SolveError::UnknownVariable(var.clone()))?;
                Ok(values[i] == literal(value)?)
            }
            PropEvent::Not(a) => Ok(!self.prop(a, values)?),
            PropEvent::And(a, b) => Ok(self.prop(a, values)? && self.prop(b, values)?),
            PropEvent::Or(a, b) => Ok(self.prop(a, values)? || self.prop(b, values)?),
        }
    }
}

fn literal(v: &ValueExpr) -> Result<u32, SolveError> {
    match v {
        ValueExpr::Lit(n) => Ok(*n),
        ValueExpr::Dummy(d) => Err(SolveError::FreeDummy(d.clone())),
    }
}

/// A candidate model's discrete part: exactly `p` rows in nondecreasing
/// order (repetitions allowed; equal rows model support points that tell
/// the same story with split mass).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateStructure {
    pub rows: Vec<StructureRow>,
}

/// Canonical stream of all candidate structures for a configuration.
pub struct StructureStream {
    rows: Vec<StructureRow>,
    indices: Option<Vec<usize>>,
    truncated: bool,
    count: u128,
}

impl StructureStream {
    /// Total number of structures in the class, saturating.
    pub fn total_count(&self) -> u128 {
        self.count
    }

    /// True when the row space was larger than the structure limit; any
    /// exhaustive claim must then be downgraded upstream.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

impl Iterator for StructureStream {
    type Item = CandidateStructure;

    fn next(&mut self) -> Option<CandidateStructure> {
        let indices = self.indices.as_mut()?;
        let item = CandidateStructure {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        };
        // advance the nondecreasing index tuple
        let r = self.rows.len();
        let mut k = indices.len();
        loop {
            if k == 0 {
                self.indices = None;
                break;
            }
            k -= 1;
            if indices[k] + 1 < r {
                let v = indices[k] + 1;
                for slot in &mut indices[k..] {
                    *slot = v;
                }
                break;
            }
        }
        Some(item)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut result = 1u128;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}

/// Enumerate the canonical structure class of a configuration:
/// lexicographic over tables, support rows nondecreasing. A row space
/// larger than `limits.max_structures` yields an empty, truncated stream.
pub fn enumerate_structures(cfg: &SolveConfig) -> Result<StructureStream, SolveError> {
    cfg.check()?;
    let shape = StructureShape::new(&cfg.vars, cfg.domain, cfg.dag.as_ref())?;
    let p = cfg.support_bound;
    match shape.enumerate_rows(cfg.limits.max_structures as usize) {
        Some(rows) => {
            let count = binomial(rows.len() as u128 + p as u128 - 1, p as u128);
            let indices = (!rows.is_empty()).then(|| vec![0usize; p]);
            Ok(StructureStream {
                rows,
                indices,
                truncated: false,
                count,
            })
        }
        None => Ok(StructureStream {
            rows: Vec::new(),
            indices: None,
            truncated: true,
            count: 0,
        }),
    }
}

/// Materialize a semi-Markovian witness: one joint exogenous variable with
/// the given support masses, and mechanisms reading it plus the shaped
/// parents.
pub fn rows_to_scm(
    shape: &StructureShape,
    rows: &[StructureRow],
    probs: &[Rational],
) -> Result<Scm, SolveError> {
    debug_assert_eq!(rows.len(), probs.len());
    let k = rows.len();
    let mechanisms = shape
        .vars
        .iter()
        .enumerate()
        .map(|(i, var)| {
            let mut table = Vec::with_capacity(shape.table_len(i) * k);
            for cell in 0..shape.table_len(i) {
                for row in rows {
                    table.push(row.responses[i][cell]);
                }
            }
            Mechanism {
                target: var.clone(),
                parents: shape.parents[i]
                    .iter()
                    .map(|&j| shape.vars[j].clone())
                    .collect(),
                exo_args: vec!["U".to_string()],
                table,
            }
        })
        .collect();
    let exo = ExogenousSpec {
        mode: ExoMode::SemiMarkovian,
        vars: vec![ExoVar {
            name: "U".to_string(),
            card: k as u32,
        }],
        support: probs
            .iter()
            .enumerate()
            .map(|(j, q)| (vec![j as u32], q.clone()))
            .collect(),
    };
    Scm::new(shape.domain, shape.vars.clone(), mechanisms, exo)
        .map_err(|e| SolveError::Internal(format!("witness failed validation: {e}")))
}

/// Materialize a Markovian witness: per variable, its own exogenous
/// variable selecting among the chosen tables with the given marginals.
pub fn markovian_to_scm(
    shape: &StructureShape,
    tables_per_var: &[Vec<Vec<u32>>],
    probs_per_var: &[Vec<Rational>],
) -> Result<Scm, SolveError> {
    let mechanisms = shape
        .vars
        .iter()
        .enumerate()
        .map(|(i, var)| {
            let options = &tables_per_var[i];
            let mut table = Vec::with_capacity(shape.table_len(i) * options.len());
            for cell in 0..shape.table_len(i) {
                for option in options {
                    table.push(option[cell]);
                }
            }
            Mechanism {
                target: var.clone(),
                parents: shape.parents[i]
                    .iter()
                    .map(|&j| shape.vars[j].clone())
                    .collect(),
                exo_args: vec![format!("U{i}")],
                table,
            }
        })
        .collect();
    let exo_vars: Vec<ExoVar> = tables_per_var
        .iter()
        .enumerate()
        .map(|(i, options)| ExoVar {
            name: format!("U{i}"),
            card: options.len() as u32,
        })
        .collect();
    // joint support: the product of the per-variable marginals
    let mut support: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), Rational::from_integer(1.into()))];
    for probs in probs_per_var {
        let mut next = Vec::with_capacity(support.len() * probs.len());
        for (prefix, mass) in &support {
            for (v, q) in probs.iter().enumerate() {
                let mut tuple = prefix.clone();
                tuple.push(v as u32);
                next.push((tuple, mass.clone() * q.clone()));
            }
        }
        support = next;
    }
    let exo = ExogenousSpec {
        mode: ExoMode::Markovian,
        vars: exo_vars,
        support,
    };
    Scm::new(shape.domain, shape.vars.clone(), mechanisms, exo)
        .map_err(|e| SolveError::Internal(format!("witness failed validation: {e}")))
}
