//! Deterministic test corpora: a worked example model and seeded random
//! term/formula generators. Everything here is reproducible from its seed,
//! so suites across crates can share the exact same inputs.

use crate::lang::{
    Arithmetic, CfEvent, CmpOp, Formula, Intervention, LangContext, PropEvent, Term, ValueExpr,
};
use crate::model::{Domain, ExoMode, ExoVar, ExogenousSpec, Mechanism, Scm};
use crate::rational::{ratio, Rational};
use num::One;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The worked three-variable example: age `Z`, vaccination `X`, recovery
/// `Y`, driven by three independent binary background factors with
/// `P(U1=1) = 2/5`, `P(U2=1) = 21/100`, `P(U3=1) = 9/10` and mechanisms
///
/// ```text
/// Z = U1
/// X = Z·U2 + (1-Z)·(1-U2)
/// Y = X·Z + (1-X)·(1-U3) + X·(1-Z)·U3
/// ```
pub fn vaccination_scm() -> Scm {
    let marginals: [[Rational; 2]; 3] = [
        [ratio(3, 5), ratio(2, 5)],
        [ratio(79, 100), ratio(21, 100)],
        [ratio(1, 10), ratio(9, 10)],
    ];
    let mut support = Vec::new();
    for u1 in 0..2u32 {
        for u2 in 0..2u32 {
            for u3 in 0..2u32 {
                let p = marginals[0][u1 as usize].clone()
                    * marginals[1][u2 as usize].clone()
                    * marginals[2][u3 as usize].clone();
                support.push((vec![u1, u2, u3], p));
            }
        }
    }
    Scm::new(
        Domain::binary(),
        vec!["Z".into(), "X".into(), "Y".into()],
        vec![
            Mechanism {
                target: "Z".into(),
                parents: vec![],
                exo_args: vec!["U1".into()],
                table: vec![0, 1],
            },
            Mechanism {
                target: "X".into(),
                parents: vec!["Z".into()],
                exo_args: vec!["U2".into()],
                table: vec![1, 0, 0, 1],
            },
            Mechanism {
                target: "Y".into(),
                parents: vec!["Z".into(), "X".into()],
                exo_args: vec!["U3".into()],
                table: vec![1, 0, 0, 1, 1, 0, 1, 1],
            },
        ],
        ExogenousSpec {
            mode: ExoMode::Markovian,
            vars: vec![
                ExoVar { name: "U1".into(), card: 2 },
                ExoVar { name: "U2".into(), card: 2 },
                ExoVar { name: "U3".into(), card: 2 },
            ],
            support,
        },
    )
    .expect("example model is valid")
}

/// Parsing context matching [`vaccination_scm`].
pub fn vaccination_ctx() -> LangContext {
    LangContext::new(vec!["Z".into(), "X".into(), "Y".into()], Domain::binary())
        .expect("example context is valid")
}

/// Shape controls for generated terms and formulas.
#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Highest hierarchy layer events may use (1..=3).
    pub max_layer: u8,
    /// Largest arithmetic fragment to draw operators from.
    pub arithmetic: Arithmetic,
    /// Maximum number of nested `sum` binders (0 disables sums).
    pub max_sum_nesting: usize,
    /// Whether conditional probabilities may appear.
    pub allow_cond: bool,
    /// Recursion depth of generated term trees.
    pub term_depth: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_layer: 3,
            arithmetic: Arithmetic::Poly,
            max_sum_nesting: 2,
            allow_cond: true,
            term_depth: 3,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    ctx: &'a LangContext,
    opts: GenOptions,
    dummies: Vec<String>,
    next_dummy: usize,
}

impl<'a> Gen<'a> {
    fn new(seed: u64, ctx: &'a LangContext, opts: GenOptions) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ctx,
            opts,
            dummies: Vec::new(),
            next_dummy: 0,
        }
    }

    fn pct(&mut self, p: u32) -> bool {
        self.rng.random_range(0..100) < p
    }

    fn var(&mut self) -> String {
        let i = self.rng.random_range(0..self.ctx.vars().len());
        self.ctx.vars()[i].clone()
    }

    fn value_expr(&mut self) -> ValueExpr {
        if !self.dummies.is_empty() && self.pct(35) {
            let i = self.rng.random_range(0..self.dummies.len());
            ValueExpr::Dummy(self.dummies[i].clone())
        } else {
            ValueExpr::Lit(self.rng.random_range(0..self.ctx.domain().cardinality()))
        }
    }

    fn atom(&mut self) -> PropEvent {
        PropEvent::Atom {
            var: self.var(),
            value: self.value_expr(),
        }
    }

    fn prop(&mut self, depth: usize) -> PropEvent {
        if depth == 0 {
            return self.atom();
        }
        match self.rng.random_range(0..10) {
            0..=4 => self.atom(),
            5 | 6 => PropEvent::Not(Box::new(self.prop(depth - 1))),
            7 | 8 => PropEvent::And(Box::new(self.prop(depth - 1)), Box::new(self.prop(depth - 1))),
            _ => PropEvent::Or(Box::new(self.prop(depth - 1)), Box::new(self.prop(depth - 1))),
        }
    }

    fn intervention(&mut self, nonempty: bool) -> Intervention {
        let mut items = Vec::new();
        for v in self.ctx.vars() {
            if self.pct(40) {
                let value = self.value_expr();
                items.push((v.clone(), value));
            }
        }
        if nonempty && items.is_empty() {
            let v = self.var();
            let value = self.value_expr();
            items.push((v, value));
        }
        Intervention(items)
    }

    fn cf_event(&mut self, depth: usize) -> CfEvent {
        let layer = self.opts.max_layer;
        if layer >= 3 && depth > 0 && self.pct(40) {
            return match self.rng.random_range(0..3) {
                0 => CfEvent::Not(Box::new(self.cf_event(depth - 1))),
                1 => CfEvent::And(
                    Box::new(self.cf_event(depth - 1)),
                    Box::new(self.cf_event(depth - 1)),
                ),
                _ => CfEvent::Or(
                    Box::new(self.cf_event(depth - 1)),
                    Box::new(self.cf_event(depth - 1)),
                ),
            };
        }
        let ints = if layer >= 2 && self.pct(70) {
            let nonempty = self.pct(60);
            self.intervention(nonempty)
        } else {
            Intervention::top()
        };
        CfEvent::PostInt(ints, self.prop(2))
    }

    fn leaf(&mut self) -> Term {
        if self.opts.allow_cond && self.pct(20) {
            Term::CondProb(self.cf_event(1), self.cf_event(1))
        } else if self.pct(15) {
            let num = self.rng.random_range(0..=4i64);
            let den = self.rng.random_range(1..=4i64);
            Term::Const(ratio(num, den))
        } else {
            Term::Prob(self.cf_event(2))
        }
    }

    fn term(&mut self, depth: usize, sums_left: usize) -> Term {
        if sums_left > 0 && self.pct(35) {
            let name = loop {
                let candidate = format!("s{}", self.next_dummy);
                self.next_dummy += 1;
                if !self.ctx.declares(&candidate) {
                    break candidate;
                }
            };
            self.dummies.push(name.clone());
            let body = self.term(depth, sums_left - 1);
            self.dummies.pop();
            return Term::Sum(name, Box::new(body));
        }
        if depth == 0 {
            return self.leaf();
        }
        let max = self.opts.arithmetic;
        let choice = self.rng.random_range(0..10);
        match choice {
            0..=3 => self.leaf(),
            4 | 5 if max >= Arithmetic::Lin => Term::Add(
                Box::new(self.term(depth - 1, sums_left)),
                Box::new(self.term(depth - 1, sums_left)),
            ),
            6 if max >= Arithmetic::Poly => Term::Sub(
                Box::new(self.term(depth - 1, sums_left)),
                Box::new(self.term(depth - 1, sums_left)),
            ),
            7 if max >= Arithmetic::Poly => Term::Neg(Box::new(self.term(depth - 1, sums_left))),
            8 | 9 if max >= Arithmetic::Poly => Term::Mul(
                Box::new(self.term(depth - 1, sums_left)),
                Box::new(self.term(depth - 1, sums_left)),
            ),
            _ => self.leaf(),
        }
    }

    fn comparison(&mut self) -> Formula {
        let lhs = self.term(self.opts.term_depth, self.opts.max_sum_nesting);
        let op = match self.rng.random_range(0..6) {
            0 => CmpOp::Le,
            1 => CmpOp::Lt,
            2 => CmpOp::Eq,
            3 => CmpOp::Ne,
            4 => CmpOp::Ge,
            _ => CmpOp::Gt,
        };
        let rhs = if self.pct(60) {
            let num = self.rng.random_range(0..=4i64);
            let den = self.rng.random_range(1..=4i64);
            Term::Const(ratio(num, den))
        } else {
            self.term(self.opts.term_depth.saturating_sub(1), 0)
        };
        Formula::Cmp(lhs, op, rhs)
    }

    fn formula(&mut self) -> Formula {
        let mut f = self.comparison();
        for _ in 0..self.rng.random_range(0..3u32) {
            let g = self.comparison();
            f = match self.rng.random_range(0..3) {
                0 => Formula::And(Box::new(f), Box::new(g)),
                1 => Formula::Or(Box::new(f), Box::new(g)),
                _ => Formula::And(Box::new(f), Box::new(Formula::Not(Box::new(g)))),
            };
        }
        f
    }
}

/// A closed random term shaped by `opts`, deterministic in `seed`.
pub fn random_term(seed: u64, ctx: &LangContext, opts: &GenOptions) -> Term {
    Gen::new(seed, ctx, opts.clone()).term(opts.term_depth, opts.max_sum_nesting)
}

/// A closed random formula shaped by `opts`, deterministic in `seed`.
pub fn random_formula(seed: u64, ctx: &LangContext, opts: &GenOptions) -> Formula {
    Gen::new(seed, ctx, opts.clone()).formula()
}

/// The fixed family of observational base-arithmetic formulas over two
/// binary variables used by the bounded-solver suites: every pairing of a
/// small event list with comparison shapes, plus Boolean combinations.
pub fn micro_formula_family(ctx: &LangContext) -> Vec<Formula> {
    assert!(ctx.vars().len() == 2 && ctx.domain().cardinality() == 2);
    let x = ctx.vars()[0].clone();
    let y = ctx.vars()[1].clone();
    let atom = |var: &str, v: u32| PropEvent::Atom {
        var: var.to_string(),
        value: ValueExpr::Lit(v),
    };
    let events: Vec<PropEvent> = vec![
        atom(&x, 0),
        atom(&y, 1),
        PropEvent::And(Box::new(atom(&x, 0)), Box::new(atom(&y, 1))),
        PropEvent::Or(Box::new(atom(&x, 1)), Box::new(atom(&y, 0))),
        PropEvent::Not(Box::new(atom(&x, 1))),
        PropEvent::And(
            Box::new(PropEvent::Or(Box::new(atom(&x, 0)), Box::new(atom(&y, 1)))),
            Box::new(PropEvent::Or(Box::new(atom(&x, 0)), Box::new(atom(&y, 0)))),
        ),
    ];
    let constants = [ratio(0, 1), ratio(1, 4), ratio(1, 2), Rational::one()];
    let ops = [CmpOp::Eq, CmpOp::Le, CmpOp::Gt];
    let prob = |e: &PropEvent| Term::Prob(CfEvent::observational(e.clone()));

    let mut atoms = Vec::new();
    for e in &events {
        for k in &constants {
            for op in ops {
                atoms.push(Formula::Cmp(prob(e), op, Term::Const(k.clone())));
            }
        }
    }
    let mut family = atoms.clone();
    // Boolean combinations of consecutive atoms keep the family small but
    // cover conjunction, disjunction, and negation shapes.
    for pair in atoms.chunks(2) {
        if let [a, b] = pair {
            family.push(Formula::And(Box::new(a.clone()), Box::new(b.clone())));
            family.push(Formula::Or(
                Box::new(a.clone()),
                Box::new(Formula::Not(Box::new(b.clone()))),
            ));
        }
    }
    family
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{term_value, EvalOptions};
    use crate::rational::ratio;

    #[test]
    fn example_model_reproduces_hidden_table() {
        let scm = vaccination_scm();
        assert!(scm.validate().is_empty());
        assert_eq!(scm.count_support_u(), 8);
        assert_eq!(scm.exo().prob(&[0, 0, 0]), ratio(474, 10000));
        assert_eq!(scm.exo().prob(&[1, 0, 1]), ratio(2844, 10000));
        // the induced outcomes of the eight hidden rows
        let rows: [([u32; 3], [u32; 3]); 8] = [
            ([0, 0, 0], [0, 1, 0]),
            ([0, 0, 1], [0, 1, 1]),
            ([0, 1, 0], [0, 0, 1]),
            ([0, 1, 1], [0, 0, 0]),
            ([1, 0, 0], [1, 0, 1]),
            ([1, 0, 1], [1, 0, 0]),
            ([1, 1, 0], [1, 1, 1]),
            ([1, 1, 1], [1, 1, 1]),
        ];
        for (u, zxy) in rows {
            assert_eq!(scm.evaluate(&u), zxy.to_vec(), "outcome of u = {u:?}");
        }
    }

    #[test]
    fn generated_terms_are_closed_and_deterministic() {
        let ctx = vaccination_ctx();
        let opts = GenOptions::default();
        for seed in 0..50 {
            let t = random_term(seed, &ctx, &opts);
            assert!(t.free_dummies().is_empty(), "open term from seed {seed}");
            assert_eq!(t, random_term(seed, &ctx, &opts));
            // every generated term survives evaluation on the example model
            let out = term_value(&vaccination_scm(), &t, &EvalOptions::default());
            assert!(out.is_ok(), "seed {seed}: {out:?}");
        }
    }

    #[test]
    fn generated_formulas_respect_the_layer_cap() {
        let ctx = vaccination_ctx();
        let opts = GenOptions {
            max_layer: 2,
            arithmetic: Arithmetic::Lin,
            max_sum_nesting: 1,
            allow_cond: false,
            term_depth: 2,
        };
        for seed in 0..50 {
            let f = random_formula(seed, &ctx, &opts);
            let c = f.classify();
            assert!(c.layer <= 2, "seed {seed} produced layer {}", c.layer);
            assert!(c.arithmetic <= Arithmetic::Lin);
            assert!(!c.uses_cond);
            assert!(f.is_closed());
        }
    }

    #[test]
    fn wider_domains_work_end_to_end() {
        use crate::lang::LangContext;
        use crate::lang::parse_term;
        use num::{One, Zero};
        let scm = Scm::random(5, 2, 3, 3, None);
        assert!(scm.validate().is_empty());
        let total: Rational = scm
            .joint_distribution()
            .entries()
            .map(|(_, p)| p.clone())
            .sum();
        assert!(total.is_one());
        let ctx = LangContext::new(scm.vars().to_vec(), scm.domain()).unwrap();
        let t = parse_term("(sum v . P(X1=v)) - 1", &ctx).unwrap();
        match term_value(&scm, &t, &EvalOptions::default()).unwrap() {
            crate::eval::EvalOutcome::Value(v) => assert!(v.is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn micro_family_is_large_and_observational() {
        let ctx = LangContext::new(vec!["X".into(), "Y".into()], Domain::binary()).unwrap();
        let family = micro_formula_family(&ctx);
        assert!(family.len() >= 100, "family has {} formulas", family.len());
        for f in &family {
            let c = f.classify();
            assert_eq!(c.layer, 1);
            assert_eq!(c.arithmetic, Arithmetic::Base);
        }
    }
}
