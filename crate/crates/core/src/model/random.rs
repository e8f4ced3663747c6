//! Deterministic random model generation for test corpora.

use super::{Dag, Domain, ExoMode, ExoVar, ExogenousSpec, Mechanism, Scm};
use crate::rational::Rational;
use num::BigInt;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

impl Scm {
    /// A seeded random model: one joint exogenous variable with exactly `p`
    /// support points, and a full response table per endogenous variable and
    /// support point.
    ///
    /// When `dag` is given its variable list is used (`n` must match) and
    /// every mechanism's parents are exactly its DAG parents, listed in the
    /// DAG's topological order. Without a DAG, variables are named
    /// `X1..Xn` and each mechanism reads all earlier variables.
    ///
    /// Deterministic in `seed`: equal arguments produce structurally equal
    /// models.
    pub fn random(seed: u64, n: usize, c: u32, p: usize, dag: Option<&Dag>) -> Scm {
        assert!(n >= 1 && c >= 1 && p >= 1, "n, c, p must be at least 1");
        if let Some(g) = dag {
            assert_eq!(g.vars().len(), n, "dag variable count must equal n");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let domain = Domain::new(c).expect("c >= 1");

        // declaration order is a topological order of the parent relation
        let (vars, parents_per_var): (Vec<String>, Vec<Vec<String>>) = match dag {
            Some(g) => {
                let order = g.topological_order();
                let vars: Vec<String> = order.iter().map(|&i| g.vars()[i].clone()).collect();
                let parents = vars
                    .iter()
                    .map(|v| g.parents_of(v).into_iter().map(String::from).collect())
                    .collect();
                (vars, parents)
            }
            None => {
                let vars: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
                let parents = (0..n).map(|i| vars[..i].to_vec()).collect();
                (vars, parents)
            }
        };

        let exo_var = ExoVar {
            name: "U".to_string(),
            card: p as u32,
        };
        let mut weights: Vec<u64> = (0..p).map(|_| rng.random_range(1..=9u64)).collect();
        let total: u64 = weights.iter().sum();
        let support: Vec<(Vec<u32>, Rational)> = weights
            .drain(..)
            .enumerate()
            .map(|(j, w)| {
                (
                    vec![j as u32],
                    Rational::new(BigInt::from(w), BigInt::from(total)),
                )
            })
            .collect();

        let mechanisms: Vec<Mechanism> = vars
            .iter()
            .zip(&parents_per_var)
            .map(|(target, parents)| {
                let rows = (c as usize).pow(parents.len() as u32) * p;
                Mechanism {
                    target: target.clone(),
                    parents: parents.clone(),
                    exo_args: vec!["U".to_string()],
                    table: (0..rows).map(|_| rng.random_range(0..c)).collect(),
                }
            })
            .collect();

        Scm::new(
            domain,
            vars,
            mechanisms,
            ExogenousSpec {
                mode: ExoMode::SemiMarkovian,
                vars: vec![exo_var],
                support,
            },
        )
        .expect("generated model is valid by construction")
    }
}
