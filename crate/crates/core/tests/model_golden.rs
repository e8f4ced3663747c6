//! Golden-data checks for the worked vaccination model and property tests
//! for the model operations. All probability comparisons are exact rational
//! equalities.

use pchsat_core::corpus::vaccination_scm;
use pchsat_core::model::{Bn, Cpt, Dag, Domain, JointTable};
use pchsat_core::rational::{parse_rational, ratio, Rational};
use pchsat_core::Scm;
use proptest::prelude::*;

/// The seven-row observed distribution of the example, as decimal strings.
const OBSERVED: &[(&[u32; 3], &str)] = &[
    (&[0, 0, 0], "0.1134"),
    (&[0, 0, 1], "0.0126"),
    (&[0, 1, 0], "0.0474"),
    (&[0, 1, 1], "0.4266"),
    (&[1, 0, 0], "0.2844"),
    (&[1, 0, 1], "0.0316"),
    (&[1, 1, 1], "0.0840"),
];

#[test]
fn observational_distribution_matches_the_published_rows() {
    let jt = vaccination_scm().joint_distribution();
    assert_eq!(jt.support_size(), 7);
    for (assignment, text) in OBSERVED {
        let expect = parse_rational(text).unwrap();
        assert_eq!(jt.prob(*assignment), expect, "P(Z,X,Y = {assignment:?})");
    }
    // the eighth assignment has probability zero
    assert_eq!(jt.prob(&[1, 1, 0]), ratio(0, 1));
    assert_eq!(jt.prob(&[0, 1, 1]), ratio(4266, 10000));
}

#[test]
fn intervening_on_vaccination_matches_the_published_table() {
    let scm = vaccination_scm();
    let forced = scm.intervene(&[("X".to_string(), 1)]).unwrap();
    // the eight hidden rows under do(X=1)
    let expected: [([u32; 3], [u32; 3]); 8] = [
        ([0, 0, 0], [0, 1, 0]),
        ([0, 0, 1], [0, 1, 1]),
        ([0, 1, 0], [0, 1, 0]),
        ([0, 1, 1], [0, 1, 1]),
        ([1, 0, 0], [1, 1, 1]),
        ([1, 0, 1], [1, 1, 1]),
        ([1, 1, 0], [1, 1, 1]),
        ([1, 1, 1], [1, 1, 1]),
    ];
    for (u, zxy) in expected {
        assert_eq!(forced.evaluate(&u), zxy.to_vec(), "do(X=1) outcome of u = {u:?}");
    }
    // post-interventional distribution over (Z, Y)
    let marginal = forced
        .joint_distribution()
        .marginalize_away(&["X".to_string()])
        .unwrap();
    assert_eq!(marginal.prob(&[0, 0]), ratio(6, 100));
    assert_eq!(marginal.prob(&[0, 1]), ratio(54, 100));
    assert_eq!(marginal.prob(&[1, 0]), ratio(0, 1));
    assert_eq!(marginal.prob(&[1, 1]), ratio(40, 100));
}

#[test]
fn support_counts_for_the_example() {
    let scm = vaccination_scm();
    assert_eq!(scm.count_support_u(), 8);
    assert_eq!(scm.count_support_x(), 7);
    let lifted = scm.joint_distribution().lift_to_scm();
    assert_eq!(lifted.count_support_u(), 7);
    assert_eq!(lifted.joint_distribution(), scm.joint_distribution());
}

#[test]
fn example_model_validates_cleanly() {
    assert!(vaccination_scm().validate().is_empty());
}

#[test]
fn causal_diagram_of_the_example() {
    let dag = vaccination_scm().causal_diagram();
    assert_eq!(dag.edge_count(), 3);
    assert_eq!(dag.parents_of("Y"), vec!["Z", "X"]);
    assert_eq!(dag.parents_of("X"), vec!["Z"]);
}

/// Chain-rule oracle: build a BN over the order Z, X, Y whose CPTs are the
/// conditionals of the observed table, then check that multiplying the
/// factors back reproduces the table exactly.
#[test]
fn chain_rule_bn_reproduces_the_observed_table() {
    let jt = vaccination_scm().joint_distribution();
    let vars = jt.vars().to_vec();
    let dag = Dag::complete(vars.clone());
    let marginal = |fixed: &[(usize, u32)]| -> Rational {
        let mut total = ratio(0, 1);
        for (assignment, p) in jt.entries() {
            if fixed.iter().all(|&(i, v)| assignment[i] == v) {
                total += p.clone();
            }
        }
        total
    };
    // CPT rows by chain rule; zero-probability contexts get a uniform row
    let mut cpts = Vec::new();
    for (i, var) in vars.iter().enumerate() {
        let parents: Vec<String> = vars[..i].to_vec();
        let mut rows = Vec::new();
        for ctx in 0..(1u32 << i) {
            let parent_vals: Vec<(usize, u32)> = (0..i)
                .map(|j| (j, (ctx >> (i - 1 - j)) & 1))
                .collect();
            let ctx_mass = marginal(&parent_vals);
            let row: Vec<Rational> = (0..2u32)
                .map(|v| {
                    if ctx_mass == ratio(0, 1) {
                        ratio(1, 2)
                    } else {
                        let mut fixed = parent_vals.clone();
                        fixed.push((i, v));
                        marginal(&fixed) / ctx_mass.clone()
                    }
                })
                .collect();
            rows.push(row);
        }
        cpts.push(Cpt {
            target: var.clone(),
            parents,
            rows,
        });
    }
    let bn = Bn::new(dag, Domain::binary(), cpts).unwrap();
    assert_eq!(bn.joint_distribution(), jt);
}

// ── property tests over generated corpora ─────────────────────────────

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_distribution_sums_to_one(seed in 0u64..5000, n in 1usize..4, p in 1usize..5) {
        let scm = Scm::random(seed, n, 2, p, None);
        let total: Rational = scm.joint_distribution().entries().map(|(_, p)| p.clone()).sum();
        prop_assert_eq!(total, ratio(1, 1));
    }

    #[test]
    fn support_x_at_most_support_u(seed in 0u64..5000, n in 1usize..4, p in 1usize..6) {
        let scm = Scm::random(seed, n, 2, p, None);
        prop_assert!(scm.count_support_x() <= scm.count_support_u());
    }

    #[test]
    fn lift_round_trips_exactly(seed in 0u64..5000, n in 1usize..4, p in 1usize..5) {
        let jt = Scm::random(seed, n, 2, p, None).joint_distribution();
        let lifted = jt.lift_to_scm();
        prop_assert_eq!(lifted.joint_distribution(), jt.clone());
        prop_assert_eq!(lifted.count_support_u(), jt.support_size());
    }

    #[test]
    fn disjoint_interventions_commute(seed in 0u64..5000, a in 0u32..2, b in 0u32..2) {
        let scm = Scm::random(seed, 3, 2, 3, None);
        let first = ("X1".to_string(), a);
        let second = ("X3".to_string(), b);
        let ab = scm
            .intervene(std::slice::from_ref(&first))
            .unwrap()
            .intervene(std::slice::from_ref(&second))
            .unwrap();
        let ba = scm.intervene(&[second]).unwrap().intervene(&[first]).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn evaluation_is_pure(seed in 0u64..5000, u in 0u32..4) {
        let scm = Scm::random(seed, 2, 2, 4, None);
        let tuple = vec![u.min(scm.count_support_u() as u32 - 1)];
        prop_assert_eq!(scm.evaluate(&tuple), scm.evaluate(&tuple));
    }

    #[test]
    fn canonical_files_round_trip_byte_identically(seed in 0u64..5000) {
        let scm = Scm::random(seed, 2, 2, 3, None);
        let text = pchsat_core::io::scm_to_json(&scm);
        let back = match pchsat_core::io::parse_model(&text).unwrap() {
            pchsat_core::io::ModelFile::Scm(m) => m,
            _ => unreachable!(),
        };
        prop_assert_eq!(&back, &scm);
        prop_assert_eq!(pchsat_core::io::scm_to_json(&back), text);
    }

    #[test]
    fn marginalizing_everything_leaves_unit_mass(seed in 0u64..5000) {
        let jt = Scm::random(seed, 2, 2, 3, None).joint_distribution();
        let empty = jt.marginalize_away(&["X1".to_string(), "X2".to_string()]).unwrap();
        prop_assert_eq!(empty.prob(&[]), ratio(1, 1));
    }
}

#[test]
fn joint_table_rejects_mass_leaks() {
    let err = JointTable::new(
        Domain::binary(),
        vec!["X".into()],
        vec![(vec![0], ratio(9999, 10000))],
    );
    assert!(err.is_err());
}
