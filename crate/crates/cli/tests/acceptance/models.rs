//! Hand-built four-variable models for the observation-insertion rule.

use pchsat_core::model::{Domain, ExoMode, ExoVar, ExogenousSpec, Mechanism, Scm};
use pchsat_core::rational::ratio;

/// Y responds to X only (through its own coin); Z and W are isolated fair
/// coins, so conditioning on Z adds nothing once W is given.
pub fn rule3_conforming() -> Scm {
    Scm::new(
        Domain::binary(),
        vec!["X".into(), "Y".into(), "Z".into(), "W".into()],
        vec![
            Mechanism {
                target: "X".into(),
                parents: vec![],
                exo_args: vec!["UX".into()],
                table: vec![0, 1],
            },
            Mechanism {
                // Y = X xor UY
                target: "Y".into(),
                parents: vec!["X".into()],
                exo_args: vec!["UY".into()],
                table: vec![0, 1, 1, 0],
            },
            Mechanism {
                target: "Z".into(),
                parents: vec![],
                exo_args: vec!["UZ".into()],
                table: vec![0, 1],
            },
            Mechanism {
                target: "W".into(),
                parents: vec![],
                exo_args: vec!["UW".into()],
                table: vec![0, 1],
            },
        ],
        ExogenousSpec {
            mode: ExoMode::Markovian,
            vars: vec![
                ExoVar { name: "UX".into(), card: 2 },
                ExoVar { name: "UY".into(), card: 2 },
                ExoVar { name: "UZ".into(), card: 2 },
                ExoVar { name: "UW".into(), card: 2 },
            ],
            support: (0..16u32)
                .map(|k| (vec![k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1], ratio(1, 16)))
                .collect(),
        },
    )
    .expect("conforming model is valid")
}

/// Y copies Z, so conditioning on Z pins Y exactly while conditioning on W
/// alone does not.
pub fn rule3_violating() -> Scm {
    Scm::new(
        Domain::binary(),
        vec!["X".into(), "Z".into(), "W".into(), "Y".into()],
        vec![
            Mechanism {
                target: "X".into(),
                parents: vec![],
                exo_args: vec!["UX".into()],
                table: vec![0, 1],
            },
            Mechanism {
                target: "Z".into(),
                parents: vec![],
                exo_args: vec!["UZ".into()],
                table: vec![0, 1],
            },
            Mechanism {
                target: "W".into(),
                parents: vec![],
                exo_args: vec!["UW".into()],
                table: vec![0, 1],
            },
            Mechanism {
                target: "Y".into(),
                parents: vec!["Z".into()],
                exo_args: vec![],
                table: vec![0, 1],
            },
        ],
        ExogenousSpec {
            mode: ExoMode::Markovian,
            vars: vec![
                ExoVar { name: "UX".into(), card: 2 },
                ExoVar { name: "UZ".into(), card: 2 },
                ExoVar { name: "UW".into(), card: 2 },
            ],
            support: (0..8u32)
                .map(|k| (vec![k >> 2 & 1, k >> 1 & 1, k & 1], ratio(1, 8)))
                .collect(),
        },
    )
    .expect("violating model is valid")
}
