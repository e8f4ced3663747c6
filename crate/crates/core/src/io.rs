//! Canonical JSON file formats for models, joint tables, and DAGs.
//!
//! Every document carries a `"type"` discriminator (`"scm"`, `"bn"`,
//! `"joint"`, `"dag"`). Probabilities are strings, either `"num/den"` or a
//! finite decimal, both read exactly. Serialization is canonical: fixed key
//! order, support rows and table entries sorted by assignment, rationals in
//! lowest terms, two-space indentation, trailing newline — so a canonical
//! file round-trips byte-identically.

use crate::model::{
    Bn, Cpt, Dag, Domain, ExoMode, ExoVar, ExogenousSpec, JointTable, Mechanism, ModelError, Scm,
};
use crate::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};

/// Any of the three model documents accepted where a model is expected.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Scm(Scm),
    Bn(Bn),
    Joint(JointTable),
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Schema(String),
}

// ── document shapes ───────────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum ModelDoc {
    #[serde(rename = "scm")]
    Scm(ScmDoc),
    #[serde(rename = "bn")]
    Bn(BnDoc),
    #[serde(rename = "joint")]
    Joint(JointDoc),
}

#[derive(Serialize, Deserialize)]
struct ScmDoc {
    domain: u32,
    variables: Vec<String>,
    mechanisms: Vec<MechanismDoc>,
    exogenous: ExoDoc,
}

#[derive(Serialize, Deserialize)]
struct MechanismDoc {
    target: String,
    parents: Vec<String>,
    exo_args: Vec<String>,
    table: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ExoDoc {
    mode: String,
    variables: Vec<ExoVarDoc>,
    support: Vec<SupportRowDoc>,
}

#[derive(Serialize, Deserialize)]
struct ExoVarDoc {
    name: String,
    card: u32,
}

#[derive(Serialize, Deserialize)]
struct SupportRowDoc {
    u: Vec<u32>,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct BnDoc {
    domain: u32,
    variables: Vec<String>,
    edges: Vec<(String, String)>,
    cpts: Vec<CptDoc>,
}

#[derive(Serialize, Deserialize)]
struct CptDoc {
    target: String,
    parents: Vec<String>,
    rows: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct JointDoc {
    domain: u32,
    variables: Vec<String>,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    x: Vec<u32>,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct DagDoc {
    #[serde(rename = "type")]
    kind: String,
    variables: Vec<String>,
    edges: Vec<(String, String)>,
}

fn prob(text: &str) -> Result<Rational, IoError> {
    parse_rational(text).map_err(|e| IoError::Schema(e.to_string()))
}

// ── parsing ───────────────────────────────────────────────────────────

/// Parse a model document of any supported `"type"` and validate it.
pub fn parse_model(text: &str) -> Result<ModelFile, IoError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    match doc {
        ModelDoc::Scm(d) => Ok(ModelFile::Scm(scm_from_doc(d)?)),
        ModelDoc::Bn(d) => Ok(ModelFile::Bn(bn_from_doc(d)?)),
        ModelDoc::Joint(d) => Ok(ModelFile::Joint(joint_from_doc(d)?)),
    }
}

/// Parse a `"type": "dag"` document.
pub fn parse_dag(text: &str) -> Result<Dag, IoError> {
    let doc: DagDoc = serde_json::from_str(text)?;
    if doc.kind != "dag" {
        return Err(IoError::Schema(format!(
            "expected \"type\": \"dag\", got {:?}",
            doc.kind
        )));
    }
    Ok(Dag::new(doc.variables, &doc.edges)?)
}

fn scm_from_doc(d: ScmDoc) -> Result<Scm, IoError> {
    let domain = Domain::new(d.domain)?;
    let mode = match d.exogenous.mode.as_str() {
        "semi-markovian" => ExoMode::SemiMarkovian,
        "markovian" => ExoMode::Markovian,
        other => {
            return Err(IoError::Schema(format!(
                "unknown exogenous mode {other:?} (expected \"semi-markovian\" or \"markovian\")"
            )))
        }
    };
    let support = d
        .exogenous
        .support
        .into_iter()
        .map(|row| Ok((row.u, prob(&row.prob)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    let exo = ExogenousSpec {
        mode,
        vars: d
            .exogenous
            .variables
            .into_iter()
            .map(|v| ExoVar { name: v.name, card: v.card })
            .collect(),
        support,
    };
    let mechanisms = d
        .mechanisms
        .into_iter()
        .map(|m| Mechanism {
            target: m.target,
            parents: m.parents,
            exo_args: m.exo_args,
            table: m.table,
        })
        .collect();
    Ok(Scm::new(domain, d.variables, mechanisms, exo)?)
}

fn bn_from_doc(d: BnDoc) -> Result<Bn, IoError> {
    let domain = Domain::new(d.domain)?;
    let dag = Dag::new(d.variables, &d.edges)?;
    let cpts = d
        .cpts
        .into_iter()
        .map(|t| {
            let rows = t
                .rows
                .into_iter()
                .map(|row| row.iter().map(|p| prob(p)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Cpt {
                target: t.target,
                parents: t.parents,
                rows,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Bn::new(dag, domain, cpts)?)
}

fn joint_from_doc(d: JointDoc) -> Result<JointTable, IoError> {
    let domain = Domain::new(d.domain)?;
    let entries = d
        .entries
        .into_iter()
        .map(|e| Ok((e.x, prob(&e.prob)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(JointTable::new(domain, d.variables, entries)?)
}

// ── serialization ─────────────────────────────────────────────────────

fn pretty(doc: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serialization cannot fail");
    s.push('\n');
    s
}

pub fn scm_to_json(scm: &Scm) -> String {
    let doc = ModelDoc::Scm(ScmDoc {
        domain: scm.domain().cardinality(),
        variables: scm.vars().to_vec(),
        mechanisms: scm
            .mechanisms()
            .iter()
            .map(|m| MechanismDoc {
                target: m.target.clone(),
                parents: m.parents.clone(),
                exo_args: m.exo_args.clone(),
                table: m.table.clone(),
            })
            .collect(),
        exogenous: ExoDoc {
            mode: match scm.exo().mode {
                ExoMode::SemiMarkovian => "semi-markovian".to_string(),
                ExoMode::Markovian => "markovian".to_string(),
            },
            variables: scm
                .exo()
                .vars
                .iter()
                .map(|v| ExoVarDoc {
                    name: v.name.clone(),
                    card: v.card,
                })
                .collect(),
            support: scm
                .exo()
                .support
                .iter()
                .map(|(u, p)| SupportRowDoc {
                    u: u.clone(),
                    prob: format_rational(p),
                })
                .collect(),
        },
    });
    pretty(&doc)
}

pub fn bn_to_json(bn: &Bn) -> String {
    let doc = ModelDoc::Bn(BnDoc {
        domain: bn.domain().cardinality(),
        variables: bn.dag().vars().to_vec(),
        edges: bn
            .dag()
            .edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        cpts: bn
            .cpts()
            .iter()
            .map(|t| CptDoc {
                target: t.target.clone(),
                parents: t.parents.clone(),
                rows: t
                    .rows
                    .iter()
                    .map(|row| row.iter().map(format_rational).collect())
                    .collect(),
            })
            .collect(),
    });
    pretty(&doc)
}

pub fn joint_to_json(jt: &JointTable) -> String {
    let doc = ModelDoc::Joint(JointDoc {
        domain: jt.domain().cardinality(),
        variables: jt.vars().to_vec(),
        entries: jt
            .entries()
            .map(|(x, p)| EntryDoc {
                x: x.to_vec(),
                prob: format_rational(p),
            })
            .collect(),
    });
    pretty(&doc)
}

pub fn dag_to_json(dag: &Dag) -> String {
    let doc = DagDoc {
        kind: "dag".to_string(),
        variables: dag.vars().to_vec(),
        edges: dag
            .edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    pretty(&doc)
}

pub fn model_to_json(model: &ModelFile) -> String {
    match model {
        ModelFile::Scm(m) => scm_to_json(m),
        ModelFile::Bn(m) => bn_to_json(m),
        ModelFile::Joint(m) => joint_to_json(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn scm_json_round_trips_byte_identically() {
        let scm = Scm::random(3, 2, 2, 2, None);
        let text = scm_to_json(&scm);
        let back = match parse_model(&text).unwrap() {
            ModelFile::Scm(m) => m,
            _ => panic!("expected scm"),
        };
        assert_eq!(back, scm);
        assert_eq!(scm_to_json(&back), text);
    }

    #[test]
    fn decimal_probabilities_parse_exactly() {
        let text = r#"{
            "type": "joint",
            "domain": 2,
            "variables": ["X"],
            "entries": [
                {"x": [0], "prob": "0.25"},
                {"x": [1], "prob": "3/4"}
            ]
        }"#;
        let jt = match parse_model(text).unwrap() {
            ModelFile::Joint(t) => t,
            _ => panic!("expected joint"),
        };
        assert_eq!(jt.prob(&[0]), ratio(1, 4));
        let canonical = joint_to_json(&jt);
        assert!(canonical.contains("\"1/4\""));
        assert_eq!(joint_to_json(&match parse_model(&canonical).unwrap() {
            ModelFile::Joint(t) => t,
            _ => unreachable!(),
        }), canonical);
    }

    #[test]
    fn invalid_models_are_rejected_at_parse() {
        let text = r#"{
            "type": "joint",
            "domain": 2,
            "variables": ["X"],
            "entries": [{"x": [0], "prob": "9999/10000"}]
        }"#;
        assert!(matches!(parse_model(text), Err(IoError::Model(_))));
        assert!(matches!(parse_model("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn dag_document_round_trips() {
        let dag = Dag::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            &[("X", "Y"), ("X", "Z")],
        )
        .unwrap();
        let text = dag_to_json(&dag);
        let back = parse_dag(&text).unwrap();
        assert_eq!(back, dag);
        assert_eq!(dag_to_json(&back), text);
        assert!(parse_dag(r#"{"type":"scm","variables":[],"edges":[]}"#).is_err());
    }
}
