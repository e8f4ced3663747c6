//! Exact reasoning over structural causal models at desk scale.
//!
//! The crate covers the full pipeline from concrete syntax to bounded-model
//! search:
//!
//! - [`model`] — structural causal models (SCMs), Bayesian networks, DAGs,
//!   and exact joint distributions over finite domains, all with
//!   arbitrary-precision rational probabilities.
//! - [`lang`] — the three-layer query language (observational,
//!   interventional, counterfactual) with basic/linear/polynomial arithmetic
//!   and a compact marginalization operator, plus parser, canonical printer,
//!   and classifier.
//! - [`eval`] — exact satisfaction and term semantics against SCMs and BNs,
//!   with three-valued handling of zero-probability conditionals.
//! - [`transform`] — formula/model reductions: sum expansion, complete-DAG
//!   reduction, causal-ordering encoding, DAG constraints as counterfactual
//!   formulas, and the compact observation-insertion rule.
//! - [`solve`] — bounded-model satisfiability and validity over canonical
//!   response-function structures with a support-size bound, backed by an
//!   exact rational simplex for linear residuals, a naive search for
//!   polynomial residuals, and an SMT-LIB exporter.
//! - [`io`] — canonical JSON file formats for models, tables, and DAGs.
//! - [`corpus`] — deterministic generators for test corpora and the worked
//!   vaccination example model.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

pub mod corpus;
pub mod eval;
pub mod io;
pub mod lang;
pub mod model;
pub mod rational;
pub mod solve;
pub mod transform;

pub use model::{Bn, Dag, Domain, ExoMode, ExogenousSpec, JointTable, Mechanism, Scm, Violation};
pub use rational::Rational;
