//! Shared fixtures for the benchmark suite.

use pchsat_core::corpus::{vaccination_ctx, vaccination_scm};
use pchsat_core::lang::{parse_formula, parse_term, Formula, LangContext, Term};
use pchsat_core::Scm;

pub fn example_model() -> Scm {
    vaccination_scm()
}

pub fn example_ctx() -> LangContext {
    vaccination_ctx()
}

/// The counterfactual workhorse query of the worked example.
pub fn counterfactual_query() -> Term {
    parse_term("P([X=1](Y=1) | X=0 && Y=0)", &example_ctx()).unwrap()
}

/// A three-binder marginalization identity.
pub fn nested_sum_formula() -> Formula {
    parse_formula(
        "sum a . sum b . sum d . P(Z=a && X=b && Y=d) = 1",
        &example_ctx(),
    )
    .unwrap()
}

/// A Boolean pinning formula solved at support bound one.
pub fn pinning_formula(ctx: &LangContext) -> Formula {
    parse_formula(
        "P((X=0 || Y=1) && (X=0 || Y=0)) = 1 AND (P(X=0) = 0 OR P(X=0) = 1) AND (P(Y=0) = 0 OR P(Y=0) = 1)",
        ctx,
    )
    .unwrap()
}
