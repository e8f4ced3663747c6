//! The query language: abstract syntax, concrete grammar, classifier.
//!
//! Concrete syntax in brief (the full grammar lives in `docs/grammar.md`):
//!
//! ```text
//! P([X=1](Y=1)) = 94/100
//! sum x . P(Y=1 && X=x) = P(Y=1)
//! P([X=1](Y=1) && [X=1](Y=0)) > 0
//! P([X=1](Y=1) | X=0 && Y=0) = 1
//! ```
//!
//! Events use `&&`, `||`, `!` (a comma inside `P(..)` is conjunction);
//! formulas use `AND`, `OR`, `NOT` and the comparisons `<= < = != >= >`.
//! `[ .. ]` prefixes an intervention; `[]` is the trivial one. `sum x . t`
//! sums `t` over all domain values of the dummy `x`. `#` starts a line
//! comment.

mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::{
    fresh_name, neq_event, Arithmetic, CfEvent, Classification, CmpOp, Formula, Intervention,
    PropEvent, Term, ValueExpr,
};
pub use lexer::RESERVED;
pub use parser::{parse_formula, parse_term, ContextError, LangContext, ParseError};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;
    use crate::rational::ratio;

    fn ctx() -> LangContext {
        LangContext::new(
            vec!["Z".into(), "X".into(), "Y".into()],
            Domain::binary(),
        )
        .unwrap()
    }

    fn atom(var: &str, v: u32) -> PropEvent {
        PropEvent::Atom {
            var: var.into(),
            value: ValueExpr::Lit(v),
        }
    }

    #[test]
    fn parses_interventional_comparison() {
        let f = parse_formula("P([X=1](Y=1)) = 94/100", &ctx()).unwrap();
        let expect = Formula::Cmp(
            Term::Prob(CfEvent::PostInt(
                Intervention(vec![("X".into(), ValueExpr::Lit(1))]),
                atom("Y", 1),
            )),
            CmpOp::Eq,
            Term::Const(ratio(94, 100)),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn parses_sum_with_trivial_intervention() {
        let t = parse_term("sum x . P([](Y=1 && X=x))", &ctx()).unwrap();
        let expect = Term::Sum(
            "x".into(),
            Box::new(Term::Prob(CfEvent::PostInt(
                Intervention::top(),
                PropEvent::And(
                    Box::new(atom("Y", 1)),
                    Box::new(PropEvent::Atom {
                        var: "X".into(),
                        value: ValueExpr::Dummy("x".into()),
                    }),
                ),
            ))),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn conjunction_of_bracketed_leaves_is_counterfactual() {
        let f = parse_formula("P([X=1](Y=1) && [X=1](Y=0)) > 0", &ctx()).unwrap();
        assert_eq!(f.classify().layer, 3);
        match f {
            Formula::Cmp(Term::Prob(CfEvent::And(a, b)), CmpOp::Gt, _) => {
                assert!(matches!(*a, CfEvent::PostInt(..)));
                assert!(matches!(*b, CfEvent::PostInt(..)));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn bare_connectives_stay_propositional() {
        let f = parse_formula("P(Y=1 && X=0) > 0", &ctx()).unwrap();
        assert_eq!(f.classify().layer, 1);
        match f {
            Formula::Cmp(Term::Prob(CfEvent::PostInt(i, PropEvent::And(..))), _, _) => {
                assert!(i.is_top());
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn comma_is_conjunction_inside_probabilities() {
        let a = parse_formula("P(Y=1, X=0) > 0", &ctx()).unwrap();
        let b = parse_formula("P(Y=1 && X=0) > 0", &ctx()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conditional_bar_parses() {
        let f = parse_formula("P([X=1](Y=1) | X=0 && Y=0) = 1", &ctx()).unwrap();
        match &f {
            Formula::Cmp(Term::CondProb(e, c), CmpOp::Eq, _) => {
                assert!(matches!(e, CfEvent::PostInt(i, _) if !i.is_top()));
                assert!(matches!(c, CfEvent::PostInt(i, _) if i.is_top()));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
        let cls = f.classify();
        assert!(cls.uses_cond);
        assert_eq!(cls.layer, 2);
    }

    #[test]
    fn round_trips_canonical_text() {
        let texts = [
            "P([X=1](Y=1)) = 94/100",
            "sum x . P([](Y=1 && X=x)) = P(Y=1)",
            "P([X=1](Y=1) && [X=1](Y=0)) > 0",
            "P(X=1) + P(X=0) = 1",
            "NOT (P(X=1) = 1 AND P(Y=0) > 0) OR P(Z=1) < 1/2",
            "sum x . sum y . P(X=x && Y=y) * P([Z=0](X=1)) = 0",
            "P(X=1 || !(Y=0) && Z=1) != 1/3",
            "-(1/2) + P(X=1) - (P(Y=1) + 1) <= -1/2 * P(Z=0)",
            "(sum x . P(X=x)) * 2 = 2",
            "P(!([X=1](Y=1))) = P([](Y=0) || [X=0](Y=1))",
        ];
        let ctx = ctx();
        for text in texts {
            let f = parse_formula(text, &ctx).unwrap();
            let printed = f.to_string();
            let again = parse_formula(&printed, &ctx)
                .unwrap_or_else(|e| panic!("reparse of {printed:?}: {e}"));
            assert_eq!(again, f, "round trip of {text:?} via {printed:?}");
        }
    }

    #[test]
    fn classify_three_fragments() {
        let ctx = ctx();
        let c = parse_formula("P(X=1) + P(X=0) = 1", &ctx).unwrap().classify();
        assert_eq!(
            (c.layer, c.arithmetic, c.uses_sum),
            (1, Arithmetic::Lin, false)
        );
        let c = parse_formula("P([X=1](Y=1)) = 94/100", &ctx).unwrap().classify();
        assert_eq!((c.layer, c.arithmetic), (2, Arithmetic::Base));
        let c = parse_formula("sum x . P([X=1](Y=1) && [](X=x)) * P(X=0) = 0", &ctx)
            .unwrap()
            .classify();
        assert_eq!(
            (c.layer, c.arithmetic, c.uses_sum),
            (3, Arithmetic::Poly, true)
        );
    }

    #[test]
    fn error_positions_and_messages() {
        let ctx = ctx();
        let e = parse_formula("P(W=1) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("undeclared variable `W`"));
        assert_eq!((e.line, e.col), (1, 3));

        let e = parse_formula("P(X=x) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("not bound"));

        let e = parse_formula("sum X . P(Y=1) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("shadows a declared variable"));

        let e = parse_formula("sum x . sum x . P(Y=x) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("already bound"));

        let e = parse_formula("P(X=7) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("outside the domain"));

        let e = parse_formula("P(X=1 &&& Y=1) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("expected"));

        let e = parse_formula("\n  P(X=1) =", &ctx).unwrap_err();
        assert_eq!(e.line, 2);

        let e = parse_formula("P([X=1, X=0](Y=1)) = 1", &ctx).unwrap_err();
        assert!(e.message.contains("intervened twice"));
    }

    #[test]
    fn depth_limit_is_enforced() {
        let ctx = ctx().with_max_depth(8);
        let deep = format!("{}P(X=1){} = 1", "(".repeat(20), ")".repeat(20));
        let e = parse_formula(&deep, &ctx).unwrap_err();
        assert!(e.message.contains("nesting deeper"));
        assert!(parse_formula("((P(X=1))) = 1", &ctx).is_ok());
    }

    #[test]
    fn comments_and_whitespace_are_skipped() {
        let text = "# compares a probability\nP(X=1) <= 1/2 # trailing note\n";
        assert!(parse_formula(text, &ctx()).is_ok());
    }

    #[test]
    fn reserved_names_rejected_in_context() {
        assert!(LangContext::new(vec!["P".into()], Domain::binary()).is_err());
        assert!(LangContext::new(vec!["sum".into()], Domain::binary()).is_err());
        assert!(LangContext::new(vec!["X".into(), "X".into()], Domain::binary()).is_err());
    }
}
