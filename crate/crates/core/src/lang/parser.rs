//! Recursive-descent parser for formulas and terms.
//!
//! Precedence, tightest first — events: `!`, then `&&` (`,` is the same
//! connective), then `||`; terms: `*`, then unary `-`, then `+`/`-`, with
//! `sum x . t` extending as far right as possible; formulas: comparisons,
//! then `NOT`, `AND`, `OR`. A `-` directly followed by a numeral is a
//! negative constant, so `-1/2 * P(X=1)` multiplies by `-1/2`.

use super::ast::{CfEvent, CmpOp, Formula, Intervention, PropEvent, Term, ValueExpr};
use super::lexer::{lex, Pos, Spanned, Tok, RESERVED};
use crate::model::Domain;
use crate::rational::{parse_rational, Rational};

/// Variable declarations and domain against which formulas are read.
#[derive(Debug, Clone)]
pub struct LangContext {
    vars: Vec<String>,
    domain: Domain,
    max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ContextError(String);

impl LangContext {
    pub const DEFAULT_MAX_DEPTH: usize = 128;

    pub fn new(vars: Vec<String>, domain: Domain) -> Result<LangContext, ContextError> {
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(ContextError(format!("invalid variable name `{v}`")));
            }
            if RESERVED.contains(&v.as_str()) {
                return Err(ContextError(format!("variable name `{v}` is reserved")));
            }
            if vars[..i].contains(v) {
                return Err(ContextError(format!("variable `{v}` declared twice")));
            }
        }
        Ok(LangContext {
            vars,
            domain,
            max_depth: Self::DEFAULT_MAX_DEPTH,
        })
    }

    /// Override the nesting-depth limit (default 128).
    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn declares(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A syntax or binding error with its source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(pos: Pos, message: String) -> ParseError {
        ParseError {
            line: pos.line,
            col: pos.col,
            message,
        }
    }
}

/// Parse a closed formula against the declared variables.
pub fn parse_formula(text: &str, ctx: &LangContext) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(tokens, ctx);
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parse a closed term against the declared variables.
pub fn parse_term(text: &str, ctx: &LangContext) -> Result<Term, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(tokens, ctx);
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Hybrid event during parsing: still purely propositional, or already
/// lifted to a counterfactual tree. Connectives over two propositional sides
/// stay propositional; any explicitly bracketed side lifts the connective to
/// the counterfactual level.
enum Ev {
    Prop(PropEvent),
    Cf(CfEvent),
}

impl Ev {
    fn lift(self) -> CfEvent {
        match self {
            Ev::Prop(p) => CfEvent::observational(p),
            Ev::Cf(e) => e,
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    idx: usize,
    ctx: &'a LangContext,
    dummies: Vec<String>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: Vec<Spanned>, ctx: &'a LangContext) -> Self {
        Parser {
            toks,
            idx: 0,
            ctx,
            dummies: Vec::new(),
            depth: 0,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.idx + 1).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    fn advance(&mut self) -> &Tok {
        let t = &self.toks[self.idx].tok;
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.advance();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {} after the end of the expression", self.peek().describe())))
        }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError::at(self.pos(), message)
    }

    fn descend<T>(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        self.depth += 1;
        if self.depth > self.ctx.max_depth {
            return Err(self.err(format!(
                "nesting deeper than the configured limit ({})",
                self.ctx.max_depth
            )));
        }
        let out = f(self);
        self.depth -= 1;
        out
    }

    // ── formulas ──────────────────────────────────────────────────────

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and_formula()?;
        while self.eat(&Tok::KwOr) {
            let rhs = self.and_formula()?;
            f = Formula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn and_formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.not_formula()?;
        while self.eat(&Tok::KwAnd) {
            let rhs = self.not_formula()?;
            f = Formula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn not_formula(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::KwNot) {
            let inner = self.descend(|p| p.not_formula())?;
            return Ok(Formula::Not(Box::new(inner)));
        }
        self.atom_formula()
    }

    /// A comparison, or a parenthesized formula. `(` is ambiguous between
    /// the two; the comparison reading is tried first with backtracking.
    fn atom_formula(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == &Tok::LParen {
            let save = (self.idx, self.dummies.len(), self.depth);
            match self.comparison() {
                Ok(f) => return Ok(f),
                Err(cmp_err) => {
                    self.idx = save.0;
                    self.dummies.truncate(save.1);
                    self.depth = save.2;
                    self.advance(); // `(`
                    match self.descend(|p| p.formula()).and_then(|f| {
                        self.expect(Tok::RParen)?;
                        Ok(f)
                    }) {
                        Ok(f) => return Ok(f),
                        Err(form_err) => {
                            // report whichever reading got further
                            let further = if (form_err.line, form_err.col)
                                >= (cmp_err.line, cmp_err.col)
                            {
                                form_err
                            } else {
                                cmp_err
                            };
                            return Err(further);
                        }
                    }
                }
            }
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Le => CmpOp::Le,
            Tok::Lt => CmpOp::Lt,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            other => {
                return Err(self.err(format!(
                    "expected a comparison operator, found {}",
                    other.describe()
                )))
            }
        };
        self.advance();
        let rhs = self.term()?;
        Ok(Formula::Cmp(lhs, op, rhs))
    }

    // ── terms ─────────────────────────────────────────────────────────

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::KwSum) {
            let pos = self.pos();
            let name = match self.advance().clone() {
                Tok::Ident(s) => s,
                other => {
                    return Err(ParseError::at(
                        pos,
                        format!("expected a dummy name after `sum`, found {}", other.describe()),
                    ))
                }
            };
            if self.ctx.declares(&name) {
                return Err(ParseError::at(
                    pos,
                    format!("dummy `{name}` shadows a declared variable"),
                ));
            }
            if self.dummies.contains(&name) {
                return Err(ParseError::at(
                    pos,
                    format!("dummy `{name}` is already bound by an enclosing sum"),
                ));
            }
            self.expect(Tok::Dot)?;
            self.dummies.push(name.clone());
            let body = self.descend(|p| p.term())?;
            self.dummies.pop();
            return Ok(Term::Sum(name, Box::new(body)));
        }
        self.addsub()
    }

    fn addsub(&mut self) -> Result<Term, ParseError> {
        let mut t = self.unary()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.unary()?;
                t = Term::Add(Box::new(t), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.unary()?;
                t = Term::Sub(Box::new(t), Box::new(rhs));
            } else {
                return Ok(t);
            }
        }
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if self.peek() == &Tok::Minus {
            if matches!(self.peek2(), Tok::Number(_)) {
                self.advance();
                let lit = self.number_literal()?;
                return self.product_from(Term::Const(-lit));
            }
            self.advance();
            let inner = self.descend(|p| p.unary())?;
            return Ok(Term::Neg(Box::new(inner)));
        }
        let first = self.factor()?;
        self.product_from(first)
    }

    fn product_from(&mut self, first: Term) -> Result<Term, ParseError> {
        let mut t = first;
        while self.eat(&Tok::Star) {
            let rhs = if self.peek() == &Tok::Minus && matches!(self.peek2(), Tok::Number(_)) {
                self.advance();
                Term::Const(-self.number_literal()?)
            } else {
                self.factor()?
            };
            t = Term::Mul(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Number(_) => Ok(Term::Const(self.number_literal()?)),
            Tok::KwProb => self.probability(),
            Tok::LParen => {
                self.advance();
                let t = self.descend(|p| p.term())?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.err(format!(
                "expected a probability, constant, or parenthesized term, found {}",
                other.describe()
            ))),
        }
    }

    /// A numeral, optionally over a `/` with a second numeral; there is no
    /// general division, so the slash always forms a rational constant.
    fn number_literal(&mut self) -> Result<Rational, ParseError> {
        let pos = self.pos();
        let first = match self.advance().clone() {
            Tok::Number(s) => s,
            other => {
                return Err(ParseError::at(
                    pos,
                    format!("expected a number, found {}", other.describe()),
                ))
            }
        };
        let text = if self.peek() == &Tok::Slash {
            if first.contains('.') {
                return Err(ParseError::at(pos, "fraction parts must be integers".into()));
            }
            self.advance();
            let dpos = self.pos();
            match self.advance().clone() {
                Tok::Number(s) if !s.contains('.') => format!("{first}/{s}"),
                Tok::Number(_) => {
                    return Err(ParseError::at(dpos, "fraction parts must be integers".into()))
                }
                other => {
                    return Err(ParseError::at(
                        dpos,
                        format!("expected a denominator, found {}", other.describe()),
                    ))
                }
            }
        } else {
            first
        };
        parse_rational(&text).map_err(|e| ParseError::at(pos, e.to_string()))
    }

    fn probability(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::KwProb)?;
        self.expect(Tok::LParen)?;
        let event = self.descend(|p| p.event())?.lift();
        let term = if self.eat(&Tok::Pipe) {
            let cond = self.descend(|p| p.event())?.lift();
            Term::CondProb(event, cond)
        } else {
            Term::Prob(event)
        };
        self.expect(Tok::RParen)?;
        Ok(term)
    }

    // ── events ────────────────────────────────────────────────────────

    fn event(&mut self) -> Result<Ev, ParseError> {
        let mut e = self.event_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.event_and()?;
            e = combine_or(e, rhs);
        }
        Ok(e)
    }

    fn event_and(&mut self) -> Result<Ev, ParseError> {
        let mut e = self.event_not()?;
        while self.peek() == &Tok::AndAnd || self.peek() == &Tok::Comma {
            self.advance();
            let rhs = self.event_not()?;
            e = combine_and(e, rhs);
        }
        Ok(e)
    }

    fn event_not(&mut self) -> Result<Ev, ParseError> {
        if self.eat(&Tok::Bang) {
            let inner = self.descend(|p| p.event_not())?;
            return Ok(match inner {
                Ev::Prop(p) => Ev::Prop(PropEvent::Not(Box::new(p))),
                Ev::Cf(e) => Ev::Cf(CfEvent::Not(Box::new(e))),
            });
        }
        self.event_primary()
    }

    fn event_primary(&mut self) -> Result<Ev, ParseError> {
        match self.peek() {
            Tok::LBracket => {
                let ints = self.intervention()?;
                self.expect(Tok::LParen)?;
                let p = self.descend(|p| p.prop_event())?;
                self.expect(Tok::RParen)?;
                Ok(Ev::Cf(CfEvent::PostInt(ints, p)))
            }
            Tok::LParen => {
                self.advance();
                let e = self.descend(|p| p.event())?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Ok(Ev::Prop(self.atom()?)),
        }
    }

    fn intervention(&mut self) -> Result<Intervention, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut items: Vec<(String, ValueExpr)> = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                let pos = self.pos();
                let (var, value) = self.assignment()?;
                if items.iter().any(|(v, _)| *v == var) {
                    return Err(ParseError::at(
                        pos,
                        format!("variable `{var}` intervened twice in one intervention"),
                    ));
                }
                items.push((var, value));
                if self.eat(&Tok::RBracket) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(Intervention(items))
    }

    /// Purely propositional events, used inside `[ι](...)`.
    fn prop_event(&mut self) -> Result<PropEvent, ParseError> {
        let mut e = self.prop_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.prop_and()?;
            e = PropEvent::Or(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn prop_and(&mut self) -> Result<PropEvent, ParseError> {
        let mut e = self.prop_not()?;
        while self.peek() == &Tok::AndAnd || self.peek() == &Tok::Comma {
            self.advance();
            let rhs = self.prop_not()?;
            e = PropEvent::And(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn prop_not(&mut self) -> Result<PropEvent, ParseError> {
        if self.eat(&Tok::Bang) {
            let inner = self.descend(|p| p.prop_not())?;
            return Ok(PropEvent::Not(Box::new(inner)));
        }
        if self.eat(&Tok::LParen) {
            let e = self.descend(|p| p.prop_event())?;
            self.expect(Tok::RParen)?;
            return Ok(e);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<PropEvent, ParseError> {
        let (var, value) = self.assignment()?;
        Ok(PropEvent::Atom { var, value })
    }

    fn assignment(&mut self) -> Result<(String, ValueExpr), ParseError> {
        let pos = self.pos();
        let var = match self.advance().clone() {
            Tok::Ident(s) => s,
            other => {
                return Err(ParseError::at(
                    pos,
                    format!("expected a variable name, found {}", other.describe()),
                ))
            }
        };
        if !self.ctx.declares(&var) {
            return Err(ParseError::at(pos, format!("undeclared variable `{var}`")));
        }
        self.expect(Tok::Eq)?;
        let vpos = self.pos();
        let value = match self.advance().clone() {
            Tok::Number(s) => {
                if s.contains('.') {
                    return Err(ParseError::at(vpos, "event values must be integers".into()));
                }
                let v: u32 = s
                    .parse()
                    .map_err(|_| ParseError::at(vpos, format!("value `{s}` is too large")))?;
                if !self.ctx.domain.contains(v) {
                    return Err(ParseError::at(
                        vpos,
                        format!(
                            "value {v} is outside the domain {{0..{}}}",
                            self.ctx.domain.cardinality()
                        ),
                    ));
                }
                ValueExpr::Lit(v)
            }
            Tok::Ident(d) => {
                if self.ctx.declares(&d) {
                    return Err(ParseError::at(
                        vpos,
                        format!("`{d}` is a declared variable, not a bound dummy"),
                    ));
                }
                if !self.dummies.contains(&d) {
                    return Err(ParseError::at(
                        vpos,
                        format!("dummy `{d}` is not bound by an enclosing sum"),
                    ));
                }
                ValueExpr::Dummy(d)
            }
            other => {
                return Err(ParseError::at(
                    vpos,
                    format!("expected a value or dummy, found {}", other.describe()),
                ))
            }
        };
        Ok((var, value))
    }
}

fn combine_and(l: Ev, r: Ev) -> Ev {
    match (l, r) {
        (Ev::Prop(a), Ev::Prop(b)) => Ev::Prop(PropEvent::And(Box::new(a), Box::new(b))),
        (a, b) => Ev::Cf(CfEvent::And(Box::new(a.lift()), Box::new(b.lift()))),
    }
}

fn combine_or(l: Ev, r: Ev) -> Ev {
    match (l, r) {
        (Ev::Prop(a), Ev::Prop(b)) => Ev::Prop(PropEvent::Or(Box::new(a), Box::new(b))),
        (a, b) => Ev::Cf(CfEvent::Or(Box::new(a.lift()), Box::new(b.lift()))),
    }
}
