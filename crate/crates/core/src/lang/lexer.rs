//! Tokenizer for the formula language. Tracks line/column for diagnostics;
//! `#` starts a comment running to end of line.

use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    AndAnd,
    OrOr,
    Pipe,
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
    KwAnd,
    KwOr,
    KwNot,
    KwSum,
    KwProb,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Bang => "`!`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::KwAnd => "`AND`".into(),
            Tok::KwOr => "`OR`".into(),
            Tok::KwNot => "`NOT`".into(),
            Tok::KwSum => "`sum`".into(),
            Tok::KwProb => "`P`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: u32,
    pub col: u32,
}

pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

/// Names with a fixed meaning in the grammar; not usable as variables or
/// dummies.
pub const RESERVED: &[&str] = &["P", "sum", "AND", "OR", "NOT"];

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $pos:expr) => {
            out.push(Spanned { tok: $tok, pos: $pos })
        };
    }

    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' | ')' | '[' | ']' | ',' | '.' | '+' | '-' | '*' | '/' | '=' => {
                chars.next();
                col += 1;
                let tok = match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    _ => Tok::Eq,
                };
                push!(tok, pos);
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ne, pos);
                } else {
                    push!(Tok::Bang, pos);
                }
            }
            '&' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'&') {
                    chars.next();
                    col += 1;
                    push!(Tok::AndAnd, pos);
                } else {
                    return Err(ParseError::at(pos, "expected `&&`".into()));
                }
            }
            '|' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'|') {
                    chars.next();
                    col += 1;
                    push!(Tok::OrOr, pos);
                } else {
                    push!(Tok::Pipe, pos);
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Le, pos);
                } else {
                    push!(Tok::Lt, pos);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ge, pos);
                } else {
                    push!(Tok::Gt, pos);
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                // a dot is part of the number only when digits follow;
                // otherwise it belongs to a `sum x . t` binder
                if chars.peek() == Some(&'.') {
                    let mut look = chars.clone();
                    look.next();
                    if look.peek().is_some_and(|c| c.is_ascii_digit()) {
                        s.push('.');
                        chars.next();
                        col += 1;
                        while let Some(&c) = chars.peek() {
                            if c.is_ascii_digit() {
                                s.push(c);
                                chars.next();
                                col += 1;
                            } else {
                                break;
                            }
                        }
                    }
                }
                push!(Tok::Number(s), pos);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match s.as_str() {
                    "AND" => Tok::KwAnd,
                    "OR" => Tok::KwOr,
                    "NOT" => Tok::KwNot,
                    "sum" => Tok::KwSum,
                    "P" => Tok::KwProb,
                    _ => Tok::Ident(s),
                };
                push!(tok, pos);
            }
            other => {
                return Err(ParseError::at(pos, format!("unexpected character `{other}`")));
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
