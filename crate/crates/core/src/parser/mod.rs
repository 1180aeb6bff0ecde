//! The `.sos` specification language: declarations, rules and process terms.

mod grammar;
mod lexer;
mod resolve;

use std::fmt;

use thiserror::Error;

use crate::spec::{Pos, Spec};
use crate::terms::{Label, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    DuplicateDeclaration(String),
    UnknownSymbol(String),
    ArityMismatch { op: String, expected: usize, found: usize },
    UnboundVariable(String),
    Sort(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            ParseErrorKind::DuplicateDeclaration(n) => write!(f, "duplicate declaration of '{n}'"),
            ParseErrorKind::UnknownSymbol(n) => write!(f, "unknown symbol '{n}'"),
            ParseErrorKind::ArityMismatch { op, expected, found } => {
                write!(f, "operator '{op}' takes {expected} argument(s), found {found}")
            }
            ParseErrorKind::UnboundVariable(v) => write!(f, "variable '{v}' where a closed term is required"),
            ParseErrorKind::Sort(msg) => write!(f, "sort error: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        ParseError { kind, line: pos.line, column: pos.column }
    }

    pub fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.column }
    }
}

pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let toks = lexer::lex(text)?;
    let mut p = grammar::Parser::new(toks);
    let (name, decls) = p.spec()?;
    resolve::build_spec(name, decls)
}

/// Parse a process term over the declarations of `spec`. With `expect_closed`, any variable
/// is rejected as [`ParseErrorKind::UnboundVariable`].
pub fn parse_term(text: &str, spec: &Spec, expect_closed: bool) -> Result<Term, ParseError> {
    let toks = lexer::lex(text)?;
    let mut p = grammar::Parser::new(toks);
    let e = p.expr()?;
    p.expect_eof()?;
    resolve::Resolver::for_spec(spec, expect_closed).term(&e)
}

pub fn parse_label(text: &str, spec: &Spec) -> Result<Label, ParseError> {
    let toks = lexer::lex(text)?;
    let mut p = grammar::Parser::new(toks);
    let e = p.expr()?;
    p.expect_eof()?;
    resolve::Resolver::for_spec(spec, false).transition_label(&e)
}

#[cfg(test)]
mod tests;
