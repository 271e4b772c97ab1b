//! Concrete syntax: parsing and printing of terms, kinds, arities and
//! context files.
//!
//! ```text
//! term  ::= ident | "\" ident ":" kind "." term | term term | "(" term ")"
//! kind  ::= "Type" | "El" "(" term ")" | "(" ident ":" kind ")" kind
//!         | kind term | "(" kind ")" term | "(" kind ")" kind
//! arity ::= "0" | "(" arity "," arity ")"
//! ```
//!
//! `(K1)K2` abbreviates a product with an unused binder. A term written where
//! a kind is expected stands for `El` of that term, so `(A)Type` reads as
//! `(x:El(A))Type`. Comments run from `--` to the end of the line.

mod lexer;
mod parser;
mod printer;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Arity, ArityContext, Expr, Kind, Name, Term};

pub use parser::Parser;
pub use printer::{print, print_kind, print_term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Option<Arc<str>>,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}-{}", self.line, self.col_start, self.col_end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// Grammatical, but mixes terms and kinds illegally (e.g. `El(Type)`).
    IllFormed,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            kind: ParseErrorKind::Syntax,
            message: message.into(),
        }
    }

    pub(crate) fn ill_formed(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            kind: ParseErrorKind::IllFormed,
            message: message.into(),
        }
    }
}

/// Decides which identifiers denote declared constants.
pub trait Scope {
    fn is_constant(&self, name: &str) -> bool;
}

impl Scope for () {
    fn is_constant(&self, _: &str) -> bool {
        false
    }
}

impl Scope for HashSet<String> {
    fn is_constant(&self, name: &str) -> bool {
        self.contains(name)
    }
}

impl Scope for BTreeSet<Name> {
    fn is_constant(&self, name: &str) -> bool {
        self.contains(name)
    }
}

impl<S: Scope + ?Sized> Scope for &S {
    fn is_constant(&self, name: &str) -> bool {
        (**self).is_constant(name)
    }
}

/// Parses a complete term or kind.
pub fn parse_expr(src: &str, scope: &dyn Scope) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, None)?;
    let e = p.expr(scope)?;
    p.eat_optional_semi();
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_term(src: &str, scope: &dyn Scope) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, None)?;
    let t = p.term(scope)?;
    p.eat_optional_semi();
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_kind(src: &str, scope: &dyn Scope) -> Result<Kind, ParseError> {
    let mut p = Parser::new(src, None)?;
    let k = p.kind(scope)?;
    p.eat_optional_semi();
    p.expect_eof()?;
    Ok(k)
}

pub fn parse_arity(src: &str) -> Result<Arity, ParseError> {
    let mut p = Parser::new(src, None)?;
    let a = p.arity()?;
    p.expect_eof()?;
    Ok(a)
}

/// `x : arity` bindings separated by commas, semicolons or whitespace,
/// optionally enclosed in `<` `>` as printed.
pub fn parse_arity_context(src: &str) -> Result<ArityContext, ParseError> {
    let mut p = Parser::new(src, None)?;
    let ctx = if p.eat(&lexer::Tok::LAngle) {
        p.arity_bindings(Some(lexer::Tok::RAngle))?
    } else {
        p.arity_bindings(None)?
    };
    p.expect_eof()?;
    Ok(ctx)
}

/// Lines of the form `assume x : K ;`.
pub fn parse_type_context(src: &str, scope: &dyn Scope) -> Result<Vec<(Name, Kind)>, ParseError> {
    let mut p = Parser::new(src, None)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        p.expect_keyword("assume")?;
        let name = p.ident()?;
        p.expect(&lexer::Tok::Colon)?;
        let k = p.kind(scope)?;
        p.expect(&lexer::Tok::Semi)?;
        out.push((Arc::from(name.as_str()), k));
    }
    Ok(out)
}
