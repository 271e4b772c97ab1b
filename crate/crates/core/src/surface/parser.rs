use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, Scope, SourceSpan};
use crate::syntax::{Arity, ArityContext, Binder, Expr, Kind, Term};

/// Parse tree before terms and kinds are told apart.
#[derive(Clone, Debug)]
enum Raw {
    Ident(String, SourceSpan),
    Type(SourceSpan),
    El(Box<Raw>, SourceSpan),
    Lam(String, Box<Raw>, Box<Raw>, SourceSpan),
    /// Binder `None` is the `(K1)K2` abbreviation.
    Pi(Option<String>, Box<Raw>, Box<Raw>, SourceSpan),
    App(Box<Raw>, Box<Raw>, SourceSpan),
}

impl Raw {
    fn span(&self) -> &SourceSpan {
        match self {
            Raw::Ident(_, s)
            | Raw::Type(s)
            | Raw::El(_, s)
            | Raw::Lam(_, _, _, s)
            | Raw::Pi(_, _, _, s)
            | Raw::App(_, _, s) => s,
        }
    }

    /// Structural class: the head of an application decides.
    fn is_kind(&self) -> bool {
        match self {
            Raw::Ident(..) | Raw::Lam(..) => false,
            Raw::Type(_) | Raw::El(..) | Raw::Pi(..) => true,
            Raw::App(f, _, _) => f.is_kind(),
        }
    }
}

fn join(a: &SourceSpan, b: &SourceSpan) -> SourceSpan {
    SourceSpan {
        file: a.file.clone(),
        line: a.line,
        col_start: a.col_start,
        col_end: if b.line == a.line { b.col_end } else { a.col_end },
        start: a.start,
        end: b.end.max(a.end),
    }
}

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str, file: Option<&str>) -> Result<Self, ParseError> {
        let file: Option<Arc<str>> = file.map(Arc::from);
        Ok(Parser {
            tokens: lex(src, file.as_ref())?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<SourceSpan, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_optional_semi(&mut self) {
        self.eat(&Tok::Semi);
    }

    pub fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.peek_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "Type" && s != "El" => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn expect_semi(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Semi).map(|_| ())
    }

    pub fn expect_colon(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Colon).map(|_| ())
    }

    pub fn expect_arrow(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::LongArrow).map(|_| ())
    }

    pub fn expect_equals(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Equals).map(|_| ())
    }

    pub fn eat_bar(&mut self) -> bool {
        self.eat(&Tok::Bar)
    }

    pub fn peek_lbracket(&self) -> bool {
        matches!(self.peek(), Tok::LBracket)
    }

    pub fn peek_ident_then_lbracket(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::LBracket)
    }

    pub fn unexpected_here(&self, wanted: &str) -> ParseError {
        self.unexpected(wanted)
    }

    // ---- arities ----

    pub fn arity(&mut self) -> Result<Arity, ParseError> {
        match self.peek() {
            Tok::Zero => {
                self.bump();
                Ok(Arity::Zero)
            }
            Tok::LParen => {
                self.bump();
                let a = self.arity()?;
                self.expect(&Tok::Comma)?;
                let b = self.arity()?;
                self.expect(&Tok::RParen)?;
                Ok(Arity::pair(a, b))
            }
            _ => Err(self.unexpected("an arity")),
        }
    }

    /// Bindings `x : a`, separated by `,`/`;`, optionally closed by `close`.
    pub fn arity_bindings(&mut self, close: Option<Tok>) -> Result<ArityContext, ParseError> {
        let mut ctx = ArityContext::new();
        loop {
            if close.as_ref().is_some_and(|c| self.peek() == c) || self.at_eof() {
                break;
            }
            let name = self.ident()?;
            self.expect(&Tok::Colon)?;
            let a = self.arity()?;
            ctx.push(Arc::from(name.as_str()), a);
            if !(self.eat(&Tok::Comma) || self.eat(&Tok::Semi)) {
                if let Some(c) = &close {
                    if self.peek() != c {
                        return Err(self.unexpected(&c.describe()));
                    }
                }
            }
        }
        if let Some(c) = &close {
            self.expect(c)?;
        }
        Ok(ctx)
    }

    pub fn bracketed_arity_bindings(&mut self) -> Result<ArityContext, ParseError> {
        self.expect(&Tok::LBracket)?;
        self.arity_bindings(Some(Tok::RBracket))
    }

    // ---- terms and kinds ----

    pub fn expr(&mut self, scope: &dyn Scope) -> Result<Expr, ParseError> {
        let raw = self.raw_expr()?;
        Classifier {
            scope,
            bound: Vec::new(),
        }
        .expr(&raw)
    }

    pub fn term(&mut self, scope: &dyn Scope) -> Result<Term, ParseError> {
        let raw = self.raw_expr()?;
        Classifier {
            scope,
            bound: Vec::new(),
        }
        .term(&raw)
    }

    /// Terms in kind position are read as `El(..)`.
    pub fn kind(&mut self, scope: &dyn Scope) -> Result<Kind, ParseError> {
        let raw = self.raw_expr()?;
        Classifier {
            scope,
            bound: Vec::new(),
        }
        .kind(&raw)
    }

    fn raw_expr(&mut self) -> Result<Raw, ParseError> {
        if matches!(self.peek(), Tok::Backslash) {
            let start = self.bump().span;
            let name = self.ident()?;
            self.expect(&Tok::Colon)?;
            let ann = self.raw_app()?;
            self.expect(&Tok::Dot)?;
            let body = self.raw_expr()?;
            let span = join(&start, body.span());
            return Ok(Raw::Lam(name, Box::new(ann), Box::new(body), span));
        }
        self.raw_app()
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn is_binder_open(&self) -> bool {
        matches!(self.peek(), Tok::LParen)
            && matches!(self.peek_at(1), Tok::Ident(s) if s != "Type" && s != "El")
            && matches!(self.peek_at(2), Tok::Colon)
    }

    fn raw_app(&mut self) -> Result<Raw, ParseError> {
        if !self.starts_atom() {
            return Err(self.unexpected("a term or kind"));
        }
        let mut head = if self.is_binder_open() {
            return self.raw_pi();
        } else if matches!(self.peek(), Tok::LParen) {
            let inner = self.raw_group()?;
            // `(K1)K2`: only when what follows is itself a kind.
            if self.starts_atom() {
                let save = self.pos;
                if let Ok(rest) = self.raw_expr() {
                    if rest.is_kind() {
                        let span = join(inner.span(), rest.span());
                        return Ok(Raw::Pi(None, Box::new(inner), Box::new(rest), span));
                    }
                }
                self.pos = save;
            }
            inner
        } else {
            self.raw_atom()?
        };
        while self.starts_atom() {
            if self.is_binder_open() {
                let pi = self.raw_pi()?;
                let span = join(head.span(), pi.span());
                head = Raw::App(Box::new(head), Box::new(pi), span);
                break;
            }
            let arg = if matches!(self.peek(), Tok::LParen) {
                self.raw_group()?
            } else {
                self.raw_atom()?
            };
            let span = join(head.span(), arg.span());
            head = Raw::App(Box::new(head), Box::new(arg), span);
        }
        Ok(head)
    }

    fn raw_pi(&mut self) -> Result<Raw, ParseError> {
        let start = self.expect(&Tok::LParen)?;
        let name = self.ident()?;
        self.expect(&Tok::Colon)?;
        let dom = self.raw_expr()?;
        self.expect(&Tok::RParen)?;
        let cod = self.raw_expr()?;
        let span = join(&start, cod.span());
        Ok(Raw::Pi(Some(name), Box::new(dom), Box::new(cod), span))
    }

    fn raw_group(&mut self) -> Result<Raw, ParseError> {
        self.expect(&Tok::LParen)?;
        let inner = self.raw_expr()?;
        self.expect(&Tok::RParen)?;
        Ok(inner)
    }

    fn raw_atom(&mut self) -> Result<Raw, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "Type" => Ok(Raw::Type(self.bump().span)),
            Tok::Ident(s) if s == "El" => {
                let start = self.bump().span;
                self.expect(&Tok::LParen)?;
                let inner = self.raw_expr()?;
                let close = self.expect(&Tok::RParen)?;
                Ok(Raw::El(Box::new(inner), join(&start, &close)))
            }
            Tok::Ident(s) => Ok(Raw::Ident(s, self.bump().span)),
            Tok::LParen => self.raw_group(),
            _ => Err(self.unexpected("a term or kind")),
        }
    }
}

struct Classifier<'s> {
    scope: &'s dyn Scope,
    /// Innermost binder last; `None` for the unnamed `(K1)K2` binder.
    bound: Vec<Option<String>>,
}

impl Classifier<'_> {
    fn expr(&mut self, raw: &Raw) -> Result<Expr, ParseError> {
        if raw.is_kind() {
            self.kind(raw).map(Expr::Kind)
        } else {
            self.term(raw).map(Expr::Term)
        }
    }

    fn ident(&self, name: &str) -> Term {
        if let Some(i) = self.bound.iter().rev().position(|b| b.as_deref() == Some(name)) {
            Term::Bound(i)
        } else if self.scope.is_constant(name) {
            Term::Const(Arc::from(name))
        } else {
            Term::Free(Arc::from(name))
        }
    }

    fn term(&mut self, raw: &Raw) -> Result<Term, ParseError> {
        match raw {
            Raw::Ident(n, _) => Ok(self.ident(n)),
            Raw::Lam(x, ann, body, _) => {
                let k = self.kind(ann)?;
                self.bound.push(Some(x.clone()));
                let m = self.term(body);
                self.bound.pop();
                Ok(Term::Lam(Binder::new(x), Arc::new(k), Arc::new(m?)))
            }
            Raw::App(f, a, _) => {
                let f = self.term(f)?;
                let a = self.argument(a)?;
                Ok(Term::App(Arc::new(f), Arc::new(a)))
            }
            Raw::Type(s) | Raw::El(_, s) | Raw::Pi(_, _, _, s) => {
                Err(ParseError::ill_formed(s.clone(), "expected a term, found a kind"))
            }
        }
    }

    fn argument(&mut self, raw: &Raw) -> Result<Term, ParseError> {
        if raw.is_kind() {
            return Err(ParseError::ill_formed(
                raw.span().clone(),
                "a kind cannot be used as an argument",
            ));
        }
        self.term(raw)
    }

    fn kind(&mut self, raw: &Raw) -> Result<Kind, ParseError> {
        match raw {
            Raw::Type(_) => Ok(Kind::Type),
            Raw::El(inner, s) => {
                if inner.is_kind() {
                    return Err(ParseError::ill_formed(
                        s.clone(),
                        "El applied to a kind is neither a term nor a kind",
                    ));
                }
                Ok(Kind::El(Arc::new(self.term(inner)?)))
            }
            Raw::Pi(x, dom, cod, _) => {
                let d = self.kind(dom)?;
                self.bound.push(x.clone());
                let c = self.kind(cod);
                self.bound.pop();
                let hint = x.as_deref().unwrap_or("x");
                Ok(Kind::Pi(Binder::new(hint), Arc::new(d), Arc::new(c?)))
            }
            Raw::App(f, a, _) if f.is_kind() => {
                let k = self.kind(f)?;
                let a = self.argument(a)?;
                Ok(Kind::KApp(Arc::new(k), Arc::new(a)))
            }
            Raw::Ident(..) | Raw::Lam(..) | Raw::App(..) => Ok(Kind::El(Arc::new(self.term(raw)?))),
        }
    }
}
