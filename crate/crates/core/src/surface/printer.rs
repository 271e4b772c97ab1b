use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::syntax::{Expr, Kind, Name, Term};

struct Printer {
    avoid: BTreeSet<String>,
    scope: Vec<String>,
    out: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Prec {
    /// λ-bodies, binder annotations, El contents.
    Top,
    /// Head of an application: a λ needs parentheses.
    Head,
    /// Argument: any compound term needs parentheses.
    Atom,
}

impl Printer {
    fn new(e: &Expr) -> Self {
        let mut avoid: BTreeSet<String> = e
            .free_vars()
            .into_iter()
            .chain(e.constants())
            .map(|n: Name| n.to_string())
            .collect();
        avoid.insert("Type".into());
        avoid.insert("El".into());
        Printer {
            avoid,
            scope: Vec::new(),
            out: String::new(),
        }
    }

    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || !hint.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            "x"
        } else {
            hint
        };
        let taken = |s: &str| self.avoid.contains(s) || self.scope.iter().any(|n| n == s);
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|s| !taken(s))
            .expect("unbounded search")
    }

    fn var(&mut self, i: usize) {
        match self.scope.len().checked_sub(i + 1) {
            Some(j) => {
                let name = self.scope[j].clone();
                self.out.push_str(&name);
            }
            None => {
                let _ = write!(self.out, "#{i}");
            }
        }
    }

    fn term(&mut self, t: &Term, prec: Prec) {
        match t {
            Term::Bound(i) => self.var(*i),
            Term::Free(n) | Term::Const(n) => self.out.push_str(n),
            Term::Lam(b, k, m) => {
                let paren = prec != Prec::Top;
                if paren {
                    self.out.push('(');
                }
                let name = self.fresh(b.hint());
                self.out.push('\\');
                self.out.push_str(&name);
                self.out.push(':');
                self.kind(k, Prec::Top);
                self.out.push('.');
                self.scope.push(name);
                self.term(m, Prec::Top);
                self.scope.pop();
                if paren {
                    self.out.push(')');
                }
            }
            Term::App(f, a) => {
                let paren = prec == Prec::Atom;
                if paren {
                    self.out.push('(');
                }
                self.term(f, Prec::Head);
                self.out.push(' ');
                self.term(a, Prec::Atom);
                if paren {
                    self.out.push(')');
                }
            }
        }
    }

    fn kind(&mut self, k: &Kind, prec: Prec) {
        match k {
            Kind::Type => self.out.push_str("Type"),
            Kind::El(m) => {
                self.out.push_str("El(");
                self.term(m, Prec::Top);
                self.out.push(')');
            }
            Kind::Pi(b, k1, k2) => {
                let paren = prec != Prec::Top;
                if paren {
                    self.out.push('(');
                }
                let name = self.fresh(b.hint());
                self.out.push('(');
                self.out.push_str(&name);
                self.out.push(':');
                self.kind(k1, Prec::Top);
                self.out.push(')');
                self.scope.push(name);
                self.kind(k2, Prec::Top);
                self.scope.pop();
                if paren {
                    self.out.push(')');
                }
            }
            Kind::KApp(f, a) => {
                let paren = prec == Prec::Atom;
                if paren {
                    self.out.push('(');
                }
                self.kind(f, Prec::Head);
                self.out.push(' ');
                self.term(a, Prec::Atom);
                if paren {
                    self.out.push(')');
                }
            }
        }
    }
}

/// Renders an expression so that parsing the output yields an α-equal value.
pub fn print(e: &Expr) -> String {
    let mut p = Printer::new(e);
    match e {
        Expr::Term(t) => p.term(t, Prec::Top),
        Expr::Kind(k) => p.kind(k, Prec::Top),
    }
    p.out
}

pub fn print_term(t: &Term) -> String {
    print(&Expr::Term(t.clone()))
}

pub fn print_kind(k: &Kind) -> String {
    print(&Expr::Kind(k.clone()))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_kind(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
