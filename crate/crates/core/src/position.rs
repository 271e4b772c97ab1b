//! Paths into terms and kinds.
//!
//! Child numbering: `Lam` → 0 annotation, 1 body; `App` → 0 function, 1
//! argument; `El` → 0 term; `Pi` → 0 domain, 1 codomain; `KApp` → 0 kind,
//! 1 argument. Subterms found below a binder keep their loose indices.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{Class, Expr, Kind, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<u8>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: u8) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("position {0} does not address a subterm")]
    Invalid(Position),
    #[error("cannot place a {found} at {pos}, which holds a {expected}")]
    ClassMismatch {
        pos: Position,
        expected: Class,
        found: Class,
    },
}

fn child_of(e: &Expr, i: u8) -> Option<Expr> {
    match (e, i) {
        (Expr::Term(Term::Lam(_, k, _)), 0) => Some(Expr::Kind((**k).clone())),
        (Expr::Term(Term::Lam(_, _, m)), 1) => Some(Expr::Term((**m).clone())),
        (Expr::Term(Term::App(m, _)), 0) => Some(Expr::Term((**m).clone())),
        (Expr::Term(Term::App(_, n)), 1) => Some(Expr::Term((**n).clone())),
        (Expr::Kind(Kind::El(m)), 0) => Some(Expr::Term((**m).clone())),
        (Expr::Kind(Kind::Pi(_, k, _)), 0) => Some(Expr::Kind((**k).clone())),
        (Expr::Kind(Kind::Pi(_, _, k)), 1) => Some(Expr::Kind((**k).clone())),
        (Expr::Kind(Kind::KApp(k, _)), 0) => Some(Expr::Kind((**k).clone())),
        (Expr::Kind(Kind::KApp(_, n)), 1) => Some(Expr::Term((**n).clone())),
        _ => None,
    }
}

pub fn subterm_at(subject: &Expr, pos: &Position) -> Result<Expr, PositionError> {
    let mut cur = subject.clone();
    for &i in &pos.0 {
        cur = child_of(&cur, i).ok_or_else(|| PositionError::Invalid(pos.clone()))?;
    }
    Ok(cur)
}

pub fn replace_at(subject: &Expr, pos: &Position, replacement: Expr) -> Result<Expr, PositionError> {
    replace_rec(subject, &pos.0, replacement, pos)
}

fn replace_rec(e: &Expr, path: &[u8], replacement: Expr, full: &Position) -> Result<Expr, PositionError> {
    let Some((&i, rest)) = path.split_first() else {
        if e.class() != replacement.class() {
            return Err(PositionError::ClassMismatch {
                pos: full.clone(),
                expected: e.class(),
                found: replacement.class(),
            });
        }
        return Ok(replacement);
    };
    let child = child_of(e, i).ok_or_else(|| PositionError::Invalid(full.clone()))?;
    let new_child = replace_rec(&child, rest, replacement, full)?;
    let term = |x: Expr| match x {
        Expr::Term(t) => Arc::new(t),
        Expr::Kind(_) => unreachable!("class checked at the leaf"),
    };
    let kind = |x: Expr| match x {
        Expr::Kind(k) => Arc::new(k),
        Expr::Term(_) => unreachable!("class checked at the leaf"),
    };
    Ok(match (e, i) {
        (Expr::Term(Term::Lam(b, _, m)), 0) => Expr::Term(Term::Lam(b.clone(), kind(new_child), m.clone())),
        (Expr::Term(Term::Lam(b, k, _)), 1) => Expr::Term(Term::Lam(b.clone(), k.clone(), term(new_child))),
        (Expr::Term(Term::App(_, n)), 0) => Expr::Term(Term::App(term(new_child), n.clone())),
        (Expr::Term(Term::App(m, _)), 1) => Expr::Term(Term::App(m.clone(), term(new_child))),
        (Expr::Kind(Kind::El(_)), 0) => Expr::Kind(Kind::El(term(new_child))),
        (Expr::Kind(Kind::Pi(b, _, k)), 0) => Expr::Kind(Kind::Pi(b.clone(), kind(new_child), k.clone())),
        (Expr::Kind(Kind::Pi(b, k, _)), 1) => Expr::Kind(Kind::Pi(b.clone(), k.clone(), kind(new_child))),
        (Expr::Kind(Kind::KApp(_, n)), 0) => Expr::Kind(Kind::KApp(kind(new_child), n.clone())),
        (Expr::Kind(Kind::KApp(k, _)), 1) => Expr::Kind(Kind::KApp(k.clone(), term(new_child))),
        _ => unreachable!("child_of succeeded"),
    })
}

/// All positions of `subject` in preorder (node before its children, left before right).
pub fn positions(subject: &Expr) -> Vec<Position> {
    let mut out = Vec::new();
    let mut stack = vec![(subject.clone(), Position::root())];
    while let Some((e, p)) = stack.pop() {
        out.push(p.clone());
        for i in (0..2u8).rev() {
            if let Some(c) = child_of(&e, i) {
                stack.push((c, p.child(i)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fa() -> Expr {
        Expr::Term(Term::app(Term::free("f"), Term::free("a")))
    }

    #[test]
    fn argument_position() {
        let p = Position(vec![1]);
        assert_eq!(subterm_at(&fa(), &p).unwrap(), Expr::Term(Term::free("a")));
        let out = replace_at(&fa(), &p, Expr::Term(Term::free("b"))).unwrap();
        assert_eq!(out, Expr::Term(Term::app(Term::free("f"), Term::free("b"))));
    }

    #[test]
    fn annotation_position() {
        let t = Expr::Term(Term::lam("x", Kind::el(Term::free("a")), Term::free("x")));
        let k = subterm_at(&t, &Position(vec![0])).unwrap();
        assert_eq!(k, Expr::Kind(Kind::el(Term::free("a"))));
    }

    #[test]
    fn invalid_and_mismatched_positions() {
        assert!(matches!(
            subterm_at(&fa(), &Position(vec![2])),
            Err(PositionError::Invalid(_))
        ));
        assert!(matches!(
            subterm_at(&fa(), &Position(vec![0, 0])),
            Err(PositionError::Invalid(_))
        ));
        assert!(matches!(
            replace_at(&fa(), &Position(vec![1]), Expr::Kind(Kind::Type)),
            Err(PositionError::ClassMismatch { .. })
        ));
    }

    #[test]
    fn replace_with_own_subterm_is_identity() {
        let t = Expr::Term(Term::lam(
            "x",
            Kind::el(Term::free("a")),
            Term::app(Term::free("f"), Term::free("x")),
        ));
        for p in positions(&t) {
            let sub = subterm_at(&t, &p).unwrap();
            assert_eq!(replace_at(&t, &p, sub).unwrap(), t);
        }
        assert_eq!(positions(&t).len(), t.size());
    }
}
