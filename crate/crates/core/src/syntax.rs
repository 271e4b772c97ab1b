//! Abstract syntax of the extended framework.
//!
//! Terms and kinds are mutually recursive. Bound variables are de Bruijn
//! indices; free variables and constants are names (a locally nameless
//! representation). Binders keep a name hint for printing only, and the hint
//! is ignored by `Eq`, `Hash` and `Ord`, so structural equality on [`Term`]
//! and [`Kind`] is α-equivalence.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub type Name = Arc<str>;

/// Printing hint for a bound variable.
#[derive(Clone, Debug)]
pub struct Binder(pub Name);

impl Binder {
    pub fn new(hint: &str) -> Self {
        Binder(Arc::from(hint))
    }

    pub fn hint(&self) -> &str {
        &self.0
    }
}

impl Default for Binder {
    fn default() -> Self {
        Binder::new("x")
    }
}

impl PartialEq for Binder {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Binder {}

impl Hash for Binder {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl PartialOrd for Binder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Binder {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Bound(usize),
    Free(Name),
    Const(Name),
    Lam(Binder, Arc<Kind>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Type,
    El(Arc<Term>),
    Pi(Binder, Arc<Kind>, Arc<Kind>),
    /// Kind application `K N`. Only legal in the extended system.
    KApp(Arc<Kind>, Arc<Term>),
}

/// A term or a kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Term(Term),
    Kind(Kind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Term,
    Kind,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Term => f.write_str("term"),
            Class::Kind => f.write_str("kind"),
        }
    }
}

/// Binary trees over `Zero`. There is no reduction on arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Zero,
    Pair(Arc<Arity>, Arc<Arity>),
}

impl Arity {
    pub fn pair(domain: Arity, codomain: Arity) -> Arity {
        Arity::Pair(Arc::new(domain), Arc::new(codomain))
    }

    /// Right-nested chain `(a1,(a2,...(an,result)))`.
    pub fn curried(args: impl IntoIterator<Item = Arity>, result: Arity) -> Arity {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| Arity::pair(a, acc))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Arity::Zero)
    }

    pub fn split(&self) -> Option<(&Arity, &Arity)> {
        match self {
            Arity::Zero => None,
            Arity::Pair(a, b) => Some((a, b)),
        }
    }

    /// Argument arities along the right spine, and the final `Zero`-or-pair result
    /// after `n` applications.
    pub fn peel(&self, n: usize) -> Option<(Vec<Arity>, Arity)> {
        let mut args = Vec::with_capacity(n);
        let mut cur = self;
        for _ in 0..n {
            let (a, b) = cur.split()?;
            args.push(a.clone());
            cur = b;
        }
        Some((args, cur.clone()))
    }

    /// Number of nodes, counting `Zero` leaves.
    pub fn size(&self) -> usize {
        match self {
            Arity::Zero => 1,
            Arity::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Zero => f.write_str("0"),
            Arity::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl Serialize for Arity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// Generic variable-node rewriting. `f` sees every Bound/Free/Const node
// together with the number of binders crossed to reach it.
trait MapVars {
    fn map_vars<F>(&self, depth: usize, f: &F) -> Self
    where
        F: Fn(usize, &Term) -> Option<Term>;
}

impl MapVars for Term {
    fn map_vars<F>(&self, depth: usize, f: &F) -> Term
    where
        F: Fn(usize, &Term) -> Option<Term>,
    {
        match self {
            Term::Bound(_) | Term::Free(_) | Term::Const(_) => f(depth, self).unwrap_or_else(|| self.clone()),
            Term::Lam(b, k, m) => Term::Lam(
                b.clone(),
                Arc::new(k.map_vars(depth, f)),
                Arc::new(m.map_vars(depth + 1, f)),
            ),
            Term::App(m, n) => Term::App(Arc::new(m.map_vars(depth, f)), Arc::new(n.map_vars(depth, f))),
        }
    }
}

impl MapVars for Kind {
    fn map_vars<F>(&self, depth: usize, f: &F) -> Kind
    where
        F: Fn(usize, &Term) -> Option<Term>,
    {
        match self {
            Kind::Type => Kind::Type,
            Kind::El(m) => Kind::El(Arc::new(m.map_vars(depth, f))),
            Kind::Pi(b, k1, k2) => Kind::Pi(
                b.clone(),
                Arc::new(k1.map_vars(depth, f)),
                Arc::new(k2.map_vars(depth + 1, f)),
            ),
            Kind::KApp(k, n) => Kind::KApp(Arc::new(k.map_vars(depth, f)), Arc::new(n.map_vars(depth, f))),
        }
    }
}

fn shift_node(by: isize, cutoff: usize) -> impl Fn(usize, &Term) -> Option<Term> {
    move |depth, t| match t {
        Term::Bound(k) if *k >= depth + cutoff => {
            let shifted = *k as isize + by;
            assert!(shifted >= 0, "negative de Bruijn index after shift");
            Some(Term::Bound(shifted as usize))
        }
        _ => None,
    }
}

fn instantiate_node(value: &Term) -> impl Fn(usize, &Term) -> Option<Term> + '_ {
    move |depth, t| match t {
        Term::Bound(k) if *k == depth => Some(value.shift(depth as isize, 0)),
        Term::Bound(k) if *k > depth => Some(Term::Bound(k - 1)),
        _ => None,
    }
}

fn close_node(name: &str) -> impl Fn(usize, &Term) -> Option<Term> + '_ {
    move |depth, t| match t {
        Term::Free(n) if &**n == name => Some(Term::Bound(depth)),
        Term::Bound(k) if *k >= depth => Some(Term::Bound(k + 1)),
        _ => None,
    }
}

fn subst_node<'a>(lookup: impl Fn(&str) -> Option<&'a Term> + 'a) -> impl Fn(usize, &Term) -> Option<Term> + 'a {
    move |depth, t| match t {
        Term::Free(n) => lookup(n).map(|r| r.shift(depth as isize, 0)),
        _ => None,
    }
}

macro_rules! binding_ops {
    ($ty:ty) => {
        impl $ty {
            /// Adds `by` to every bound index that points at or above `cutoff`.
            pub fn shift(&self, by: isize, cutoff: usize) -> $ty {
                if by == 0 {
                    return self.clone();
                }
                self.map_vars(0, &shift_node(by, cutoff))
            }

            /// Replaces the outermost loose bound variable (index 0) with `value`,
            /// i.e. the body half of a β-contraction.
            pub fn instantiate(&self, value: &Term) -> $ty {
                self.map_vars(0, &instantiate_node(value))
            }

            /// Instantiates index 0 with the free variable `name`.
            pub fn open(&self, name: &str) -> $ty {
                self.instantiate(&Term::Free(Arc::from(name)))
            }

            /// Inverse of [`Self::open`]: turns free `name` into index 0.
            pub fn close(&self, name: &str) -> $ty {
                self.map_vars(0, &close_node(name))
            }

            /// Capture-avoiding `[replacement/var]self`.
            pub fn subst(&self, var: &str, replacement: &Term) -> $ty {
                self.map_vars(0, &subst_node(move |n| (n == var).then_some(replacement)))
            }

            /// Simultaneous substitution of every free variable in `map`.
            pub fn subst_many(&self, map: &HashMap<Name, Term>) -> $ty {
                if map.is_empty() {
                    return self.clone();
                }
                self.map_vars(0, &subst_node(move |n| map.get(n)))
            }
        }
    };
}

binding_ops!(Term);
binding_ops!(Kind);

impl Term {
    pub fn free(name: &str) -> Term {
        Term::Free(Arc::from(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Arc::from(name))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// `λname:kind.body` where `body` mentions `name` as a free variable.
    pub fn lam(name: &str, kind: Kind, body: Term) -> Term {
        let body = body.close(name);
        Term::Lam(Binder::new(name), Arc::new(kind), Arc::new(body))
    }

    /// Head and argument list of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Bound(_) | Term::Free(_) | Term::Const(_) => 1,
            Term::Lam(_, k, m) => 1 + k.size() + m.size(),
            Term::App(m, n) => 1 + m.size() + n.size(),
        }
    }

    /// Does bound index `idx` (relative to this node) occur?
    pub fn has_loose(&self, idx: usize) -> bool {
        match self {
            Term::Bound(k) => *k == idx,
            Term::Free(_) | Term::Const(_) => false,
            Term::Lam(_, k, m) => k.has_loose(idx) || m.has_loose(idx + 1),
            Term::App(m, n) => m.has_loose(idx) || n.has_loose(idx),
        }
    }

    /// True when no bound index escapes the term.
    pub fn is_locally_closed(&self) -> bool {
        self.max_loose(0).is_none()
    }

    fn max_loose(&self, depth: usize) -> Option<usize> {
        match self {
            Term::Bound(k) => (*k >= depth).then(|| k - depth),
            Term::Free(_) | Term::Const(_) => None,
            Term::Lam(_, k, m) => k.max_loose(depth).max(m.max_loose(depth + 1)),
            Term::App(m, n) => m.max_loose(depth).max(n.max_loose(depth)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out, &mut BTreeSet::new());
        out
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_names(&self, free: &mut BTreeSet<Name>, consts: &mut BTreeSet<Name>) {
        match self {
            Term::Bound(_) => {}
            Term::Free(n) => {
                free.insert(n.clone());
            }
            Term::Const(n) => {
                consts.insert(n.clone());
            }
            Term::Lam(_, k, m) => {
                k.collect_names(free, consts);
                m.collect_names(free, consts);
            }
            Term::App(m, n) => {
                m.collect_names(free, consts);
                n.collect_names(free, consts);
            }
        }
    }

    fn collect_binders(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Bound(_) | Term::Free(_) | Term::Const(_) => {}
            Term::Lam(b, k, m) => {
                out.insert(b.0.clone());
                k.collect_binders(out);
                m.collect_binders(out);
            }
            Term::App(m, n) => {
                m.collect_binders(out);
                n.collect_binders(out);
            }
        }
    }
}

impl Kind {
    pub fn el(term: Term) -> Kind {
        Kind::El(Arc::new(term))
    }

    /// `(name:domain)codomain` where `codomain` mentions `name` free.
    pub fn pi(name: &str, domain: Kind, codomain: Kind) -> Kind {
        let codomain = codomain.close(name);
        Kind::Pi(Binder::new(name), Arc::new(domain), Arc::new(codomain))
    }

    /// Non-dependent product `(K1)K2`.
    pub fn arrow(domain: Kind, codomain: Kind) -> Kind {
        Kind::Pi(Binder::default(), Arc::new(domain), Arc::new(codomain.shift(1, 0)))
    }

    pub fn kapp(kind: Kind, arg: Term) -> Kind {
        Kind::KApp(Arc::new(kind), Arc::new(arg))
    }

    pub fn size(&self) -> usize {
        match self {
            Kind::Type => 1,
            Kind::El(m) => 1 + m.size(),
            Kind::Pi(_, k1, k2) => 1 + k1.size() + k2.size(),
            Kind::KApp(k, n) => 1 + k.size() + n.size(),
        }
    }

    pub fn has_loose(&self, idx: usize) -> bool {
        match self {
            Kind::Type => false,
            Kind::El(m) => m.has_loose(idx),
            Kind::Pi(_, k1, k2) => k1.has_loose(idx) || k2.has_loose(idx + 1),
            Kind::KApp(k, n) => k.has_loose(idx) || n.has_loose(idx),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        self.max_loose(0).is_none()
    }

    fn max_loose(&self, depth: usize) -> Option<usize> {
        match self {
            Kind::Type => None,
            Kind::El(m) => m.max_loose(depth),
            Kind::Pi(_, k1, k2) => k1.max_loose(depth).max(k2.max_loose(depth + 1)),
            Kind::KApp(k, n) => k.max_loose(depth).max(n.max_loose(depth)),
        }
    }

    /// Whether a `KApp` node occurs anywhere, including inside term annotations.
    pub fn contains_kapp(&self) -> bool {
        match self {
            Kind::Type => false,
            Kind::El(m) => m.contains_kapp(),
            Kind::Pi(_, k1, k2) => k1.contains_kapp() || k2.contains_kapp(),
            Kind::KApp(..) => true,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out, &mut BTreeSet::new());
        out
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_names(&self, free: &mut BTreeSet<Name>, consts: &mut BTreeSet<Name>) {
        match self {
            Kind::Type => {}
            Kind::El(m) => m.collect_names(free, consts),
            Kind::Pi(_, k1, k2) => {
                k1.collect_names(free, consts);
                k2.collect_names(free, consts);
            }
            Kind::KApp(k, n) => {
                k.collect_names(free, consts);
                n.collect_names(free, consts);
            }
        }
    }

    fn collect_binders(&self, out: &mut BTreeSet<Name>) {
        match self {
            Kind::Type => {}
            Kind::El(m) => m.collect_binders(out),
            Kind::Pi(b, k1, k2) => {
                out.insert(b.0.clone());
                k1.collect_binders(out);
                k2.collect_binders(out);
            }
            Kind::KApp(k, n) => {
                k.collect_binders(out);
                n.collect_binders(out);
            }
        }
    }
}

impl Term {
    pub fn contains_kapp(&self) -> bool {
        match self {
            Term::Bound(_) | Term::Free(_) | Term::Const(_) => false,
            Term::Lam(_, k, m) => k.contains_kapp() || m.contains_kapp(),
            Term::App(m, n) => m.contains_kapp() || n.contains_kapp(),
        }
    }
}

impl Expr {
    pub fn class(&self) -> Class {
        match self {
            Expr::Term(_) => Class::Term,
            Expr::Kind(_) => Class::Kind,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Expr::Term(t) => Some(t),
            Expr::Kind(_) => None,
        }
    }

    pub fn as_kind(&self) -> Option<&Kind> {
        match self {
            Expr::Kind(k) => Some(k),
            Expr::Term(_) => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Term(t) => t.size(),
            Expr::Kind(k) => k.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            Expr::Term(t) => t.free_vars(),
            Expr::Kind(k) => k.free_vars(),
        }
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        match self {
            Expr::Term(t) => t.constants(),
            Expr::Kind(k) => k.constants(),
        }
    }

    /// Every binder hint used in the expression.
    pub fn binder_hints(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        match self {
            Expr::Term(t) => t.collect_binders(&mut out),
            Expr::Kind(k) => k.collect_binders(&mut out),
        }
        out
    }

    pub fn is_locally_closed(&self) -> bool {
        match self {
            Expr::Term(t) => t.is_locally_closed(),
            Expr::Kind(k) => k.is_locally_closed(),
        }
    }

    pub fn subst(&self, var: &str, replacement: &Term) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.subst(var, replacement)),
            Expr::Kind(k) => Expr::Kind(k.subst(var, replacement)),
        }
    }

    pub fn subst_many(&self, map: &HashMap<Name, Term>) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.subst_many(map)),
            Expr::Kind(k) => Expr::Kind(k.subst_many(map)),
        }
    }

    pub fn shift(&self, by: isize, cutoff: usize) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.shift(by, cutoff)),
            Expr::Kind(k) => Expr::Kind(k.shift(by, cutoff)),
        }
    }
}

impl From<Term> for Expr {
    fn from(t: Term) -> Self {
        Expr::Term(t)
    }
}

impl From<Kind> for Expr {
    fn from(k: Kind) -> Self {
        Expr::Kind(k)
    }
}

/// Ordered variable → arity assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ArityContext {
    entries: Vec<(Name, Arity)>,
}

impl ArityContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Arity)>) -> Self {
        ArityContext {
            entries: pairs.into_iter().map(|(n, a)| (Arc::from(n), a)).collect(),
        }
    }

    pub fn push(&mut self, name: Name, arity: Arity) {
        self.entries.push((name, arity));
    }

    pub fn with(&self, name: &str, arity: Arity) -> Self {
        let mut out = self.clone();
        out.push(Arc::from(name), arity);
        out
    }

    /// Latest binding wins, although a valid context never has duplicates.
    pub fn lookup(&self, name: &str) -> Option<&Arity> {
        self.entries.iter().rev().find(|(n, _)| &**n == name).map(|(_, a)| a)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn entries(&self) -> &[(Name, Arity)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }

    /// Prefix consisting of the first `n` entries.
    pub fn prefix(&self, n: usize) -> Self {
        ArityContext {
            entries: self.entries[..n].to_vec(),
        }
    }
}

impl fmt::Display for ArityContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, (n, a)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{a}")?;
        }
        f.write_str(">")
    }
}

/// Free-variable set of a term or kind.
pub fn fv(subject: &Expr) -> BTreeSet<Name> {
    subject.free_vars()
}

/// `[replacement/var]subject`, capture-avoiding.
pub fn subst(subject: &Expr, var: &str, replacement: &Term) -> Expr {
    subject.subst(var, replacement)
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(lhs: &Expr, rhs: &Expr) -> bool {
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::free("x")
    }
    fn y() -> Term {
        Term::free("y")
    }

    #[test]
    fn subst_hits_variable() {
        assert_eq!(x().subst("x", &y()), y());
    }

    #[test]
    fn subst_respects_shadowing() {
        let id = Term::lam("x", Kind::Type, x());
        assert_eq!(id.subst("x", &y()), id);
    }

    #[test]
    fn subst_descends_into_kinds() {
        let k = Kind::el(Term::app(Term::free("f"), x()));
        assert_eq!(k.subst("x", &y()), Kind::el(Term::app(Term::free("f"), y())));
    }

    #[test]
    fn subst_under_binder_does_not_capture() {
        // [y/z] λy:Type.z  must not become λy:Type.y
        let t = Term::lam("y", Kind::Type, Term::free("z"));
        let out = t.subst("z", &y());
        match &out {
            Term::Lam(_, _, body) => assert_eq!(**body, y()),
            _ => unreachable!(),
        }
        assert_ne!(out, Term::lam("y", Kind::Type, y()));
    }

    #[test]
    fn free_variables() {
        let t = Term::lam("x", Kind::el(Term::free("a")), x());
        assert_eq!(t.free_vars(), BTreeSet::from([Arc::from("a")]));
        let t = Term::app(x(), y());
        assert_eq!(t.free_vars().len(), 2);
        assert!(Kind::Type.free_vars().is_empty());
    }

    #[test]
    fn alpha_equivalence_ignores_hints() {
        let a = Term::lam("x", Kind::Type, x());
        let b = Term::lam("y", Kind::Type, y());
        assert!(alpha_eq(&a.into(), &b.into()));
        let a = Term::lam("x", Kind::el(Term::free("a")), x());
        let b = Term::lam("x", Kind::el(Term::free("b")), x());
        assert!(!alpha_eq(&a.into(), &b.into()));
        assert!(!alpha_eq(&x().into(), &y().into()));
    }

    #[test]
    fn instantiate_shifts_under_binders() {
        // body = λz:Type. #1  (refers to the outer binder); instantiate with #0 from context
        let body = Term::Lam(Binder::new("z"), Arc::new(Kind::Type), Arc::new(Term::Bound(1)));
        let out = body.instantiate(&Term::Bound(5));
        assert_eq!(
            out,
            Term::Lam(Binder::new("z"), Arc::new(Kind::Type), Arc::new(Term::Bound(6)))
        );
    }

    #[test]
    fn open_close_roundtrip() {
        let t = Term::lam("x", Kind::Type, Term::app(Term::free("f"), x()));
        if let Term::Lam(_, _, body) = &t {
            assert_eq!(body.open("q").close("q"), **body);
        }
    }

    #[test]
    fn arity_helpers() {
        let a = Arity::curried([Arity::Zero, Arity::Zero], Arity::Zero);
        assert_eq!(a.to_string(), "(0,(0,0))");
        let (args, res) = a.peel(2).unwrap();
        assert_eq!(args, vec![Arity::Zero, Arity::Zero]);
        assert_eq!(res, Arity::Zero);
        assert!(a.peel(3).is_none());
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let map = HashMap::from([(Arc::from("x"), y()), (Arc::from("y"), x())]);
        assert_eq!(Term::app(x(), y()).subst_many(&map), Term::app(y(), x()));
    }
}
