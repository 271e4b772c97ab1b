//! Arity inference for terms and kinds of the extended system.
//!
//! `infer_arity` is the syntax-directed algorithm. `enumerate_derivations`
//! is a separate relational search over the inference rules that builds
//! full derivation trees, context-validity premises included. It exists to
//! cross-check the algorithm and the uniqueness of arities.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::position::Position;
use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Expr, Kind, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoArityReason {
    UnboundVariable {
        name: String,
    },
    UndeclaredConstant {
        name: String,
    },
    /// The head of an application has arity `Zero`.
    NotAFunction {
        head: String,
    },
    ArgumentMismatch {
        expected: String,
        found: String,
    },
    /// `El(M)` with `M` not of arity `Zero`.
    ElNeedsZero {
        found: String,
    },
    DuplicateBinding {
        name: String,
    },
    /// A de Bruijn index that no binder accounts for.
    LooseIndex {
        index: usize,
    },
}

impl fmt::Display for NoArityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoArityReason::UnboundVariable { name } => write!(f, "unbound variable `{name}`"),
            NoArityReason::UndeclaredConstant { name } => {
                write!(f, "undeclared constant `{name}`")
            }
            NoArityReason::NotAFunction { head } => {
                write!(f, "applied expression has arity 0, not a pair ({head})")
            }
            NoArityReason::ArgumentMismatch { expected, found } => {
                write!(f, "argument has arity {found}, expected {expected}")
            }
            NoArityReason::ElNeedsZero { found } => {
                write!(f, "El expects an argument of arity 0, found {found}")
            }
            NoArityReason::DuplicateBinding { name } => {
                write!(f, "context binds `{name}` twice")
            }
            NoArityReason::LooseIndex { index } => write!(f, "dangling bound index #{index}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("no arity at {position}: {reason}")]
pub struct ArityError {
    pub position: Position,
    #[serde(flatten)]
    pub reason: NoArityReason,
}

/// Context validity: all names pairwise distinct.
pub fn ctx_valid(ctx: &ArityContext) -> bool {
    duplicate_in(ctx).is_none()
}

fn duplicate_in(ctx: &ArityContext) -> Option<Name> {
    let mut seen = BTreeSet::new();
    ctx.names().find(|n| !seen.insert((*n).clone())).cloned()
}

struct Infer<'a> {
    sig: &'a Signature,
    ctx: &'a ArityContext,
    /// Arities of enclosing binders, innermost last.
    locals: Vec<Arity>,
    path: Vec<u8>,
}

impl Infer<'_> {
    fn fail(&self, reason: NoArityReason) -> ArityError {
        ArityError {
            position: Position(self.path.clone()),
            reason,
        }
    }

    fn child<T>(&mut self, i: u8, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn under<T>(&mut self, i: u8, a: Arity, f: impl FnOnce(&mut Self) -> T) -> T {
        self.locals.push(a);
        let r = self.child(i, f);
        self.locals.pop();
        r
    }

    fn apply(&self, head: Arity, arg: Arity) -> Result<Arity, ArityError> {
        match head {
            Arity::Zero => Err(self.fail(NoArityReason::NotAFunction { head: head.to_string() })),
            Arity::Pair(dom, cod) if *dom == arg => Ok((*cod).clone()),
            Arity::Pair(dom, _) => Err(self.fail(NoArityReason::ArgumentMismatch {
                expected: dom.to_string(),
                found: arg.to_string(),
            })),
        }
    }

    fn term(&mut self, t: &Term) -> Result<Arity, ArityError> {
        match t {
            Term::Bound(i) => self
                .locals
                .len()
                .checked_sub(i + 1)
                .map(|j| self.locals[j].clone())
                .ok_or_else(|| self.fail(NoArityReason::LooseIndex { index: *i })),
            Term::Free(x) => self
                .ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| self.fail(NoArityReason::UnboundVariable { name: x.to_string() })),
            Term::Const(c) => self
                .sig
                .const_arity(c)
                .cloned()
                .ok_or_else(|| self.fail(NoArityReason::UndeclaredConstant { name: c.to_string() })),
            Term::Lam(_, k, m) => {
                let a1 = self.child(0, |s| s.kind(k))?;
                let a2 = self.under(1, a1.clone(), |s| s.term(m))?;
                Ok(Arity::pair(a1, a2))
            }
            Term::App(m, n) => {
                let head = self.child(0, |s| s.term(m))?;
                let arg = self.child(1, |s| s.term(n))?;
                self.apply(head, arg)
            }
        }
    }

    fn kind(&mut self, k: &Kind) -> Result<Arity, ArityError> {
        match k {
            Kind::Type => Ok(Arity::Zero),
            Kind::El(m) => match self.child(0, |s| s.term(m))? {
                Arity::Zero => Ok(Arity::Zero),
                other => Err(self.fail(NoArityReason::ElNeedsZero {
                    found: other.to_string(),
                })),
            },
            Kind::Pi(_, k1, k2) => {
                let a1 = self.child(0, |s| s.kind(k1))?;
                let a2 = self.under(1, a1.clone(), |s| s.kind(k2))?;
                Ok(Arity::pair(a1, a2))
            }
            Kind::KApp(k, n) => {
                let head = self.child(0, |s| s.kind(k))?;
                let arg = self.child(1, |s| s.term(n))?;
                self.apply(head, arg)
            }
        }
    }
}

/// The unique `a` with `ctx ⊢ subject : a`, or the first position where no
/// rule applies.
pub fn infer_arity(sig: &Signature, ctx: &ArityContext, subject: &Expr) -> Result<Arity, ArityError> {
    if let Some(dup) = duplicate_in(ctx) {
        return Err(ArityError {
            position: Position::root(),
            reason: NoArityReason::DuplicateBinding { name: dup.to_string() },
        });
    }
    let mut inf = Infer {
        sig,
        ctx,
        locals: Vec::new(),
        path: Vec::new(),
    };
    match subject {
        Expr::Term(t) => inf.term(t),
        Expr::Kind(k) => inf.kind(k),
    }
}

pub fn infer_term_arity(sig: &Signature, ctx: &ArityContext, t: &Term) -> Result<Arity, ArityError> {
    infer_arity(sig, ctx, &Expr::Term(t.clone()))
}

pub fn infer_kind_arity(sig: &Signature, ctx: &ArityContext, k: &Kind) -> Result<Arity, ArityError> {
    infer_arity(sig, ctx, &Expr::Kind(k.clone()))
}

// ---- derivations ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    EmptyContext,
    ExtendContext,
    Type,
    El,
    Product,
    KindApp,
    Var,
    Const,
    Lam,
    App,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::EmptyContext,
        Rule::ExtendContext,
        Rule::Type,
        Rule::El,
        Rule::Product,
        Rule::KindApp,
        Rule::Var,
        Rule::Const,
        Rule::Lam,
        Rule::App,
    ];
}

/// `context ⊢ subject : arity`, or `context valid` when `subject` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityJudgement {
    pub context: ArityContext,
    pub subject: Option<Expr>,
    pub arity: Option<Arity>,
}

impl fmt::Display for ArityJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.subject, &self.arity) {
            (Some(s), Some(a)) => write!(f, "{} ⊢ {s} : {a}", self.context),
            _ => write!(f, "{} valid", self.context),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: ArityJudgement,
}

impl Derivation {
    pub fn arity(&self) -> Option<&Arity> {
        self.conclusion.arity.as_ref()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// Checks that every node is an instance of its rule.
    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        self.node_ok(sig) && self.premises.iter().all(|p| p.is_well_formed(sig))
    }

    fn node_ok(&self, sig: &Signature) -> bool {
        let ctx = &self.conclusion.context;
        let judged = |p: &Derivation, c: &ArityContext, e: &Expr| {
            &p.conclusion.context == c && p.conclusion.subject.as_ref() == Some(e)
        };
        let validity = |p: &Derivation| p.conclusion.subject.is_none() && &p.conclusion.context == ctx;
        let arity = self.conclusion.arity.as_ref();
        let binder = |p1: &Derivation, p2: &Derivation, dom: Expr, open: &dyn Fn(&str) -> Expr| {
            let (Some(a1), Some(a2)) = (p1.arity(), p2.arity()) else {
                return false;
            };
            let c2 = &p2.conclusion.context;
            let Some((x, ax)) = c2.entries().last() else {
                return false;
            };
            judged(p1, ctx, &dom)
                && ax == a1
                && &c2.prefix(c2.len() - 1) == ctx
                && judged(p2, c2, &open(x))
                && arity == Some(&Arity::pair(a1.clone(), a2.clone()))
        };
        let application = |p1: &Derivation, p2: &Derivation, head: Expr, arg: Expr| match p1.arity() {
            Some(Arity::Pair(a1, a2)) => {
                judged(p1, ctx, &head) && judged(p2, ctx, &arg) && p2.arity() == Some(&**a1) && arity == Some(&**a2)
            }
            _ => false,
        };
        match (self.rule, self.conclusion.subject.as_ref(), self.premises.as_slice()) {
            (Rule::EmptyContext, None, []) => ctx.is_empty(),
            (Rule::ExtendContext, None, [p]) => match ctx.entries().last() {
                Some((x, _)) => {
                    let prefix = ctx.prefix(ctx.len() - 1);
                    p.conclusion.subject.is_none() && p.conclusion.context == prefix && !prefix.contains(x)
                }
                None => false,
            },
            (Rule::Type, Some(Expr::Kind(Kind::Type)), [v]) => validity(v) && arity == Some(&Arity::Zero),
            (Rule::El, Some(Expr::Kind(Kind::El(m))), [p]) => {
                judged(p, ctx, &Expr::Term((**m).clone()))
                    && p.arity() == Some(&Arity::Zero)
                    && arity == Some(&Arity::Zero)
            }
            (Rule::Var, Some(Expr::Term(Term::Free(x))), [v]) => {
                validity(v) && ctx.entries().iter().any(|(n, a)| n == x && Some(a) == arity)
            }
            (Rule::Const, Some(Expr::Term(Term::Const(c))), [v]) => validity(v) && sig.const_arity(c) == arity,
            (Rule::Product, Some(Expr::Kind(Kind::Pi(_, k1, k2))), [p1, p2]) => {
                binder(p1, p2, Expr::Kind((**k1).clone()), &|x| Expr::Kind(k2.open(x)))
            }
            (Rule::Lam, Some(Expr::Term(Term::Lam(_, k, m))), [p1, p2]) => {
                binder(p1, p2, Expr::Kind((**k).clone()), &|x| Expr::Term(m.open(x)))
            }
            (Rule::KindApp, Some(Expr::Kind(Kind::KApp(k, n))), [p1, p2]) => {
                application(p1, p2, Expr::Kind((**k).clone()), Expr::Term((**n).clone()))
            }
            (Rule::App, Some(Expr::Term(Term::App(m, n))), [p1, p2]) => {
                application(p1, p2, Expr::Term((**m).clone()), Expr::Term((**n).clone()))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(f, "{:indent$}{:?}: {}", "", d.rule, d.conclusion)?;
            d.premises.iter().try_for_each(|p| go(p, indent + 2, f))
        }
        go(self, 0, f)
    }
}

struct Search<'a> {
    sig: &'a Signature,
    order: &'a [Rule],
}

impl Search<'_> {
    fn fresh(ctx: &ArityContext) -> String {
        (ctx.len()..)
            .map(|i| format!("v#{i}"))
            .find(|n| !ctx.contains(n))
            .expect("unbounded search")
    }

    /// All derivations of `ctx valid` of height at most `depth`.
    fn valid(&self, ctx: &ArityContext, depth: usize) -> Vec<Derivation> {
        if depth == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &rule in self.order {
            match rule {
                Rule::EmptyContext if ctx.is_empty() => out.push(Derivation {
                    rule,
                    premises: Vec::new(),
                    conclusion: ArityJudgement {
                        context: ctx.clone(),
                        subject: None,
                        arity: None,
                    },
                }),
                Rule::ExtendContext if !ctx.is_empty() => {
                    let prefix = ctx.prefix(ctx.len() - 1);
                    let (x, _) = &ctx.entries()[ctx.len() - 1];
                    if prefix.contains(x) {
                        continue;
                    }
                    for p in self.valid(&prefix, depth - 1) {
                        out.push(Derivation {
                            rule,
                            premises: vec![p],
                            conclusion: ArityJudgement {
                                context: ctx.clone(),
                                subject: None,
                                arity: None,
                            },
                        });
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn node(rule: Rule, premises: Vec<Derivation>, ctx: &ArityContext, e: Expr, a: Arity) -> Derivation {
        Derivation {
            rule,
            premises,
            conclusion: ArityJudgement {
                context: ctx.clone(),
                subject: Some(e),
                arity: Some(a),
            },
        }
    }

    fn derive(&self, ctx: &ArityContext, e: &Expr, depth: usize) -> Vec<Derivation> {
        if depth == 0 {
            return Vec::new();
        }
        let d = depth - 1;
        let mut out = Vec::new();
        for &rule in self.order {
            match (rule, e) {
                (Rule::Type, Expr::Kind(Kind::Type)) => {
                    for v in self.valid(ctx, d) {
                        out.push(Self::node(rule, vec![v], ctx, e.clone(), Arity::Zero));
                    }
                }
                (Rule::El, Expr::Kind(Kind::El(m))) => {
                    for p in self.derive(ctx, &Expr::Term((**m).clone()), d) {
                        if p.arity() == Some(&Arity::Zero) {
                            out.push(Self::node(rule, vec![p], ctx, e.clone(), Arity::Zero));
                        }
                    }
                }
                (Rule::Product, Expr::Kind(Kind::Pi(_, k1, k2))) => {
                    let x = Self::fresh(ctx);
                    let body = Expr::Kind(k2.open(&x));
                    for p1 in self.derive(ctx, &Expr::Kind((**k1).clone()), d) {
                        let a1 = p1.arity().cloned().expect("judgement has an arity");
                        for p2 in self.derive(&ctx.with(&x, a1.clone()), &body, d) {
                            let a = Arity::pair(a1.clone(), p2.arity().cloned().unwrap());
                            out.push(Self::node(rule, vec![p1.clone(), p2], ctx, e.clone(), a));
                        }
                    }
                }
                (Rule::KindApp, Expr::Kind(Kind::KApp(k, n))) => {
                    for p1 in self.derive(ctx, &Expr::Kind((**k).clone()), d) {
                        let Some(Arity::Pair(a1, a2)) = p1.arity() else {
                            continue;
                        };
                        let (a1, a2) = ((**a1).clone(), (**a2).clone());
                        for p2 in self.derive(ctx, &Expr::Term((**n).clone()), d) {
                            if p2.arity() == Some(&a1) {
                                out.push(Self::node(rule, vec![p1.clone(), p2], ctx, e.clone(), a2.clone()));
                            }
                        }
                    }
                }
                (Rule::Var, Expr::Term(Term::Free(x))) => {
                    // Every occurrence of x in the context is a candidate;
                    // validity of the whole context rules out all but one.
                    for (name, a) in ctx.entries() {
                        if name == x {
                            for v in self.valid(ctx, d) {
                                out.push(Self::node(rule, vec![v], ctx, e.clone(), a.clone()));
                            }
                        }
                    }
                }
                (Rule::Const, Expr::Term(Term::Const(c))) => {
                    if let Some(a) = self.sig.const_arity(c) {
                        for v in self.valid(ctx, d) {
                            out.push(Self::node(rule, vec![v], ctx, e.clone(), a.clone()));
                        }
                    }
                }
                (Rule::Lam, Expr::Term(Term::Lam(_, k, m))) => {
                    let x = Self::fresh(ctx);
                    let body = Expr::Term(m.open(&x));
                    for p1 in self.derive(ctx, &Expr::Kind((**k).clone()), d) {
                        let a1 = p1.arity().cloned().expect("judgement has an arity");
                        for p2 in self.derive(&ctx.with(&x, a1.clone()), &body, d) {
                            let a = Arity::pair(a1.clone(), p2.arity().cloned().unwrap());
                            out.push(Self::node(rule, vec![p1.clone(), p2], ctx, e.clone(), a));
                        }
                    }
                }
                (Rule::App, Expr::Term(Term::App(m, n))) => {
                    for p1 in self.derive(ctx, &Expr::Term((**m).clone()), d) {
                        let Some(Arity::Pair(a1, a2)) = p1.arity() else {
                            continue;
                        };
                        let (a1, a2) = ((**a1).clone(), (**a2).clone());
                        for p2 in self.derive(ctx, &Expr::Term((**n).clone()), d) {
                            if p2.arity() == Some(&a1) {
                                out.push(Self::node(rule, vec![p1.clone(), p2], ctx, e.clone(), a2.clone()));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }
}

/// Every derivation of `ctx ⊢ subject : a` (for any `a`) whose height is at
/// most `depth`.
pub fn enumerate_derivations(sig: &Signature, ctx: &ArityContext, subject: &Expr, depth: usize) -> Vec<Derivation> {
    enumerate_derivations_ordered(sig, ctx, subject, depth, &Rule::ALL)
}

/// As [`enumerate_derivations`], trying rules in the given order. Rules
/// missing from `order` are never used.
pub fn enumerate_derivations_ordered(
    sig: &Signature,
    ctx: &ArityContext,
    subject: &Expr,
    depth: usize,
    order: &[Rule],
) -> Vec<Derivation> {
    Search { sig, order }.derive(ctx, subject, depth)
}

/// Distinct arities concluded by the derivations found within `depth`.
pub fn derivable_arities(sig: &Signature, ctx: &ArityContext, subject: &Expr, depth: usize) -> BTreeSet<Arity> {
    enumerate_derivations(sig, ctx, subject, depth)
        .into_iter()
        .filter_map(|d| d.conclusion.arity)
        .collect()
}

/// Height sufficient for any derivation of `subject` under `ctx`: one level
/// per syntax node plus a context-validity chain at each leaf.
pub fn sufficient_depth(ctx: &ArityContext, subject: &Expr) -> usize {
    subject.size() * 2 + ctx.len() + 2
}
