//! Typechecker for the logical framework proper (no kind application).
//!
//! Definitional equality is decided by normalising with β, η and the
//! active signature rules and comparing up to α. β₂ never fires because
//! well-formed kinds contain no kind application.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arity::{infer_arity, ArityError, ArityJudgement};
use crate::position::Position;
use crate::reduce::{Reducer, RuleSet, DEFAULT_NORMALIZE_FUEL};
use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Expr, Kind, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("kind application is not part of the framework grammar")]
pub struct NotMlfGrammar;

/// Structural map from kinds to arities: `Type` and `El(M)` go to `0`, a
/// product to the pair of its parts.
pub fn arity_translate(k: &Kind) -> Result<Arity, NotMlfGrammar> {
    match k {
        Kind::Type | Kind::El(_) => Ok(Arity::Zero),
        Kind::Pi(_, k1, k2) => Ok(Arity::pair(arity_translate(k1)?, arity_translate(k2)?)),
        Kind::KApp(..) => Err(NotMlfGrammar),
    }
}

pub fn arity_translate_ctx(ctx: &TypeContext) -> Result<ArityContext, NotMlfGrammar> {
    arity_translate_entries(ctx.entries())
}

/// As [`arity_translate_ctx`], for entries that have not been checked.
pub fn arity_translate_entries(entries: &[(Name, Kind)]) -> Result<ArityContext, NotMlfGrammar> {
    let mut out = ArityContext::new();
    for (x, k) in entries {
        out.push(x.clone(), arity_translate(k)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TypeErrorReason {
    UnboundVariable {
        name: String,
    },
    UndeclaredConstant {
        name: String,
    },
    /// The constant has an arity but no kind.
    ConstantWithoutKind {
        name: String,
    },
    NotAProduct {
        found: String,
    },
    DomainMismatch {
        expected: String,
        found: String,
    },
    /// `El(A)` with `A` not of kind `Type`.
    NotAType {
        found: String,
    },
    NotMlfGrammar,
    LooseIndex {
        index: usize,
    },
    DuplicateBinding {
        name: String,
    },
    NormalizationFuel,
}

impl fmt::Display for TypeErrorReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorReason::UnboundVariable { name } => write!(f, "unbound variable `{name}`"),
            TypeErrorReason::UndeclaredConstant { name } => {
                write!(f, "undeclared constant `{name}`")
            }
            TypeErrorReason::ConstantWithoutKind { name } => {
                write!(f, "constant `{name}` has no declared kind")
            }
            TypeErrorReason::NotAProduct { found } => {
                write!(f, "applied term has kind {found}, not a product")
            }
            TypeErrorReason::DomainMismatch { expected, found } => {
                write!(f, "argument has kind {found}, expected {expected}")
            }
            TypeErrorReason::NotAType { found } => {
                write!(f, "El expects a term of kind Type, found {found}")
            }
            TypeErrorReason::NotMlfGrammar => f.write_str("kind application is not part of the framework grammar"),
            TypeErrorReason::LooseIndex { index } => write!(f, "dangling bound index #{index}"),
            TypeErrorReason::DuplicateBinding { name } => {
                write!(f, "context binds `{name}` twice")
            }
            TypeErrorReason::NormalizationFuel => f.write_str("normalisation ran out of fuel during conversion"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("type error at {position}: {reason}")]
pub struct TypeError {
    pub position: Position,
    #[serde(flatten)]
    pub reason: TypeErrorReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("context entry `{name}`: {error}")]
pub struct ContextError {
    pub index: usize,
    pub name: Name,
    pub error: TypeError,
}

/// A validated context: distinct names, each kind well-formed in its prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeContext {
    entries: Vec<(Name, Kind)>,
}

impl TypeContext {
    pub fn empty() -> Self {
        TypeContext::default()
    }

    pub fn entries(&self) -> &[(Name, Kind)] {
        &self.entries
    }

    pub fn lookup(&self, name: &str) -> Option<&Kind> {
        self.entries.iter().rev().find(|(n, _)| &**n == name).map(|(_, k)| k)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Extends without checking `kind`.
    pub(crate) fn pushed(&self, name: Name, kind: Kind) -> TypeContext {
        let mut entries = self.entries.clone();
        entries.push((name, kind));
        TypeContext { entries }
    }
}

impl fmt::Display for TypeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, (x, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{k}")?;
        }
        f.write_str(">")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("well-typed term has no arity: {0}")]
    NoArity(ArityError),
    #[error("arity {inferred} of the term differs from arity {translated} of its kind")]
    BridgeViolation { inferred: Arity, translated: Arity },
}

pub struct Checker<'a> {
    pub sig: &'a Signature,
    pub rules: RuleSet,
    pub fuel: usize,
    fresh: Cell<usize>,
}

struct Walk {
    path: Vec<u8>,
}

impl Walk {
    fn err(&self, reason: TypeErrorReason) -> TypeError {
        TypeError {
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
}

impl<'a> Checker<'a> {
    /// Conversion with β, η and every rule of `sig`.
    pub fn new(sig: &'a Signature) -> Self {
        Checker::with_rules(sig, RuleSet::conversion())
    }

    /// Conversion with the given rules; β₂ is ignored.
    pub fn with_rules(sig: &'a Signature, mut rules: RuleSet) -> Self {
        rules.beta2 = false;
        Checker {
            sig,
            rules,
            fuel: DEFAULT_NORMALIZE_FUEL,
            fresh: Cell::new(0),
        }
    }

    fn fresh_name(&self) -> Name {
        let n = self.fresh.get();
        self.fresh.set(n + 1);
        Arc::from(format!("x#{n}").as_str())
    }

    fn reducer(&self) -> Reducer<'_> {
        Reducer::new(self.sig, &self.rules)
    }

    pub fn normalize_kind(&self, k: &Kind) -> Option<Kind> {
        self.reducer()
            .normal_form(&Expr::Kind(k.clone()), self.fuel)
            .and_then(|e| e.as_kind().cloned())
    }

    pub fn normalize_term(&self, t: &Term) -> Option<Term> {
        self.reducer()
            .normal_form(&Expr::Term(t.clone()), self.fuel)
            .and_then(|e| e.as_term().cloned())
    }

    /// Definitional equality of kinds.
    pub fn conv_kind(&self, k1: &Kind, k2: &Kind) -> bool {
        k1 == k2
            || matches!(
                (self.normalize_kind(k1), self.normalize_kind(k2)),
                (Some(a), Some(b)) if a == b
            )
    }

    /// Definitional equality of terms.
    pub fn conv_term(&self, t1: &Term, t2: &Term) -> bool {
        t1 == t2
            || matches!(
                (self.normalize_term(t1), self.normalize_term(t2)),
                (Some(a), Some(b)) if a == b
            )
    }

    /// Validates a context entry by entry.
    pub fn check_context<I>(&self, entries: I) -> Result<TypeContext, ContextError>
    where
        I: IntoIterator<Item = (Name, Kind)>,
    {
        let mut ctx = TypeContext::empty();
        for (index, (name, kind)) in entries.into_iter().enumerate() {
            let fail = |error| ContextError {
                index,
                name: name.clone(),
                error,
            };
            if ctx.lookup(&name).is_some() {
                return Err(fail(TypeError {
                    position: Position::root(),
                    reason: TypeErrorReason::DuplicateBinding { name: name.to_string() },
                }));
            }
            self.check_kind(&ctx, &kind).map_err(fail)?;
            ctx = ctx.pushed(name, kind);
        }
        Ok(ctx)
    }

    /// Checks that every declared constant kind is well-formed in the
    /// empty context, in declaration order.
    pub fn check_signature(&self) -> Result<(), ContextError> {
        for (index, d) in self.sig.constants().iter().enumerate() {
            if let Some(k) = &d.kind {
                self.check_kind(&TypeContext::empty(), k)
                    .map_err(|error| ContextError {
                        index,
                        name: d.name.clone(),
                        error,
                    })?;
            }
        }
        Ok(())
    }

    pub fn check_kind(&self, ctx: &TypeContext, k: &Kind) -> Result<(), TypeError> {
        self.kind(ctx, k, &mut Walk { path: Vec::new() })
    }

    /// The kind of `m`, in normal form.
    pub fn infer_type(&self, ctx: &TypeContext, m: &Term) -> Result<Kind, TypeError> {
        self.term(ctx, m, &mut Walk { path: Vec::new() })
    }

    fn normal(&self, k: Kind, w: &Walk) -> Result<Kind, TypeError> {
        self.normalize_kind(&k)
            .ok_or_else(|| w.err(TypeErrorReason::NormalizationFuel))
    }

    fn kind(&self, ctx: &TypeContext, k: &Kind, w: &mut Walk) -> Result<(), TypeError> {
        match k {
            Kind::Type => Ok(()),
            Kind::El(a) => {
                let ka = w.child(0, |w| self.term(ctx, a, w))?;
                if ka == Kind::Type {
                    Ok(())
                } else {
                    Err(w.err(TypeErrorReason::NotAType { found: ka.to_string() }))
                }
            }
            Kind::Pi(_, k1, k2) => {
                w.child(0, |w| self.kind(ctx, k1, w))?;
                let x = self.fresh_name();
                let inner = ctx.pushed(x.clone(), (**k1).clone());
                w.child(1, |w| self.kind(&inner, &k2.open(&x), w))
            }
            Kind::KApp(..) => Err(w.err(TypeErrorReason::NotMlfGrammar)),
        }
    }

    fn term(&self, ctx: &TypeContext, m: &Term, w: &mut Walk) -> Result<Kind, TypeError> {
        match m {
            Term::Bound(i) => Err(w.err(TypeErrorReason::LooseIndex { index: *i })),
            Term::Free(x) => match ctx.lookup(x) {
                Some(k) => self.normal(k.clone(), w),
                None => Err(w.err(TypeErrorReason::UnboundVariable { name: x.to_string() })),
            },
            Term::Const(c) => match self.sig.constant(c) {
                Some(d) => match &d.kind {
                    Some(k) => self.normal(k.clone(), w),
                    None => Err(w.err(TypeErrorReason::ConstantWithoutKind { name: c.to_string() })),
                },
                None => Err(w.err(TypeErrorReason::UndeclaredConstant { name: c.to_string() })),
            },
            Term::Lam(b, k, body) => {
                w.child(0, |w| self.kind(ctx, k, w))?;
                let x = self.fresh_name();
                let inner = ctx.pushed(x.clone(), (**k).clone());
                let kb = w.child(1, |w| self.term(&inner, &body.open(&x), w))?;
                let k = self.normal((**k).clone(), w)?;
                Ok(Kind::Pi(b.clone(), Arc::new(k), Arc::new(kb.close(&x))))
            }
            Term::App(f, a) => {
                let kf = w.child(0, |w| self.term(ctx, f, w))?;
                let Kind::Pi(_, dom, cod) = &kf else {
                    return Err(w.err(TypeErrorReason::NotAProduct { found: kf.to_string() }));
                };
                let ka = w.child(1, |w| self.term(ctx, a, w))?;
                if !self.conv_kind(dom, &ka) {
                    return Err(w.err(TypeErrorReason::DomainMismatch {
                        expected: dom.to_string(),
                        found: ka.to_string(),
                    }));
                }
                self.normal(cod.instantiate(a), w)
            }
        }
    }

    /// Infers the kind of `m`, then checks that the arity of `m` under the
    /// translated context equals the translation of that kind.
    pub fn theorem2_bridge(&self, ctx: &TypeContext, m: &Term) -> Result<ArityJudgement, BridgeError> {
        let k = self.infer_type(ctx, m)?;
        let actx = arity_translate_ctx(ctx).expect("validated contexts are in the grammar");
        let translated = arity_translate(&k).expect("inferred kinds are in the grammar");
        let inferred = infer_arity(self.sig, &actx, &Expr::Term(m.clone())).map_err(BridgeError::NoArity)?;
        if inferred != translated {
            return Err(BridgeError::BridgeViolation { inferred, translated });
        }
        Ok(ArityJudgement {
            context: actx,
            subject: Some(Expr::Term(m.clone())),
            arity: Some(inferred),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_kind, parse_term, parse_type_context};

    fn ctx(c: &Checker<'_>, src: &str) -> TypeContext {
        let entries = parse_type_context(src, c.sig).unwrap();
        c.check_context(entries).unwrap()
    }

    #[test]
    fn translation() {
        let k = |s: &str| parse_kind(s, &()).unwrap();
        assert_eq!(arity_translate(&k("Type")).unwrap(), Arity::Zero);
        assert_eq!(arity_translate(&k("El(M)")).unwrap(), Arity::Zero);
        assert_eq!(
            arity_translate(&k("(A:Type)(B:(x:El(A))Type)Type"))
                .unwrap()
                .to_string(),
            "(0,((0,0),0))"
        );
        assert_eq!(arity_translate(&k("((x:Type)Type) y")), Err(NotMlfGrammar));
    }

    #[test]
    fn kinds() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        assert!(c.check_kind(&TypeContext::empty(), &Kind::Type).is_ok());
        let g = ctx(&c, "assume A : Type;");
        let k = parse_kind("(x:El(A))Type", &()).unwrap();
        assert!(c.check_kind(&g, &k).is_ok());
        let bad = parse_kind("((x:Type)Type) y", &()).unwrap();
        let e = c.check_kind(&TypeContext::empty(), &bad).unwrap_err();
        assert_eq!(e.reason, TypeErrorReason::NotMlfGrammar);
    }

    #[test]
    fn identity_function() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        let g = ctx(&c, "assume A : Type;");
        let k = c.infer_type(&g, &parse_term("\\x:El(A).x", &()).unwrap()).unwrap();
        assert_eq!(k.to_string(), "(x:El(A))El(A)");
    }

    #[test]
    fn mismatched_application_rejected() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        let g = ctx(
            &c,
            "assume A : Type; assume B : Type; assume C : Type;
             assume f : (x:El(A))El(C); assume b : El(B);",
        );
        let e = c.infer_type(&g, &parse_term("f b", &()).unwrap()).unwrap_err();
        assert!(matches!(e.reason, TypeErrorReason::DomainMismatch { .. }), "{e}");
        assert_eq!(e.position, Position::root());
    }

    #[test]
    fn pair_has_sigma_kind() {
        let sig = Signature::sigma();
        let c = Checker::new(&sig);
        let g = ctx(
            &c,
            "assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);",
        );
        let t = parse_term("pair A B a b", &sig).unwrap();
        assert_eq!(c.infer_type(&g, &t).unwrap().to_string(), "El(Sigma A B)");
        let t = parse_term("pi2 A B (pair A B a b)", &sig).unwrap();
        assert_eq!(c.infer_type(&g, &t).unwrap().to_string(), "El(B a)");
    }

    #[test]
    fn conversion() {
        let sig = Signature::sigma();
        let c = Checker::new(&sig);
        let k = |s: &str| parse_kind(s, &sig).unwrap();
        assert!(c.conv_kind(&k("El((\\x:Type.x) A)"), &k("El(A)")));
        assert!(c.conv_kind(&k("El(pi1 A B (pair A B a b))"), &k("El(a)")));
        assert!(!c.conv_kind(&k("El(A)"), &k("El(B)")));
        let without = Checker::with_rules(&sig, RuleSet::beta_eta());
        assert!(!without.conv_kind(&k("El(pi1 A B (pair A B a b))"), &k("El(a)")));
    }

    #[test]
    fn projection_rule_changes_typability() {
        let sig = Signature::sigma();
        let src = "assume A : Type; assume B : (x:El(A))Type; assume C : Type;
                   assume a : El(A); assume b : El(B a); assume f : (x:El(B a))El(C);
                   assume y : El(B (pi1 A B (pair A B a b)));";
        let t = parse_term("f y", &sig).unwrap();
        let without = Checker::with_rules(&sig, RuleSet::beta_eta());
        let e = without.infer_type(&ctx(&without, src), &t).unwrap_err();
        assert!(matches!(e.reason, TypeErrorReason::DomainMismatch { .. }));
        let with = Checker::with_rules(&sig, RuleSet::beta_eta().with_sig_rule("pi1"));
        assert_eq!(with.infer_type(&ctx(&with, src), &t).unwrap().to_string(), "El(C)");
    }

    #[test]
    fn contexts_are_validated() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        let entries = parse_type_context("assume x : El(A);", &()).unwrap();
        let e = c.check_context(entries).unwrap_err();
        assert!(matches!(e.error.reason, TypeErrorReason::UnboundVariable { .. }));
        let entries = parse_type_context("assume A : Type; assume A : Type;", &()).unwrap();
        assert!(c.check_context(entries).is_err());
    }

    #[test]
    fn builtin_kinds_are_well_formed() {
        let sig = Signature::builtins();
        Checker::new(&sig).check_signature().unwrap();
    }

    #[test]
    fn bridge_on_identity() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        let g = ctx(&c, "assume A : Type;");
        let j = c.theorem2_bridge(&g, &parse_term("\\x:El(A).x", &()).unwrap()).unwrap();
        assert_eq!(j.arity.unwrap().to_string(), "(0,0)");
    }

    #[test]
    fn bridge_rejects_ill_typed_terms() {
        let sig = Signature::empty();
        let c = Checker::new(&sig);
        let g = ctx(&c, "assume A : Type;");
        let err = c.theorem2_bridge(&g, &parse_term("A A", &()).unwrap()).unwrap_err();
        assert!(matches!(err, BridgeError::Type(_)));
    }
}
