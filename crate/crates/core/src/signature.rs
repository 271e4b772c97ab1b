//! Constants and constructor-headed computation rules.
//!
//! A signature declares constants with an arity and, optionally, a kind for
//! the typechecker. Rules have the shape `c p1 .. pn --> rhs : a` where each
//! `pi` is a pattern variable, a constant, or a constant applied to pattern
//! variables and constants. Pattern variables are free variables of the
//! left-hand side. A variable may occur at most once among the head's
//! arguments and at most once in a single nested pattern; an occurrence in
//! both places (as `A` in `pi1 A B (pair A B a b)`) is matched by equality.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::arity::{ctx_valid, infer_term_arity, ArityError};
use crate::surface::{ParseError, Parser, Scope};
use crate::syntax::{Arity, ArityContext, Kind, Name, Term};
use crate::typecheck::arity_translate;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: Name,
    pub arity: Arity,
    pub kind: Option<Kind>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: Name,
    /// Arities of the pattern variables.
    pub context: ArityContext,
    pub lhs: Term,
    pub rhs: Term,
    pub arity: Arity,
}

impl RewriteRule {
    pub fn head(&self) -> &Name {
        match self.lhs.spine().0 {
            Term::Const(c) => c,
            _ => panic!("rule `{}` has no constant head", self.name),
        }
    }

    /// Binds pattern variables if `subject` is an instance of the left-hand side.
    pub fn matches(&self, subject: &Term) -> Option<HashMap<Name, Term>> {
        let mut binding = HashMap::new();
        match_pattern(&self.lhs, subject, &mut binding).then_some(binding)
    }

    /// The contractum, if `subject` is an instance of the left-hand side.
    pub fn apply(&self, subject: &Term) -> Option<Term> {
        self.matches(subject).map(|b| self.rhs.subst_many(&b))
    }
}

fn match_pattern(pat: &Term, subject: &Term, binding: &mut HashMap<Name, Term>) -> bool {
    match (pat, subject) {
        // A variable shared between the head's arguments and a nested
        // pattern must be matched by α-equal subterms.
        (Term::Free(v), _) => match binding.get(v) {
            Some(prev) => prev == subject,
            None => {
                binding.insert(v.clone(), subject.clone());
                true
            }
        },
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::App(pf, pa), Term::App(sf, sa)) => match_pattern(pf, sf, binding) && match_pattern(pa, sa, binding),
        _ => false,
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} --> {} : {}", self.name, self.lhs, self.rhs, self.arity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "left-hand side",
            Side::Rhs => "right-hand side",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("constant `{0}` is declared twice with different arities or kinds")]
    ConflictingConstant(String),
    #[error("rule `{rule}` mentions undeclared constant `{name}`")]
    UndeclaredConstant { rule: String, name: String },
    #[error("rule `{rule}`: pattern variable `{var}` occurs more than once")]
    NonLinearPattern { rule: String, var: String },
    #[error("rule `{rule}`: {reason}")]
    MalformedPattern { rule: String, reason: String },
    #[error("rule `{rule}`: {side} has arity {found}, declared {expected}")]
    ArityMismatch {
        rule: String,
        side: Side,
        expected: Arity,
        found: Arity,
    },
    #[error("rule `{rule}`: {side} has no arity: {error}")]
    NoArity {
        rule: String,
        side: Side,
        error: ArityError,
    },
    #[error("rule `{rule}`: pattern context binds `{name}` twice")]
    InvalidContext { rule: String, name: String },
    #[error("rule name `{0}` is used twice")]
    DuplicateRule(String),
    #[error("constant `{name}`: kind translates to arity {translated}, declared {declared}")]
    KindArityMismatch {
        name: String,
        declared: Arity,
        translated: Arity,
    },
    #[error("constant `{name}`: declared kind is not in the framework grammar")]
    KindNotMlf { name: String },
    #[error("finite type `{ty}` lists constructor `{name}` twice")]
    DuplicateConstructor { ty: String, name: String },
    #[error("finite type `{0}` needs at least one constructor")]
    EmptyFiniteType(String),
    #[error("unknown builtin signature `{0}` (expected sigma, bool or universe)")]
    UnknownBuiltin(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    consts: Vec<ConstDecl>,
    index: HashMap<Name, usize>,
    rules: Vec<RewriteRule>,
}

impl Scope for Signature {
    fn is_constant(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

impl Signature {
    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn constants(&self) -> &[ConstDecl] {
        &self.consts
    }

    pub fn constant(&self, name: &str) -> Option<&ConstDecl> {
        self.index.get(name).map(|&i| &self.consts[i])
    }

    pub fn const_arity(&self, name: &str) -> Option<&Arity> {
        self.constant(name).map(|d| &d.arity)
    }

    pub fn const_kind(&self, name: &str) -> Option<&Kind> {
        self.constant(name).and_then(|d| d.kind.as_ref())
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| &*r.name == name)
    }

    pub fn rule_names(&self) -> Vec<Name> {
        self.rules.iter().map(|r| r.name.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.consts.is_empty() && self.rules.is_empty()
    }

    /// Adds a constant. Re-declaring an identical constant is a no-op.
    pub fn declare(&mut self, decl: ConstDecl) -> Result<(), SignatureError> {
        if let Some(kind) = &decl.kind {
            let translated = arity_translate(kind).map_err(|_| SignatureError::KindNotMlf {
                name: decl.name.to_string(),
            })?;
            if translated != decl.arity {
                return Err(SignatureError::KindArityMismatch {
                    name: decl.name.to_string(),
                    declared: decl.arity.clone(),
                    translated,
                });
            }
        }
        match self.constant(&decl.name) {
            Some(existing) if *existing == decl => Ok(()),
            Some(_) => Err(SignatureError::ConflictingConstant(decl.name.to_string())),
            None => {
                self.index.insert(decl.name.clone(), self.consts.len());
                self.consts.push(decl);
                Ok(())
            }
        }
    }

    pub fn declare_arity(&mut self, name: &str, arity: Arity) -> Result<(), SignatureError> {
        self.declare(ConstDecl {
            name: Arc::from(name),
            arity,
            kind: None,
        })
    }

    /// Declares a constant from its kind, deriving the arity.
    pub fn declare_kind(&mut self, name: &str, kind: Kind) -> Result<(), SignatureError> {
        let arity = arity_translate(&kind).map_err(|_| SignatureError::KindNotMlf { name: name.to_string() })?;
        self.declare(ConstDecl {
            name: Arc::from(name),
            arity,
            kind: Some(kind),
        })
    }

    /// Validates and appends a rule.
    pub fn add_rule(&mut self, rule: RewriteRule) -> Result<(), SignatureError> {
        let rule = validate_rule(self, rule)?;
        self.add_rule_unchecked(rule)
    }

    /// Appends a rule without checking arities or pattern shape. Only the
    /// uniqueness of the name is enforced; used to inject faulty rules.
    pub fn add_rule_unchecked(&mut self, rule: RewriteRule) -> Result<(), SignatureError> {
        if let Some(existing) = self.rule(&rule.name) {
            if *existing == rule {
                return Ok(());
            }
            return Err(SignatureError::DuplicateRule(rule.name.to_string()));
        }
        self.rules.push(rule);
        Ok(())
    }

    /// Parses a rule written in surface syntax against this signature and
    /// adds it.
    pub fn add_rule_text(
        &mut self,
        name: &str,
        context: &str,
        lhs: &str,
        rhs: &str,
        arity: Arity,
    ) -> Result<(), SignatureError> {
        let rule = self.parse_rule_parts(name, context, lhs, rhs, arity)?;
        self.add_rule(rule)
    }

    fn parse_rule_parts(
        &self,
        name: &str,
        context: &str,
        lhs: &str,
        rhs: &str,
        arity: Arity,
    ) -> Result<RewriteRule, SignatureError> {
        Ok(RewriteRule {
            name: Arc::from(name),
            context: crate::surface::parse_arity_context(context)?,
            lhs: crate::surface::parse_term(lhs, self)?,
            rhs: crate::surface::parse_term(rhs, self)?,
            arity,
        })
    }

    /// Union of two signatures; `other`'s entries come after `self`'s.
    pub fn merge(&mut self, other: &Signature) -> Result<(), SignatureError> {
        for c in &other.consts {
            self.declare(c.clone())?;
        }
        for r in &other.rules {
            self.add_rule_unchecked(r.clone())?;
        }
        Ok(())
    }

    pub fn merged(mut self, other: &Signature) -> Result<Signature, SignatureError> {
        self.merge(other)?;
        Ok(self)
    }

    /// A copy with only the named rules (in signature order).
    pub fn restrict_rules(&self, keep: &BTreeSet<Name>) -> Signature {
        Signature {
            consts: self.consts.clone(),
            index: self.index.clone(),
            rules: self.rules.iter().filter(|r| keep.contains(&r.name)).cloned().collect(),
        }
    }

    pub fn without_rules(&self) -> Signature {
        self.restrict_rules(&BTreeSet::new())
    }

    // ---- builtins ----

    /// Dependent pairs: `Sigma`, `pair`, `pi1`, `pi2` with rules `pi1`, `pi2`.
    pub fn sigma() -> Signature {
        let mut s = Signature::empty();
        let decls = [
            ("Sigma", "(A:Type)(B:(A)Type)Type"),
            ("pair", "(A:Type)(B:(A)Type)(a:A)(b:B a)Sigma A B"),
            ("pi1", "(A:Type)(B:(A)Type)(z:Sigma A B)A"),
            ("pi2", "(A:Type)(B:(A)Type)(z:Sigma A B)B (pi1 A B z)"),
        ];
        for (name, kind) in decls {
            s.declare_builtin_kind(name, kind);
        }
        let ctx = "A:0, B:(0,0), a:0, b:0";
        s.add_rule_text("pi1", ctx, "pi1 A B (pair A B a b)", "a", Arity::Zero)
            .expect("builtin rule");
        s.add_rule_text("pi2", ctx, "pi2 A B (pair A B a b)", "b", Arity::Zero)
            .expect("builtin rule");
        s
    }

    /// Booleans as the two-element finite type, with rules `b1` and `b2`.
    pub fn bool() -> Signature {
        let mut s = finite_type("Bool", &["true", "false"]).expect("builtin finite type");
        for (rule, new_name) in s.rules.iter_mut().zip(["b1", "b2"]) {
            rule.name = Arc::from(new_name);
        }
        s
    }

    /// A universe `U` with code `bool` decoded by `uo`, rule `u`.
    pub fn universe() -> Signature {
        let mut s = Signature::empty();
        for (name, kind) in [("U", "Type"), ("Bool", "Type"), ("bool", "U"), ("uo", "(U)Type")] {
            s.declare_builtin_kind(name, kind);
        }
        s.add_rule_text("u", "", "uo bool", "Bool", Arity::Zero)
            .expect("builtin rule");
        s
    }

    pub fn builtin(name: &str) -> Result<Signature, SignatureError> {
        match name {
            "sigma" => Ok(Signature::sigma()),
            "bool" => Ok(Signature::bool()),
            "universe" => Ok(Signature::universe()),
            other => Err(SignatureError::UnknownBuiltin(other.to_string())),
        }
    }

    /// All three builtins merged.
    pub fn builtins() -> Signature {
        Signature::sigma()
            .merged(&Signature::bool())
            .and_then(|s| s.merged(&Signature::universe()))
            .expect("builtins agree on shared constants")
    }

    fn declare_builtin_kind(&mut self, name: &str, kind: &str) {
        let k = crate::surface::parse_kind(kind, &*self).expect("builtin kind parses");
        self.declare_kind(name, k).expect("builtin constant");
    }

    /// `sig:<builtin>` or a path to a signature file.
    pub fn resolve(spec: &str) -> Result<Signature, SignatureError> {
        match spec.strip_prefix("sig:") {
            Some(b) => Signature::builtin(b),
            None => Signature::load(Path::new(spec)),
        }
    }

    pub fn load(path: &Path) -> Result<Signature, SignatureError> {
        let src = std::fs::read_to_string(path).map_err(|e| SignatureError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut sig = Signature::empty();
        sig.extend_from_source(&src, Some(&path.display().to_string()))?;
        Ok(sig)
    }

    pub fn parse(src: &str) -> Result<Signature, SignatureError> {
        let mut sig = Signature::empty();
        sig.extend_from_source(src, None)?;
        Ok(sig)
    }

    /// Reads declarations from signature-file text:
    ///
    /// ```text
    /// const <name> : arity <arity> [kind <kind>] ;
    /// const <name> : kind <kind> ;
    /// rule [<name>] [<bindings>] <lhs> --> <rhs> : <arity> ;
    /// finite <name> = <c1> | ... | <cn> ;
    /// ```
    ///
    /// A rule without a name is called `<head>.<n>`. Without a bracketed
    /// context the pattern variables get the arities their positions demand.
    pub fn extend_from_source(&mut self, src: &str, file: Option<&str>) -> Result<(), SignatureError> {
        let mut p = Parser::new(src, file)?;
        while !p.at_eof() {
            if p.peek_keyword("const") {
                p.expect_keyword("const")?;
                let name = p.ident()?;
                p.expect_colon()?;
                let mut arity = None;
                let mut kind = None;
                if p.peek_keyword("arity") {
                    p.expect_keyword("arity")?;
                    arity = Some(p.arity()?);
                }
                if p.peek_keyword("kind") {
                    p.expect_keyword("kind")?;
                    kind = Some(p.kind(&*self)?);
                }
                let span = p.span();
                p.expect_semi()?;
                let decl = match (arity, kind) {
                    (Some(arity), kind) => ConstDecl {
                        name: Arc::from(name.as_str()),
                        arity,
                        kind,
                    },
                    (None, Some(kind)) => {
                        let arity =
                            arity_translate(&kind).map_err(|_| SignatureError::KindNotMlf { name: name.clone() })?;
                        ConstDecl {
                            name: Arc::from(name.as_str()),
                            arity,
                            kind: Some(kind),
                        }
                    }
                    (None, None) => return Err(ParseError::syntax(span, "expected `arity` or `kind`").into()),
                };
                self.declare(decl)?;
            } else if p.peek_keyword("rule") {
                p.expect_keyword("rule")?;
                let mut name = None;
                if !p.peek_lbracket() && p.peek_ident_then_lbracket() {
                    name = Some(p.ident()?);
                }
                let context = if p.peek_lbracket() {
                    Some(p.bracketed_arity_bindings()?)
                } else {
                    None
                };
                let lhs = p.term(&*self)?;
                p.expect_arrow()?;
                let rhs = p.term(&*self)?;
                p.expect_colon()?;
                let arity = p.arity()?;
                p.expect_semi()?;
                let name = match name {
                    Some(n) => n,
                    None => self.default_rule_name(&lhs),
                };
                let context = match context {
                    Some(c) => c,
                    None => pattern_context(self, &lhs),
                };
                self.add_rule(RewriteRule {
                    name: Arc::from(name.as_str()),
                    context,
                    lhs,
                    rhs,
                    arity,
                })?;
            } else if p.peek_keyword("finite") {
                p.expect_keyword("finite")?;
                let ty = p.ident()?;
                p.expect_equals()?;
                let mut ctors = vec![p.ident()?];
                while p.eat_bar() {
                    ctors.push(p.ident()?);
                }
                p.expect_semi()?;
                let refs: Vec<&str> = ctors.iter().map(String::as_str).collect();
                let frag = finite_type(&ty, &refs)?;
                self.merge(&frag)?;
            } else {
                return Err(p.unexpected_here("`const`, `rule` or `finite`").into());
            }
        }
        Ok(())
    }

    fn default_rule_name(&self, lhs: &Term) -> String {
        let head = match lhs.spine().0 {
            Term::Const(c) => c.to_string(),
            _ => "rule".to_string(),
        };
        (1..)
            .map(|i| format!("{head}.{i}"))
            .find(|n| self.rule(n).is_none())
            .expect("unbounded search")
    }
}

/// Arities for the pattern variables of `lhs`, read off the arities of the
/// constants they are arguments of. Variables in positions whose arity
/// cannot be determined are left out, so validation reports them.
pub fn pattern_context(sig: &Signature, lhs: &Term) -> ArityContext {
    fn go(sig: &Signature, t: &Term, ctx: &mut ArityContext) {
        let (head, args) = t.spine();
        let Term::Const(c) = head else { return };
        let Some(mut a) = sig.const_arity(c).cloned() else {
            return;
        };
        for arg in args {
            let Some((dom, cod)) = a.split().map(|(d, c)| (d.clone(), c.clone())) else {
                return;
            };
            match arg {
                Term::Free(v) if !ctx.contains(v) => ctx.push(v.clone(), dom),
                _ => go(sig, arg, ctx),
            }
            a = cod;
        }
    }
    let mut ctx = ArityContext::new();
    go(sig, lhs, &mut ctx);
    ctx
}

/// Checks pattern shape, linearity, declared constants and arity
/// preservation: both sides must have the declared arity under the
/// pattern context.
pub fn validate_rule(sig: &Signature, rule: RewriteRule) -> Result<RewriteRule, SignatureError> {
    let name = rule.name.to_string();
    for c in rule.lhs.constants().iter().chain(rule.rhs.constants().iter()) {
        if sig.constant(c).is_none() {
            return Err(SignatureError::UndeclaredConstant {
                rule: name,
                name: c.to_string(),
            });
        }
    }
    let malformed = |reason: &str| SignatureError::MalformedPattern {
        rule: name.clone(),
        reason: reason.to_string(),
    };
    let (head, args) = rule.lhs.spine();
    if !matches!(head, Term::Const(_)) {
        return Err(malformed("left-hand side must be headed by a constant"));
    }
    if args.is_empty() {
        return Err(malformed("left-hand side must apply its head to patterns"));
    }
    let non_linear = |v: &Name| SignatureError::NonLinearPattern {
        rule: name.clone(),
        var: v.to_string(),
    };
    let mut top = BTreeSet::new();
    let mut nested_owner: HashMap<Name, usize> = HashMap::new();
    for (i, arg) in args.iter().enumerate() {
        match arg {
            Term::Free(v) => {
                if !top.insert(v.clone()) {
                    return Err(non_linear(v));
                }
            }
            Term::Const(_) => {}
            Term::App(..) => {
                let (h, inner) = arg.spine();
                if !matches!(h, Term::Const(_)) {
                    return Err(malformed("nested patterns must be headed by a constant"));
                }
                for p in inner {
                    match p {
                        Term::Free(v) => {
                            if nested_owner.insert(v.clone(), i).is_some() {
                                return Err(non_linear(v));
                            }
                        }
                        Term::Const(_) => {}
                        _ => return Err(malformed("patterns are limited to depth two")),
                    }
                }
            }
            _ => return Err(malformed("patterns cannot contain binders")),
        }
    }
    let seen: BTreeSet<Name> = top.into_iter().chain(nested_owner.into_keys()).collect();
    if !rule.rhs.free_vars().is_subset(&seen) {
        let extra = rule.rhs.free_vars().difference(&seen).next().cloned().unwrap();
        return Err(malformed(&format!(
            "right-hand side variable `{extra}` does not occur on the left"
        )));
    }
    if !ctx_valid(&rule.context) {
        let mut names = BTreeSet::new();
        let dup = rule.context.names().find(|n| !names.insert((*n).clone())).unwrap();
        return Err(SignatureError::InvalidContext {
            rule: name,
            name: dup.to_string(),
        });
    }
    for (side, t) in [(Side::Lhs, &rule.lhs), (Side::Rhs, &rule.rhs)] {
        match infer_term_arity(sig, &rule.context, t) {
            Ok(a) if a == rule.arity => {}
            Ok(found) => {
                return Err(SignatureError::ArityMismatch {
                    rule: name,
                    side,
                    expected: rule.arity.clone(),
                    found,
                })
            }
            Err(error) => {
                return Err(SignatureError::NoArity {
                    rule: name,
                    side,
                    error,
                })
            }
        }
    }
    Ok(rule)
}

/// Constants and rules for a finite type with the given constructors:
/// `T : Type`, `ci : T`, an eliminator `E_T` and one rule `E_T.ci` per
/// constructor.
pub fn finite_type(name: &str, ctors: &[&str]) -> Result<Signature, SignatureError> {
    if ctors.is_empty() {
        return Err(SignatureError::EmptyFiniteType(name.to_string()));
    }
    let mut seen = BTreeSet::new();
    for c in ctors {
        if !seen.insert(*c) {
            return Err(SignatureError::DuplicateConstructor {
                ty: name.to_string(),
                name: c.to_string(),
            });
        }
    }
    let mut s = Signature::empty();
    let ty = Term::constant(name);
    s.declare_kind(name, Kind::Type)?;
    for c in ctors {
        s.declare_kind(c, Kind::el(ty.clone()))?;
    }
    let elim = format!("E_{name}");
    let p = Term::free("P");
    let case_names: Vec<String> = (1..=ctors.len()).map(|i| format!("p{i}")).collect();
    // (z:El T)El(P z), then the cases, then the motive; built inside out so
    // every binder closes over its name.
    let mut k = Kind::pi(
        "z",
        Kind::el(ty.clone()),
        Kind::el(Term::app(p.clone(), Term::free("z"))),
    );
    for (pi, c) in case_names.iter().zip(ctors).rev() {
        k = Kind::pi(pi, Kind::el(Term::app(p.clone(), Term::constant(c))), k);
    }
    k = Kind::pi("P", Kind::arrow(Kind::el(ty), Kind::Type), k);
    s.declare_kind(&elim, k)?;
    let mut ctx = ArityContext::new();
    ctx.push(Arc::from("P"), Arity::pair(Arity::Zero, Arity::Zero));
    for pi in &case_names {
        ctx.push(Arc::from(pi.as_str()), Arity::Zero);
    }
    for (i, c) in ctors.iter().enumerate() {
        let args = std::iter::once(p.clone())
            .chain(case_names.iter().map(|n| Term::free(n)))
            .chain(std::iter::once(Term::constant(c)));
        s.add_rule(RewriteRule {
            name: Arc::from(format!("{elim}.{c}").as_str()),
            context: ctx.clone(),
            lhs: Term::apps(Term::constant(&elim), args),
            rhs: Term::free(&case_names[i]),
            arity: Arity::Zero,
        })?;
    }
    Ok(s)
}
