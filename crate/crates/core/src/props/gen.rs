//! Arity-directed generation of correct-arity terms and kinds.
//!
//! The generator builds a derivation top-down and reads the subject off it,
//! so every output has the requested arity by construction; the result is
//! still re-checked with `infer_arity` before it is handed out.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arity::{ctx_valid, infer_arity};
use crate::reduce::{Reducer, RuleSet, RuleTag};
use crate::signature::{RewriteRule, Signature};
use crate::syntax::{Arity, ArityContext, Class, Expr, Kind, Name, Term};

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Upper bound on the size of the output.
    pub size: usize,
    pub seed: u64,
    pub context: ArityContext,
    pub target: Arity,
    pub class: Class,
    /// Redexes the generator may plant. `beta2` also allows kind
    /// application anywhere.
    pub rules: RuleSet,
}

impl GenConfig {
    pub fn new(context: ArityContext, target: Arity) -> Self {
        GenConfig {
            size: 12,
            seed: 0,
            context,
            target,
            class: Class::Term,
            rules: RuleSet::all(),
        }
    }

    pub fn size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn class(mut self, class: Class) -> Self {
        self.class = class;
        self
    }

    pub fn rules(mut self, rules: RuleSet) -> Self {
        self.rules = rules;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("size bound must be at least 1")]
    ZeroSize,
    #[error("generation context is not valid")]
    InvalidContext,
    #[error("no {class} of arity {target} found within size {size}")]
    Unsatisfiable { class: Class, target: Arity, size: usize },
}

/// A generated subject together with its re-checked arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub expr: Expr,
    pub arity: Arity,
}

const ATTEMPTS: usize = 8;
const MAX_CALLS: usize = 4000;

/// Deterministic in `cfg.seed`.
pub fn gen_term(sig: &Signature, cfg: &GenConfig) -> Result<Generated, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    gen_with(sig, cfg, &mut rng)
}

/// As [`gen_term`] but drawing from `rng`; `cfg.seed` is ignored.
pub fn gen_with<R: Rng>(sig: &Signature, cfg: &GenConfig, rng: &mut R) -> Result<Generated, GenError> {
    gen_focused(sig, cfg, None, rng)
}

/// A subject containing at least one redex of kind `tag`, or `None` after
/// `tries` unsuccessful draws.
pub fn gen_with_redex<R: Rng>(
    sig: &Signature,
    cfg: &GenConfig,
    tag: &RuleTag,
    tries: usize,
    rng: &mut R,
) -> Option<Generated> {
    let only = RuleSet::single(tag);
    let reducer = Reducer::new(sig, &only);
    for _ in 0..tries {
        if let Ok(g) = gen_focused(sig, cfg, Some(tag), rng) {
            if !reducer.redexes(&g.expr).is_empty() {
                return Some(g);
            }
        }
    }
    None
}

fn gen_focused<R: Rng>(
    sig: &Signature,
    cfg: &GenConfig,
    focus: Option<&RuleTag>,
    rng: &mut R,
) -> Result<Generated, GenError> {
    if cfg.size == 0 {
        return Err(GenError::ZeroSize);
    }
    if !ctx_valid(&cfg.context) {
        return Err(GenError::InvalidContext);
    }
    for _ in 0..ATTEMPTS {
        let mut g = Gen::new(sig, cfg, focus, rng);
        let expr = match cfg.class {
            Class::Term => g.term(&cfg.target, cfg.size).map(Expr::Term),
            Class::Kind => g.kind(&cfg.target, cfg.size).map(Expr::Kind),
        };
        if let Some(expr) = expr {
            match infer_arity(sig, &cfg.context, &expr) {
                Ok(a) if a == cfg.target => return Ok(Generated { expr, arity: a }),
                other => panic!("generator produced {expr} with {other:?}, wanted {}", cfg.target),
            }
        }
    }
    Err(GenError::Unsatisfiable {
        class: cfg.class,
        target: cfg.target.clone(),
        size: cfg.size,
    })
}

/// A random small arity, mostly `0`.
pub fn small_arity<R: Rng>(rng: &mut R) -> Arity {
    let z = Arity::Zero;
    match rng.gen_range(0..20) {
        0..=11 => z,
        12..=16 => Arity::pair(z.clone(), z),
        17..=18 => Arity::pair(Arity::pair(z.clone(), z.clone()), z),
        _ => Arity::pair(z.clone(), Arity::pair(z.clone(), z)),
    }
}

/// Picks indices in weighted random order, without replacement.
fn weighted_order<R: Rng>(rng: &mut R, weights: &[u32]) -> Vec<usize> {
    let mut left: Vec<(usize, u32)> = weights.iter().copied().enumerate().filter(|(_, w)| *w > 0).collect();
    let mut out = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let total: u32 = left.iter().map(|(_, w)| w).sum();
        let mut pick = rng.gen_range(0..total);
        let mut i = 0;
        while pick >= left[i].1 {
            pick -= left[i].1;
            i += 1;
        }
        out.push(left.remove(i).0);
    }
    out
}

/// Random split of `total` into `parts` budgets, each at least 1.
fn split<R: Rng>(rng: &mut R, total: usize, parts: usize) -> Option<Vec<usize>> {
    if parts == 0 || total < parts {
        return None;
    }
    let mut out = vec![1; parts];
    for _ in 0..total - parts {
        out[rng.gen_range(0..parts)] += 1;
    }
    Some(out)
}

#[derive(Clone, Copy, Debug)]
enum TermOpt {
    Var,
    Spine,
    Lam,
    Beta,
    Eta,
    Sig(usize),
}

#[derive(Clone, Copy, Debug)]
enum KindOpt {
    Type,
    El,
    Pi,
    KApp,
    Beta2,
}

struct Gen<'a, 'r, R> {
    rng: &'r mut R,
    rules: &'a RuleSet,
    focus: Option<&'a RuleTag>,
    /// Heads in scope: context variables, constants, then locals.
    scope: Vec<(Term, Arity)>,
    sig_rules: Vec<&'a RewriteRule>,
    taken: BTreeSet<Name>,
    fresh: usize,
    calls: usize,
}

impl<'a, 'r, R: Rng> Gen<'a, 'r, R> {
    fn new(sig: &'a Signature, cfg: &'a GenConfig, focus: Option<&'a RuleTag>, rng: &'r mut R) -> Self {
        let mut scope: Vec<(Term, Arity)> = cfg
            .context
            .entries()
            .iter()
            .map(|(x, a)| (Term::Free(x.clone()), a.clone()))
            .collect();
        for d in sig.constants() {
            scope.push((Term::Const(d.name.clone()), d.arity.clone()));
        }
        let mut taken: BTreeSet<Name> = cfg.context.names().cloned().collect();
        taken.extend(sig.constants().iter().map(|d| d.name.clone()));
        Gen {
            rng,
            rules: &cfg.rules,
            focus,
            scope,
            sig_rules: cfg.rules.active_rules(sig),
            taken,
            fresh: 0,
            calls: 0,
        }
    }

    fn weight(&self, tag: &RuleTag) -> u32 {
        if self.focus == Some(tag) {
            12
        } else {
            1
        }
    }

    fn fresh_name(&mut self) -> Name {
        loop {
            let n: Name = Name::from(format!("v{}", self.fresh).as_str());
            self.fresh += 1;
            if !self.taken.contains(&n) {
                return n;
            }
        }
    }

    fn budget_exhausted(&mut self) -> bool {
        self.calls += 1;
        self.calls > MAX_CALLS
    }

    /// Runs `f` with a fresh local of arity `a` in scope.
    fn with_local<T>(&mut self, a: &Arity, f: impl FnOnce(&mut Self, &Name) -> Option<T>) -> Option<T> {
        let x = self.fresh_name();
        self.scope.push((Term::Free(x.clone()), a.clone()));
        let r = f(self, &x);
        self.scope.pop();
        r
    }

    fn term(&mut self, a: &Arity, size: usize) -> Option<Term> {
        if size == 0 || self.budget_exhausted() {
            return None;
        }
        let mut opts = Vec::new();
        let mut weights = Vec::new();
        let mut push = |o: TermOpt, w: u32| {
            opts.push(o);
            weights.push(w);
        };
        if self.scope.iter().any(|(_, b)| b == a) {
            push(TermOpt::Var, if size <= 2 { 6 } else { 1 });
        }
        if size >= 3 {
            push(TermOpt::Spine, 4);
        }
        if a.split().is_some() && size >= 3 {
            push(TermOpt::Lam, 3);
        }
        if self.rules.beta && size >= 5 {
            push(TermOpt::Beta, self.weight(&RuleTag::Beta));
        }
        if self.rules.eta && a.split().is_some() && size >= 5 {
            push(TermOpt::Eta, self.weight(&RuleTag::Eta));
        }
        for (i, r) in self.sig_rules.iter().enumerate() {
            if &r.arity == a && r.lhs.size() <= size {
                push(TermOpt::Sig(i), self.weight(&RuleTag::Sig(r.name.clone())));
            }
        }
        for i in weighted_order(self.rng, &weights) {
            let got = match opts[i] {
                TermOpt::Var => self.var(a),
                TermOpt::Spine => self.spine(a, size),
                TermOpt::Lam => self.lam(a, size),
                TermOpt::Beta => self.plant_beta(a, size),
                TermOpt::Eta => self.plant_eta(a, size),
                TermOpt::Sig(r) => self.plant_sig(r, size),
            };
            if got.is_some() {
                return got;
            }
        }
        None
    }

    fn var(&mut self, a: &Arity) -> Option<Term> {
        let hits: Vec<&Term> = self.scope.iter().filter(|(_, b)| b == a).map(|(t, _)| t).collect();
        if hits.is_empty() {
            return None;
        }
        Some(hits[self.rng.gen_range(0..hits.len())].clone())
    }

    /// `h N1 ... Nk` for a head whose arity yields `a` after `k ≥ 1` arguments.
    fn spine(&mut self, a: &Arity, size: usize) -> Option<Term> {
        let mut cands: Vec<(Term, Vec<Arity>)> = Vec::new();
        for (h, ha) in &self.scope {
            let mut args = Vec::new();
            let mut cur = ha;
            while let Some((d, c)) = cur.split() {
                args.push(d.clone());
                cur = c;
                if cur == a && 2 * args.len() < size {
                    cands.push((h.clone(), args.clone()));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        let (head, args) = cands.swap_remove(self.rng.gen_range(0..cands.len()));
        let budgets = split(self.rng, size - 1 - args.len(), args.len())?;
        let mut out = Vec::with_capacity(args.len());
        for (b, n) in args.iter().zip(budgets) {
            out.push(self.term(b, n)?);
        }
        Some(Term::apps(head, out))
    }

    fn lam(&mut self, a: &Arity, size: usize) -> Option<Term> {
        let (a1, a2) = a.split()?;
        let (a1, a2) = (a1.clone(), a2.clone());
        let kb = self.rng.gen_range(1..=(size - 2).div_ceil(2));
        let k = self.kind(&a1, kb)?;
        let rest = size.checked_sub(1 + k.size())?;
        self.with_local(&a1, |g, x| {
            let body = g.term(&a2, rest)?;
            Some(Term::lam(x, k, body))
        })
    }

    fn plant_beta(&mut self, a: &Arity, size: usize) -> Option<Term> {
        let b = small_arity(self.rng);
        let budgets = split(self.rng, size - 2, 3)?;
        let k = self.kind(&b, budgets[0])?;
        let lam = self.with_local(&b, |g, x| {
            let body = g.term(a, budgets[1])?;
            Some(Term::lam(x, k, body))
        })?;
        let n = self.term(&b, budgets[2])?;
        Some(Term::app(lam, n))
    }

    /// `λx:K. M x` with `x` not free in `M`.
    fn plant_eta(&mut self, a: &Arity, size: usize) -> Option<Term> {
        let (a1, _) = a.split()?;
        let a1 = a1.clone();
        let budgets = split(self.rng, size - 3, 2)?;
        let k = self.kind(&a1, budgets[0])?;
        let m = self.term(a, budgets[1])?;
        let x = self.fresh_name();
        Some(Term::lam(&x, k, Term::app(m, Term::Free(x.clone()))))
    }

    /// An instance of a rule's left-hand side.
    fn plant_sig(&mut self, r: usize, size: usize) -> Option<Term> {
        let rule = self.sig_rules[r];
        let vars: Vec<(Name, Arity)> = rule
            .context
            .entries()
            .iter()
            .filter(|(v, _)| rule.lhs.free_vars().contains(v))
            .cloned()
            .collect();
        let fixed = rule.lhs.size() - occurrences(&rule.lhs);
        let budgets = if vars.is_empty() {
            Vec::new()
        } else {
            split(self.rng, size.checked_sub(fixed)?, vars.len())?
        };
        let mut map = std::collections::HashMap::new();
        for ((v, a), n) in vars.iter().zip(budgets) {
            let t = self.term(a, n)?;
            map.insert(v.clone(), t);
        }
        let t = rule.lhs.subst_many(&map);
        (t.size() <= size).then_some(t)
    }

    fn kind(&mut self, a: &Arity, size: usize) -> Option<Kind> {
        if size == 0 || self.budget_exhausted() {
            return None;
        }
        let mut opts = Vec::new();
        let mut weights = Vec::new();
        let mut push = |o: KindOpt, w: u32| {
            opts.push(o);
            weights.push(w);
        };
        if a.is_zero() {
            push(KindOpt::Type, if size <= 2 { 4 } else { 1 });
            if size >= 2 {
                push(KindOpt::El, 3);
            }
        } else if size >= 3 {
            push(KindOpt::Pi, 4);
        }
        if self.rules.beta2 && size >= 5 {
            push(KindOpt::KApp, 1);
            push(KindOpt::Beta2, self.weight(&RuleTag::Beta2));
        }
        for i in weighted_order(self.rng, &weights) {
            let got = match opts[i] {
                KindOpt::Type => Some(Kind::Type),
                KindOpt::El => self.term(&Arity::Zero, size - 1).map(Kind::el),
                KindOpt::Pi => self.pi(a, size),
                KindOpt::KApp => self.kapp(a, size),
                KindOpt::Beta2 => self.plant_beta2(a, size),
            };
            if got.is_some() {
                return got;
            }
        }
        None
    }

    fn pi(&mut self, a: &Arity, size: usize) -> Option<Kind> {
        let (a1, a2) = a.split()?;
        let (a1, a2) = (a1.clone(), a2.clone());
        let kb = self.rng.gen_range(1..=(size - 2).div_ceil(2));
        let k1 = self.kind(&a1, kb)?;
        let rest = size.checked_sub(1 + k1.size())?;
        self.with_local(&a1, |g, x| {
            let k2 = g.kind(&a2, rest)?;
            Some(Kind::pi(x, k1, k2))
        })
    }

    fn kapp(&mut self, a: &Arity, size: usize) -> Option<Kind> {
        let b = small_arity(self.rng);
        let budgets = split(self.rng, size - 1, 2)?;
        let k = self.kind(&Arity::pair(b.clone(), a.clone()), budgets[0])?;
        let n = self.term(&b, budgets[1])?;
        Some(Kind::kapp(k, n))
    }

    fn plant_beta2(&mut self, a: &Arity, size: usize) -> Option<Kind> {
        let b = small_arity(self.rng);
        let budgets = split(self.rng, size - 2, 3)?;
        let k1 = self.kind(&b, budgets[0])?;
        let pi = self.with_local(&b, |g, x| {
            let k2 = g.kind(a, budgets[1])?;
            Some(Kind::pi(x, k1, k2))
        })?;
        let n = self.term(&b, budgets[2])?;
        Some(Kind::kapp(pi, n))
    }
}

fn occurrences(t: &Term) -> usize {
    match t {
        Term::Free(_) => 1,
        Term::Bound(_) | Term::Const(_) => 0,
        Term::Lam(_, _, m) => occurrences(m),
        Term::App(m, n) => occurrences(m) + occurrences(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_arity_context;

    fn ctx(s: &str) -> ArityContext {
        parse_arity_context(s).unwrap()
    }

    #[test]
    fn small_application_is_reachable() {
        let cfg = GenConfig::new(ctx("f:(0,0), b:0"), Arity::Zero).size(3);
        let sig = Signature::empty();
        let found = (0..200).any(|seed| gen_term(&sig, &cfg.clone().seed(seed)).unwrap().expr.to_string() == "f b");
        assert!(found);
    }

    #[test]
    fn type_is_the_smallest_kind() {
        let cfg = GenConfig::new(ArityContext::new(), Arity::Zero)
            .size(1)
            .class(Class::Kind);
        assert_eq!(
            gen_term(&Signature::empty(), &cfg).unwrap().expr,
            Expr::Kind(Kind::Type)
        );
    }

    #[test]
    fn functions_need_room_for_a_lambda() {
        let target = Arity::pair(Arity::Zero, Arity::Zero);
        let sig = Signature::empty();
        let cfg = GenConfig::new(ArityContext::new(), target.clone()).size(1);
        assert!(matches!(gen_term(&sig, &cfg), Err(GenError::Unsatisfiable { .. })));
        let g = gen_term(&sig, &cfg.size(3)).unwrap();
        assert!(matches!(g.expr, Expr::Term(Term::Lam(..))));
        assert_eq!(g.expr.size(), 3);
    }

    #[test]
    fn zero_size_is_rejected() {
        let cfg = GenConfig::new(ArityContext::new(), Arity::Zero).size(0);
        assert_eq!(gen_term(&Signature::empty(), &cfg), Err(GenError::ZeroSize));
    }

    #[test]
    fn generation_is_deterministic() {
        let sig = Signature::builtins();
        let cfg = GenConfig::new(ctx("A:0, f:(0,0), a:0"), Arity::Zero).size(14).seed(7);
        assert_eq!(gen_term(&sig, &cfg), gen_term(&sig, &cfg));
    }

    #[test]
    fn every_constructor_shows_up() {
        let sig = Signature::builtins();
        let base = GenConfig::new(ctx("A:0, f:(0,0), a:0"), Arity::Zero).size(14);
        let (mut lam, mut app, mut el, mut pi, mut kapp, mut konst) = (false, false, false, false, false, false);
        fn walk_t(t: &Term, f: &mut dyn FnMut(&str)) {
            match t {
                Term::Lam(_, k, m) => {
                    f("lam");
                    walk_k(k, f);
                    walk_t(m, f);
                }
                Term::App(m, n) => {
                    f("app");
                    walk_t(m, f);
                    walk_t(n, f);
                }
                Term::Const(_) => f("const"),
                _ => {}
            }
        }
        fn walk_k(k: &Kind, f: &mut dyn FnMut(&str)) {
            match k {
                Kind::El(m) => {
                    f("el");
                    walk_t(m, f);
                }
                Kind::Pi(_, a, b) => {
                    f("pi");
                    walk_k(a, f);
                    walk_k(b, f);
                }
                Kind::KApp(a, m) => {
                    f("kapp");
                    walk_k(a, f);
                    walk_t(m, f);
                }
                Kind::Type => {}
            }
        }
        for seed in 0..200 {
            for class in [Class::Term, Class::Kind] {
                let g = gen_term(&sig, &base.clone().seed(seed).class(class)).unwrap();
                let mut mark = |s: &str| match s {
                    "lam" => lam = true,
                    "app" => app = true,
                    "el" => el = true,
                    "pi" => pi = true,
                    "kapp" => kapp = true,
                    _ => konst = true,
                };
                match &g.expr {
                    Expr::Term(t) => walk_t(t, &mut mark),
                    Expr::Kind(k) => walk_k(k, &mut mark),
                }
            }
        }
        assert!(lam && app && el && pi && kapp && konst);
    }

    #[test]
    fn focused_generation_plants_the_redex() {
        let sig = Signature::builtins();
        let cfg = GenConfig::new(ctx("A:0, f:(0,0), a:0"), Arity::Zero).size(20);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tag in [
            RuleTag::Beta,
            RuleTag::Sig(Name::from("pi1")),
            RuleTag::Sig(Name::from("u")),
        ] {
            assert!(gen_with_redex(&sig, &cfg, &tag, 50, &mut rng).is_some(), "{tag}");
        }
        let fun = GenConfig::new(ctx("A:0, f:(0,0), a:0"), Arity::pair(Arity::Zero, Arity::Zero)).size(14);
        assert!(gen_with_redex(&sig, &fun, &RuleTag::Eta, 50, &mut rng).is_some());
        let kind = cfg.clone().class(Class::Kind);
        assert!(gen_with_redex(&sig, &kind, &RuleTag::Beta2, 50, &mut rng).is_some());
    }
}
