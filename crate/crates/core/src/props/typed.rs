//! Generation of terms that are well-typed in the framework proper.
//!
//! Candidates are proposed goal-directed (heads whose result kind matches
//! the goal first-order, abstractions for product goals, planted β and η
//! redexes) and every candidate is validated by the checker, so outputs are
//! well-typed regardless of how good the proposals are.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::signature::Signature;
use crate::surface::parse_type_context;
use crate::syntax::{Kind, Name, Term};
use crate::typecheck::{arity_translate, Checker, TypeContext};

/// A context over the builtin signatures with variables of every shape the
/// builtin constants consume.
pub const CORPUS_CONTEXT: &str = "\
assume A : Type;
assume B : (x:El(A))Type;
assume a : El(A);
assume b : El(B a);
assume f : (x:El(A))El(A);
assume s : El(Sigma A B);
assume P : (x:El(Bool))Type;
assume p : El(P true);
assume q : El(P false);
assume c : El(Bool);
assume F : (X:Type)(x:El(X))El(X);
";

/// [`CORPUS_CONTEXT`] checked against `checker`'s signature, which must
/// contain the builtins.
pub fn corpus_context(checker: &Checker<'_>) -> TypeContext {
    let entries = parse_type_context(CORPUS_CONTEXT, checker.sig).expect("corpus context parses");
    checker.check_context(entries).expect("corpus context is valid")
}

pub struct TypedGen<'c, 'a, R> {
    checker: &'c Checker<'a>,
    rng: &'c mut R,
    fresh: usize,
}

fn leading_pis(k: &Kind) -> usize {
    match k {
        Kind::Pi(_, _, c) => 1 + leading_pis(c),
        _ => 0,
    }
}

fn meta(i: usize) -> Name {
    Name::from(format!("?{i}").as_str())
}

/// First-order matching of `pat` (metavariables `?i`) against `t`,
/// recording the assignments it can read off. Mismatches are ignored: the
/// checker has the last word.
fn match_term(pat: &Term, t: &Term, out: &mut HashMap<Name, Term>) {
    match (pat, t) {
        (Term::Free(m), _) if m.starts_with('?') => {
            if t.is_locally_closed() {
                out.entry(m.clone()).or_insert_with(|| t.clone());
            }
        }
        (Term::App(p1, p2), Term::App(t1, t2)) => {
            match_term(p1, t1, out);
            match_term(p2, t2, out);
        }
        _ => {}
    }
}

fn match_kind(pat: &Kind, k: &Kind, out: &mut HashMap<Name, Term>) {
    match (pat, k) {
        (Kind::El(p), Kind::El(t)) => match_term(p, t, out),
        (Kind::Pi(_, p1, _), Kind::Pi(_, k1, _)) => match_kind(p1, k1, out),
        _ => {}
    }
}

impl<'c, 'a, R: Rng> TypedGen<'c, 'a, R> {
    pub fn new(checker: &'c Checker<'a>, rng: &'c mut R) -> Self {
        TypedGen { checker, rng, fresh: 0 }
    }

    fn fresh_name(&mut self, ctx: &TypeContext) -> Name {
        loop {
            let n = Name::from(format!("w{}", self.fresh).as_str());
            self.fresh += 1;
            if ctx.lookup(&n).is_none() && self.checker.sig.constant(&n).is_none() {
                return n;
            }
        }
    }

    fn heads(&self, ctx: &TypeContext) -> Vec<(Term, Kind)> {
        let mut out: Vec<(Term, Kind)> = ctx
            .entries()
            .iter()
            .filter_map(|(x, k)| Some((Term::Free(x.clone()), self.checker.normalize_kind(k)?)))
            .collect();
        for d in self.checker.sig.constants() {
            if let Some(k) = d.kind.as_ref().and_then(|k| self.checker.normalize_kind(k)) {
                out.push((Term::Const(d.name.clone()), k));
            }
        }
        out
    }

    /// A domain kind for a fresh abstraction: the kind of some head that
    /// is not a product, or `Type`.
    fn simple_kind(&mut self, ctx: &TypeContext) -> Kind {
        let simple: Vec<Kind> = self
            .heads(ctx)
            .into_iter()
            .map(|(_, k)| k)
            .filter(|k| !matches!(k, Kind::Pi(..)))
            .collect();
        if simple.is_empty() || self.rng.gen_bool(0.2) {
            Kind::Type
        } else {
            simple[self.rng.gen_range(0..simple.len())].clone()
        }
    }

    fn well_typed(&self, ctx: &TypeContext, t: &Term) -> Option<Kind> {
        self.checker.infer_type(ctx, t).ok()
    }

    /// Applies `head : kind` to `n` arguments, taking matched ones from
    /// `assigned` when they fit and generating the rest.
    fn apply_head(
        &mut self,
        ctx: &TypeContext,
        head: &Term,
        kind: &Kind,
        n: usize,
        assigned: &HashMap<Name, Term>,
        depth: usize,
    ) -> Option<Term> {
        let mut args: Vec<Term> = Vec::with_capacity(n);
        let mut cur = kind.clone();
        for _ in 0..n {
            let Kind::Pi(_, dom, cod) = cur else { return None };
            let dom = self.checker.normalize_kind(&dom)?;
            let i = args.len();
            let fits = assigned.get(&meta(i)).filter(|t| {
                self.well_typed(ctx, t)
                    .is_some_and(|k| self.checker.conv_kind(&k, &dom))
            });
            let arg = match fits {
                Some(t) => t.clone(),
                None => self.gen_of(ctx, &dom, depth.saturating_sub(1))?,
            };
            cur = cod.instantiate(&arg);
            args.push(arg);
        }
        Some(Term::apps(head.clone(), args))
    }

    /// A term of kind `target` (up to conversion), or `None`.
    pub fn gen_of(&mut self, ctx: &TypeContext, target: &Kind, depth: usize) -> Option<Term> {
        let target = self.checker.normalize_kind(target)?;
        let heads = self.heads(ctx);
        let direct: Vec<&Term> = heads
            .iter()
            .filter(|(_, k)| self.checker.conv_kind(k, &target))
            .map(|(t, _)| t)
            .collect();
        if !direct.is_empty() && (depth == 0 || self.rng.gen_bool(0.35)) {
            return Some(direct[self.rng.gen_range(0..direct.len())].clone());
        }
        if depth == 0 {
            return None;
        }
        let want = arity_translate(&target).ok()?;
        #[derive(Clone, Copy)]
        enum Cand {
            Head(usize, usize),
            Lam,
            Beta,
            Eta,
        }
        let mut cands: Vec<(Cand, u32)> = Vec::new();
        for (i, (_, k)) in heads.iter().enumerate() {
            let mut cur = k;
            let mut n = 0;
            while let Kind::Pi(_, _, c) = cur {
                cur = c;
                n += 1;
                if arity_translate(cur).ok().as_ref() == Some(&want) && leading_pis(cur) == leading_pis(&target) {
                    cands.push((Cand::Head(i, n), 3));
                }
            }
        }
        if matches!(target, Kind::Pi(..)) {
            cands.push((Cand::Lam, 6));
            cands.push((Cand::Eta, 1));
        }
        cands.push((Cand::Beta, 1));
        for _ in 0..6 {
            if cands.is_empty() {
                break;
            }
            let total: u32 = cands.iter().map(|(_, w)| w).sum();
            let mut pick = self.rng.gen_range(0..total);
            let mut idx = 0;
            while pick >= cands[idx].1 {
                pick -= cands[idx].1;
                idx += 1;
            }
            let (cand, _) = cands.swap_remove(idx);
            let got = match cand {
                Cand::Head(i, n) => {
                    let (h, k) = &heads[i];
                    let mut opened = k.clone();
                    for j in 0..n {
                        let Kind::Pi(_, _, c) = opened else { unreachable!() };
                        opened = c.open(&meta(j));
                    }
                    let mut assigned = HashMap::new();
                    match_kind(&opened, &target, &mut assigned);
                    self.apply_head(ctx, h, k, n, &assigned, depth)
                }
                Cand::Lam => {
                    let Kind::Pi(b, dom, cod) = &target else { unreachable!() };
                    let x = self.fresh_name(ctx);
                    let inner = ctx.pushed(x.clone(), (**dom).clone());
                    let body = self.gen_of(&inner, &cod.open(&x), depth - 1)?;
                    let mut lam = Term::lam(&x, (**dom).clone(), body);
                    if let Term::Lam(hint, ..) = &mut lam {
                        *hint = b.clone();
                    }
                    Some(lam)
                }
                Cand::Eta => {
                    let Kind::Pi(b, dom, _) = &target else { unreachable!() };
                    let m = self.gen_of(ctx, &target, depth - 1)?;
                    let x = self.fresh_name(ctx);
                    let mut lam = Term::lam(&x, (**dom).clone(), Term::app(m, Term::Free(x.clone())));
                    if let Term::Lam(hint, ..) = &mut lam {
                        *hint = b.clone();
                    }
                    Some(lam)
                }
                Cand::Beta => {
                    let d = self.simple_kind(ctx);
                    let x = self.fresh_name(ctx);
                    let inner = ctx.pushed(x.clone(), d.clone());
                    let body = self.gen_of(&inner, &target, depth - 1)?;
                    let n = self.gen_of(ctx, &d, depth - 1)?;
                    Some(Term::app(Term::lam(&x, d, body), n))
                }
            };
            if let Some(t) = got {
                if self
                    .well_typed(ctx, &t)
                    .is_some_and(|k| self.checker.conv_kind(&k, &target))
                {
                    return Some(t);
                }
            }
        }
        if direct.is_empty() {
            None
        } else {
            Some(direct[self.rng.gen_range(0..direct.len())].clone())
        }
    }

    /// Some well-typed term and its kind.
    pub fn gen_any(&mut self, ctx: &TypeContext, depth: usize) -> Option<(Term, Kind)> {
        let roll = self.rng.gen_range(0..20);
        let t = if roll < 14 || depth == 0 {
            let heads = self.heads(ctx);
            let (h, k) = heads[self.rng.gen_range(0..heads.len())].clone();
            let max = leading_pis(&k);
            let n = if max == 0 || self.rng.gen_bool(0.6) {
                max
            } else {
                self.rng.gen_range(0..=max)
            };
            if n > 0 && depth == 0 {
                return None;
            }
            self.apply_head(ctx, &h, &k, n, &HashMap::new(), depth)?
        } else if roll < 17 {
            let d = self.simple_kind(ctx);
            let x = self.fresh_name(ctx);
            let inner = ctx.pushed(x.clone(), d.clone());
            let (body, _) = self.gen_any(&inner, depth - 1)?;
            Term::lam(&x, d, body)
        } else {
            let d = self.simple_kind(ctx);
            let x = self.fresh_name(ctx);
            let inner = ctx.pushed(x.clone(), d.clone());
            let (body, _) = self.gen_any(&inner, depth - 1)?;
            let n = self.gen_of(ctx, &d, depth - 1)?;
            Term::app(Term::lam(&x, d, body), n)
        };
        let k = self.well_typed(ctx, &t)?;
        Some((t, k))
    }
}

/// Draws one well-typed term, retrying a bounded number of times.
pub fn gen_typed<R: Rng>(checker: &Checker<'_>, ctx: &TypeContext, depth: usize, rng: &mut R) -> Option<(Term, Kind)> {
    let mut g = TypedGen::new(checker, rng);
    (0..50).find_map(|_| g.gen_any(ctx, depth))
}

/// `n` α-distinct well-typed terms with their kinds: every constant of the
/// signature and every context variable first, then generated terms.
pub fn typed_corpus(checker: &Checker<'_>, ctx: &TypeContext, seed: u64, n: usize) -> Vec<(Term, Kind)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |t: Term, k: Kind, out: &mut Vec<(Term, Kind)>| {
        if seen.insert(t.clone()) {
            out.push((t, k));
        }
    };
    let sig: &Signature = checker.sig;
    for d in sig.constants() {
        let t = Term::Const(d.name.clone());
        if let Ok(k) = checker.infer_type(ctx, &t) {
            push(t, k, &mut out);
        }
    }
    for (x, _) in ctx.entries() {
        let t = Term::Free(x.clone());
        if let Ok(k) = checker.infer_type(ctx, &t) {
            push(t, k, &mut out);
        }
    }
    let mut g = TypedGen::new(checker, &mut rng);
    let mut attempts = 0;
    while out.len() < n && attempts < n * 50 {
        attempts += 1;
        if let Some((t, k)) = g.gen_any(ctx, 3) {
            push(t, k, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{Reducer, RuleSet};
    use crate::syntax::Expr;

    #[test]
    fn corpus_is_well_typed_and_covers_the_constants() {
        let sig = Signature::builtins();
        let checker = Checker::new(&sig);
        let ctx = corpus_context(&checker);
        let corpus = typed_corpus(&checker, &ctx, 42, 300);
        assert_eq!(corpus.len(), 300);
        for (t, k) in &corpus {
            let got = checker.infer_type(&ctx, t).unwrap();
            assert!(checker.conv_kind(&got, k), "{t}");
        }
        for d in sig.constants() {
            let applied = corpus
                .iter()
                .any(|(t, _)| matches!(t.spine(), (Term::Const(c), args) if *c == d.name && !args.is_empty()));
            let takes_args = matches!(d.kind, Some(Kind::Pi(..)));
            assert!(applied || !takes_args, "no application of {}", d.name);
        }
    }

    #[test]
    fn corpus_contains_redexes() {
        let sig = Signature::builtins();
        let checker = Checker::new(&sig);
        let ctx = corpus_context(&checker);
        let corpus = typed_corpus(&checker, &ctx, 1, 300);
        let all = RuleSet::all();
        let r = Reducer::new(&sig, &all);
        let tags: HashSet<String> = corpus
            .iter()
            .flat_map(|(t, _)| r.redexes(&Expr::Term(t.clone())))
            .map(|(_, tag)| tag.to_string())
            .collect();
        for want in ["beta", "eta", "sig:pi1"] {
            assert!(tags.contains(want), "{want} missing from {tags:?}");
        }
    }

    #[test]
    fn goal_directed_generation_hits_the_goal() {
        let sig = Signature::builtins();
        let checker = Checker::new(&sig);
        let ctx = corpus_context(&checker);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = TypedGen::new(&checker, &mut rng);
        let goal = crate::surface::parse_kind("El(Sigma A B)", &sig).unwrap();
        let mut hits = 0;
        for _ in 0..20 {
            if let Some(t) = g.gen_of(&ctx, &goal, 3) {
                let k = checker.infer_type(&ctx, &t).unwrap();
                assert!(checker.conv_kind(&k, &goal));
                hits += 1;
            }
        }
        assert!(hits >= 15);
    }
}
