//! Exhaustive enumeration of correct-arity subjects by size.
//!
//! Subjects are produced once per α-class: locals are named by de Bruijn
//! level while building and closed into binders afterwards.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Binder, Expr, Kind, Name, Term};

type ByArity<T> = Arc<BTreeMap<Arity, Vec<T>>>;

pub struct Enumerator<'a> {
    heads: Vec<(Term, Arity)>,
    /// Include kind application (the extended grammar).
    pub kapp: bool,
    terms: HashMap<(Vec<Arity>, usize), ByArity<Term>>,
    kinds: HashMap<(Vec<Arity>, usize), ByArity<Kind>>,
    _sig: std::marker::PhantomData<&'a Signature>,
}

fn level_name(i: usize) -> Name {
    Name::from(format!("%{i}").as_str())
}

fn bind_term(i: usize, k: Kind, body: &Term) -> Term {
    Term::Lam(Binder::new("x"), Arc::new(k), Arc::new(body.close(&level_name(i))))
}

fn bind_kind(i: usize, k1: Kind, k2: &Kind) -> Kind {
    Kind::Pi(Binder::new("x"), Arc::new(k1), Arc::new(k2.close(&level_name(i))))
}

impl<'a> Enumerator<'a> {
    pub fn new(sig: &'a Signature, ctx: &ArityContext) -> Self {
        let mut heads: Vec<(Term, Arity)> = ctx
            .entries()
            .iter()
            .map(|(x, a)| (Term::Free(x.clone()), a.clone()))
            .collect();
        heads.extend(
            sig.constants()
                .iter()
                .map(|d| (Term::Const(d.name.clone()), d.arity.clone())),
        );
        Enumerator {
            heads,
            kapp: true,
            terms: HashMap::new(),
            kinds: HashMap::new(),
            _sig: std::marker::PhantomData,
        }
    }

    /// Terms of exactly `size` under `locals`, grouped by arity.
    pub fn terms(&mut self, locals: &[Arity], size: usize) -> ByArity<Term> {
        let key = (locals.to_vec(), size);
        if let Some(hit) = self.terms.get(&key) {
            return hit.clone();
        }
        let mut out: BTreeMap<Arity, Vec<Term>> = BTreeMap::new();
        if size == 1 {
            for (h, a) in &self.heads {
                out.entry(a.clone()).or_default().push(h.clone());
            }
            for (i, a) in locals.iter().enumerate() {
                out.entry(a.clone()).or_default().push(Term::Free(level_name(i)));
            }
        } else if size >= 3 {
            for s1 in 1..size - 1 {
                let funs = self.terms(locals, s1);
                let args = self.terms(locals, size - 1 - s1);
                for (fa, fs) in funs.iter() {
                    let Some((b, a)) = fa.split() else { continue };
                    let Some(ns) = args.get(b) else { continue };
                    let slot = out.entry(a.clone()).or_default();
                    for f in fs {
                        for n in ns {
                            slot.push(Term::app(f.clone(), n.clone()));
                        }
                    }
                }
            }
            for sk in 1..size - 1 {
                let ks = self.kinds(locals, sk);
                for (b, kinds) in ks.iter() {
                    let mut inner = locals.to_vec();
                    inner.push(b.clone());
                    let bodies = self.terms(&inner, size - 1 - sk);
                    for (a2, ms) in bodies.iter() {
                        let slot = out.entry(Arity::pair(b.clone(), a2.clone())).or_default();
                        for k in kinds {
                            for m in ms {
                                slot.push(bind_term(locals.len(), k.clone(), m));
                            }
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.terms.insert(key, out.clone());
        out
    }

    /// Kinds of exactly `size` under `locals`, grouped by arity.
    pub fn kinds(&mut self, locals: &[Arity], size: usize) -> ByArity<Kind> {
        let key = (locals.to_vec(), size);
        if let Some(hit) = self.kinds.get(&key) {
            return hit.clone();
        }
        let mut out: BTreeMap<Arity, Vec<Kind>> = BTreeMap::new();
        if size == 1 {
            out.insert(Arity::Zero, vec![Kind::Type]);
        } else {
            if let Some(ms) = self.terms(locals, size - 1).get(&Arity::Zero) {
                out.entry(Arity::Zero)
                    .or_default()
                    .extend(ms.iter().cloned().map(Kind::el));
            }
            for s1 in 1..size.saturating_sub(1) {
                let doms = self.kinds(locals, s1);
                for (b, k1s) in doms.iter() {
                    let mut inner = locals.to_vec();
                    inner.push(b.clone());
                    let cods = self.kinds(&inner, size - 1 - s1);
                    for (a2, k2s) in cods.iter() {
                        let slot = out.entry(Arity::pair(b.clone(), a2.clone())).or_default();
                        for k1 in k1s {
                            for k2 in k2s {
                                slot.push(bind_kind(locals.len(), k1.clone(), k2));
                            }
                        }
                    }
                }
                if self.kapp {
                    let args = self.terms(locals, size - 1 - s1);
                    for (fa, ks) in doms.iter() {
                        let Some((b, a)) = fa.split() else { continue };
                        let Some(ns) = args.get(b) else { continue };
                        let slot = out.entry(a.clone()).or_default();
                        for k in ks {
                            for n in ns {
                                slot.push(Kind::kapp(k.clone(), n.clone()));
                            }
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.kinds.insert(key, out.clone());
        out
    }

    /// Every correct-arity term and kind of size at most `max_size`, with its
    /// arity: by size, terms before kinds, then by arity.
    pub fn all(&mut self, max_size: usize) -> Vec<(Expr, Arity)> {
        let mut out = Vec::new();
        for n in 1..=max_size {
            for (a, ts) in self.terms(&[], n).iter() {
                out.extend(ts.iter().map(|t| (Expr::Term(t.clone()), a.clone())));
            }
            for (a, ks) in self.kinds(&[], n).iter() {
                out.extend(ks.iter().map(|k| (Expr::Kind(k.clone()), a.clone())));
            }
        }
        out
    }
}

/// Every correct-arity subject of size at most `max_size` over `ctx` and
/// the constants of `sig`.
pub fn enumerate(sig: &Signature, ctx: &ArityContext, max_size: usize) -> Vec<(Expr, Arity)> {
    Enumerator::new(sig, ctx).all(max_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arity::infer_arity;
    use crate::surface::{parse_arity_context, parse_expr};
    use std::collections::HashSet;

    #[test]
    fn tiny_scope_by_hand() {
        let ctx = parse_arity_context("f:(0,0), b:0").unwrap();
        let sig = Signature::empty();
        let got: Vec<String> = enumerate(&sig, &ctx, 3).iter().map(|(e, _)| e.to_string()).collect();
        // size 1: f, b, Type; size 2: El(b); size 3: f b, three λs, one Π.
        for want in [
            "f",
            "b",
            "Type",
            "El(b)",
            "f b",
            "\\x:Type.x",
            "\\x:Type.b",
            "\\x:Type.f",
            "(x:Type)Type",
        ] {
            assert!(got.contains(&want.to_string()), "missing {want} in {got:?}");
        }
        assert_eq!(got.len(), 9);
    }

    #[test]
    fn outputs_are_distinct_and_correct() {
        let sig = Signature::sigma();
        let ctx = parse_arity_context("f:(0,0), x:0, y:0").unwrap();
        let all = enumerate(&sig, &ctx, 6);
        let mut seen = HashSet::new();
        for (e, a) in &all {
            assert!(e.is_locally_closed(), "{e}");
            assert_eq!(infer_arity(&sig, &ctx, e).as_ref(), Ok(a), "{e}");
            assert!(seen.insert(e.clone()), "duplicate {e}");
        }
    }

    #[test]
    fn known_subjects_are_enumerated() {
        let sig = Signature::sigma();
        let ctx = parse_arity_context("f:(0,0), x:0, y:0").unwrap();
        let all: HashSet<Expr> = enumerate(&sig, &ctx, 8).into_iter().map(|(e, _)| e).collect();
        for s in ["\\z:Type.(\\w:El(x).w) z", "((w:Type)Type) y", "\\z:El(x).f z"] {
            assert!(all.contains(&parse_expr(s, &sig).unwrap()), "{s}");
        }
        assert!(!all.contains(&parse_expr("\\z:El(x).z z", &sig).unwrap()));
    }
}
