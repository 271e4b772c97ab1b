use std::sync::Arc;

use mlf_kernel::props::sweep::SWEEP_CONTEXT;
use mlf_kernel::props::{exhaustive_sweep, SweepConfig};
use mlf_kernel::surface::{parse_arity_context, parse_expr};
use mlf_kernel::{alpha_eq, Expr, Kind, Signature, Term};

/// Replaces every binder annotation inside terms by `Type`.
fn erase_term(t: &Term) -> Term {
    match t {
        Term::Lam(b, _, body) => Term::Lam(b.clone(), Arc::new(Kind::Type), Arc::new(erase_term(body))),
        Term::App(f, a) => Term::App(Arc::new(erase_term(f)), Arc::new(erase_term(a))),
        other => other.clone(),
    }
}

fn erase_kind(k: &Kind) -> Kind {
    match k {
        Kind::Type => Kind::Type,
        Kind::El(t) => Kind::El(Arc::new(erase_term(t))),
        Kind::Pi(b, d, c) => Kind::Pi(b.clone(), Arc::new(erase_kind(d)), Arc::new(erase_kind(c))),
        Kind::KApp(k, t) => Kind::KApp(Arc::new(erase_kind(k)), Arc::new(erase_term(t))),
    }
}

fn erase(e: &Expr) -> Expr {
    match e {
        Expr::Term(t) => Expr::Term(erase_term(t)),
        Expr::Kind(k) => Expr::Kind(erase_kind(k)),
    }
}

#[test]
fn size_ten_sweep() {
    let sig = Signature::sigma();
    let ctx = parse_arity_context(SWEEP_CONTEXT).unwrap();
    let r = exhaustive_sweep(
        &sig,
        &ctx,
        &SweepConfig {
            max_size: 10,
            ..SweepConfig::default()
        },
    );
    assert!(
        r.lemmas_hold(),
        "{:?}",
        (r.fuel_exhaustions, r.subject_reduction_failures, r.uniqueness_failures)
    );
    assert!(r.subjects > 20_000);
    // Normal forms are not unique, but every disagreement is confined to
    // binder annotations: erased, the normal forms coincide.
    assert!(!r.normal_form_conflicts.is_empty());
    for c in &r.normal_form_conflicts {
        let nfs: Vec<Expr> = c
            .normal_forms
            .iter()
            .map(|s| erase(&parse_expr(s, &sig).unwrap()))
            .collect();
        for n in &nfs[1..] {
            assert!(alpha_eq(&nfs[0], n), "{} -> {:?}", c.subject, c.normal_forms);
        }
    }
}
