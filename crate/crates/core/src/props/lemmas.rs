//! Executable statements of the lemmas behind the normalisation proof.
//!
//! Each checker takes concrete inputs, tests the precondition (reporting
//! `Skip` when it does not hold) and then the conclusion. Search-based
//! conclusions distinguish refutation (`Fail`) from running out of search
//! budget (`BoundExceeded`).

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::arity::{enumerate_derivations, enumerate_derivations_ordered, infer_arity, sufficient_depth, Rule};
use crate::explore::sn_explore;
use crate::position::Position;
use crate::props::valuation::{apply_valuation, Valuation};
use crate::reduce::{Reducer, RuleSet, RuleTag};
use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Expr, Name, Term};
use crate::typecheck::{BridgeError, Checker, TypeContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Skip { reason: String },
    Fail { explanation: String },
    BoundExceeded { explanation: String },
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Pass => f.write_str("pass"),
            Outcome::Skip { reason } => write!(f, "skipped: {reason}"),
            Outcome::Fail { explanation } => write!(f, "counterexample: {explanation}"),
            Outcome::BoundExceeded { explanation } => write!(f, "search bound exceeded: {explanation}"),
        }
    }
}

impl Outcome {
    fn fail(explanation: impl Into<String>) -> Self {
        Outcome::Fail {
            explanation: explanation.into(),
        }
    }

    fn skip(reason: impl Into<String>) -> Self {
        Outcome::Skip { reason: reason.into() }
    }

    fn bound(explanation: impl Into<String>) -> Self {
        Outcome::BoundExceeded {
            explanation: explanation.into(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }

    /// The more severe of two outcomes: failure, then bound, then pass,
    /// then skip.
    pub fn and(self, other: Outcome) -> Outcome {
        fn rank(o: &Outcome) -> u8 {
            match o {
                Outcome::Fail { .. } => 3,
                Outcome::BoundExceeded { .. } => 2,
                Outcome::Pass => 1,
                Outcome::Skip { .. } => 0,
            }
        }
        if rank(&other) > rank(&self) {
            other
        } else {
            self
        }
    }
}

/// Nodes a single reachability search may visit.
pub const SEARCH_NODES: usize = 20_000;

/// One-step successors using only the reduction `tag`.
pub fn successors_by(sig: &Signature, tag: &RuleTag, e: &Expr) -> Vec<(Position, Expr)> {
    let rules = RuleSet::single(tag);
    Reducer::new(sig, &rules)
        .successors(e)
        .into_iter()
        .map(|(p, _, r)| (p, r))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reach {
    /// Reached after this many steps.
    Found(usize),
    NotFound,
    Exhausted,
}

/// Breadth-first search for `to` from `from` using `rules`, visiting at
/// most `cap` nodes.
pub fn reachable(sig: &Signature, rules: &RuleSet, from: &Expr, to: &Expr, cap: usize) -> Reach {
    let r = Reducer::new(sig, rules);
    let mut seen: HashSet<Expr> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(from.clone());
    queue.push_back((from.clone(), 0usize));
    while let Some((e, d)) = queue.pop_front() {
        if &e == to {
            return Reach::Found(d);
        }
        for (_, _, n) in r.successors(&e) {
            if seen.contains(&n) {
                continue;
            }
            if seen.len() >= cap {
                return Reach::Exhausted;
            }
            seen.insert(n.clone());
            queue.push_back((n, d + 1));
        }
    }
    Reach::NotFound
}

fn steps_to(sig: &Signature, tag: &RuleTag, from: &Expr, to: &Expr) -> bool {
    successors_by(sig, tag, from).iter().any(|(_, e)| e == to)
}

/// First clause of the substitution lemma for `tag`: if `M1 ⟶ M2` then
/// `[N/x]M1 ⟶ [N/x]M2` in one step.
pub fn check_subst_step(sig: &Signature, tag: &RuleTag, m1: &Expr, m2: &Expr, x: &str, n: &Term) -> Outcome {
    if !steps_to(sig, tag, m1, m2) {
        return Outcome::skip(format!("M1 does not {tag}-reduce to M2"));
    }
    let (s1, s2) = (m1.subst(x, n), m2.subst(x, n));
    if steps_to(sig, tag, &s1, &s2) {
        Outcome::Pass
    } else {
        Outcome::fail(format!(
            "[N/{x}]M1 = {s1} does not {tag}-reduce to [N/{x}]M2 = {s2} in one step"
        ))
    }
}

/// Second clause: if `N1 ⟶ N2` then `[N1/x]M ↠ [N2/x]M`.
pub fn check_subst_arg(sig: &Signature, tag: &RuleTag, m: &Expr, x: &str, n1: &Term, n2: &Term) -> Outcome {
    if !steps_to(sig, tag, &Expr::Term(n1.clone()), &Expr::Term(n2.clone())) {
        return Outcome::skip(format!("N1 does not {tag}-reduce to N2"));
    }
    let (s1, s2) = (m.subst(x, n1), m.subst(x, n2));
    match reachable(sig, &RuleSet::single(tag), &s1, &s2, SEARCH_NODES) {
        Reach::Found(_) => Outcome::Pass,
        Reach::NotFound => Outcome::fail(format!("{s2} is not {tag}-reachable from {s1}")),
        Reach::Exhausted => Outcome::bound(format!("search from {s1} exceeded {SEARCH_NODES} nodes")),
    }
}

/// If `M1 ⟶β M2` and `x ∉ FV(M1)` then `x ∉ FV(M2)`.
pub fn check_fv_beta(sig: &Signature, m1: &Expr, m2: &Expr, x: &str) -> Outcome {
    if !steps_to(sig, &RuleTag::Beta, m1, m2) {
        return Outcome::skip("M1 does not β-reduce to M2");
    }
    if m1.free_vars().contains(x) {
        return Outcome::skip(format!("{x} is free in M1"));
    }
    if m2.free_vars().contains(x) {
        Outcome::fail(format!("{x} became free in {m2}"))
    } else {
        Outcome::Pass
    }
}

/// The shapes an abstraction can have when it steps to an abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseShape {
    /// `λy:K1.(λx:K2.M2) y` with `y` not free in `λx:K2.M2` (η only).
    Expansion,
    /// `λx:K2.N` with `N ⟶ M2`.
    Body,
    /// `λx:K1.M2` with `K1 ⟶ K2`.
    Annotation,
}

/// Which shapes `m1` matches structurally relative to `target`. A term can
/// match more than one: `λy:K.(λx:K.g x) y` is both an expansion of
/// `λx:K.g x` and a body step to it.
pub fn classify_case(sig: &Signature, tag: &RuleTag, m1: &Term, target: &Term) -> Vec<CaseShape> {
    let mut out = Vec::new();
    let (Term::Lam(_, k1, b1), Term::Lam(_, k2, b2)) = (m1, target) else {
        return out;
    };
    if *tag == RuleTag::Eta {
        if let Term::App(l, y) = &**b1 {
            if **y == Term::Bound(0) && !l.has_loose(0) && l.shift(-1, 0) == *target {
                out.push(CaseShape::Expansion);
            }
        }
    }
    if k1 == k2 && steps_to(sig, tag, &Expr::Term((**b1).clone()), &Expr::Term((**b2).clone())) {
        out.push(CaseShape::Body);
    }
    if b1 == b2 && steps_to(sig, tag, &Expr::Kind((**k1).clone()), &Expr::Kind((**k2).clone())) {
        out.push(CaseShape::Annotation);
    }
    out
}

/// The shape a step at `pos` realises: root, inside the body, or inside
/// the annotation.
fn shape_of_step(pos: &Position) -> Option<CaseShape> {
    match pos.0.first() {
        None => Some(CaseShape::Expansion),
        Some(1) => Some(CaseShape::Body),
        Some(0) => Some(CaseShape::Annotation),
        _ => None,
    }
}

/// Case analysis for a step of `tag` ending in an abstraction. Every step
/// from `m1` to `target` must realise one of the allowed shapes (all three
/// for η, body and annotation for signature rules) and the shape it
/// realises must hold structurally.
pub fn check_case(sig: &Signature, tag: &RuleTag, m1: &Term, target: &Term) -> Outcome {
    if !matches!(target, Term::Lam(..)) {
        return Outcome::skip("target is not an abstraction");
    }
    let e1 = Expr::Term(m1.clone());
    let goal = Expr::Term(target.clone());
    let steps: Vec<Position> = successors_by(sig, tag, &e1)
        .into_iter()
        .filter(|(_, e)| *e == goal)
        .map(|(p, _)| p)
        .collect();
    if steps.is_empty() {
        return Outcome::skip(format!("M1 does not {tag}-reduce to the target"));
    }
    let shapes = classify_case(sig, tag, m1, target);
    if shapes.is_empty() {
        return Outcome::fail(format!("{m1} ⟶ {target} matches none of the shapes"));
    }
    for pos in steps {
        let Some(shape) = shape_of_step(&pos) else {
            return Outcome::fail(format!("step at {pos} is outside the abstraction"));
        };
        if shape == CaseShape::Expansion && *tag != RuleTag::Eta {
            return Outcome::fail(format!("root {tag} step from {m1} produced an abstraction"));
        }
        if !shapes.contains(&shape) {
            return Outcome::fail(format!("step at {pos} does not fit shape {shape:?}"));
        }
    }
    Outcome::Pass
}

pub fn check_eta_case(sig: &Signature, m1: &Term, target: &Term) -> Outcome {
    check_case(sig, &RuleTag::Eta, m1, target)
}

/// Commutation of a `tag1` step followed by a β step. For η the witness
/// `M2'` satisfies `M1 ↠β⁺ M2' ↠η M3`, searched up to `beta_bound` β steps;
/// for a signature rule it satisfies `M1 ⟶β M2' ↠ M3` with exactly one β
/// step.
pub fn check_commutation(
    sig: &Signature,
    m1: &Expr,
    tag1: &RuleTag,
    m2: &Expr,
    m3: &Expr,
    beta_bound: usize,
) -> Outcome {
    if !matches!(tag1, RuleTag::Eta | RuleTag::Sig(_)) {
        return Outcome::skip(format!("no commutation lemma for {tag1}"));
    }
    if !steps_to(sig, tag1, m1, m2) {
        return Outcome::skip(format!("M1 does not {tag1}-reduce to M2"));
    }
    if !steps_to(sig, &RuleTag::Beta, m2, m3) {
        return Outcome::skip("M2 does not β-reduce to M3");
    }
    let back = RuleSet::single(tag1);
    let mut exhausted = false;
    let mut try_witness = |w: &Expr| match reachable(sig, &back, w, m3, SEARCH_NODES) {
        Reach::Found(_) => true,
        Reach::NotFound => false,
        Reach::Exhausted => {
            exhausted = true;
            false
        }
    };
    if let RuleTag::Sig(_) = tag1 {
        for (_, w) in successors_by(sig, &RuleTag::Beta, m1) {
            if try_witness(&w) {
                return Outcome::Pass;
            }
        }
        return if exhausted {
            Outcome::bound("replaying the signature steps exceeded the search bound")
        } else {
            Outcome::fail(format!(
                "no single β step from {m1} reaches a term that {tag1}-reduces to {m3}"
            ))
        };
    }
    // η: level by level over the β-reducts of M1.
    let mut seen: HashSet<Expr> = HashSet::new();
    seen.insert(m1.clone());
    let mut frontier = vec![m1.clone()];
    for _ in 0..beta_bound {
        let mut next = Vec::new();
        for e in &frontier {
            for (_, w) in successors_by(sig, &RuleTag::Beta, e) {
                if seen.insert(w.clone()) {
                    if try_witness(&w) {
                        return Outcome::Pass;
                    }
                    next.push(w);
                }
            }
        }
        if seen.len() > SEARCH_NODES {
            exhausted = true;
            break;
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    if exhausted || !frontier.is_empty() {
        Outcome::bound(format!("no witness within {beta_bound} β steps from {m1}"))
    } else {
        Outcome::fail(format!("no term β⁺-reachable from {m1} η-reduces to {m3}"))
    }
}

/// Arity subject reduction: every one-step reduct keeps the arity.
pub fn check_subject_reduction(sig: &Signature, ctx: &ArityContext, m: &Expr, rules: &RuleSet) -> Outcome {
    let Ok(a) = infer_arity(sig, ctx, m) else {
        return Outcome::skip("subject has no arity");
    };
    for (pos, tag, r) in Reducer::new(sig, rules).successors(m) {
        match infer_arity(sig, ctx, &r) {
            Ok(b) if b == a => {}
            Ok(b) => return Outcome::fail(format!("{tag} at {pos} gives {r} of arity {b}, expected {a}")),
            Err(e) => return Outcome::fail(format!("{tag} at {pos} gives {r} with no arity: {e}")),
        }
    }
    Outcome::Pass
}

/// Derivation enumeration finds exactly one conclusion arity, equal to
/// the inferred one, whichever order the rules are tried in.
pub fn check_uniqueness(sig: &Signature, ctx: &ArityContext, m: &Expr) -> Outcome {
    let Ok(a) = infer_arity(sig, ctx, m) else {
        return Outcome::skip("subject has no arity");
    };
    let depth = sufficient_depth(ctx, m);
    let derivs = enumerate_derivations(sig, ctx, m, depth);
    if derivs.is_empty() {
        return Outcome::fail(format!("no derivation of {m} within height {depth}"));
    }
    if derivs.iter().any(|d| d.height() >= depth) {
        return Outcome::bound(format!("a derivation of {m} reaches the height bound {depth}"));
    }
    for d in &derivs {
        if d.arity() != Some(&a) {
            return Outcome::fail(format!("derivation concludes {:?}, inference gives {a}", d.arity()));
        }
        if !d.is_well_formed(sig) {
            return Outcome::fail(format!("enumerated derivation of {m} is not a valid rule instance"));
        }
    }
    let mut reversed: Vec<Rule> = Rule::ALL.to_vec();
    reversed.reverse();
    let again = enumerate_derivations_ordered(sig, ctx, m, depth, &reversed);
    if again.len() != derivs.len() || again.iter().any(|d| d.arity() != Some(&a)) {
        return Outcome::fail("rule order changed the derivations found");
    }
    Outcome::Pass
}

/// No term applied to itself has an arity.
pub fn check_self_application(sig: &Signature, ctx: &ArityContext, m: &Term) -> Outcome {
    let mm = Expr::Term(Term::app(m.clone(), m.clone()));
    match infer_arity(sig, ctx, &mm) {
        Ok(a) => Outcome::fail(format!("{mm} has arity {a}")),
        Err(_) => Outcome::Pass,
    }
}

/// Extending the context with a fresh binding keeps the arity.
pub fn check_weakening(sig: &Signature, ctx: &ArityContext, m: &Expr, fresh: &str, arity: &Arity) -> Outcome {
    if ctx.contains(fresh) || m.free_vars().contains(fresh) || sig.constant(fresh).is_some() {
        return Outcome::skip(format!("{fresh} is not fresh"));
    }
    let Ok(a) = infer_arity(sig, ctx, m) else {
        return Outcome::skip("subject has no arity");
    };
    match infer_arity(sig, &ctx.with(fresh, arity.clone()), m) {
        Ok(b) if b == a => Outcome::Pass,
        other => Outcome::fail(format!("after adding {fresh}:{arity}, got {other:?} instead of {a}")),
    }
}

/// The identity valuation, with or without explicit entries, changes
/// nothing.
pub fn check_valuation_identity(m: &Expr) -> Outcome {
    let explicit: Valuation = m
        .free_vars()
        .into_iter()
        .map(|x: Name| {
            let t = Term::Free(x.clone());
            (x, t)
        })
        .collect();
    for rho in [Valuation::identity(), explicit] {
        let got = apply_valuation(&rho, m);
        if &got != m {
            return Outcome::fail(format!("identity valuation turned {m} into {got}"));
        }
    }
    Outcome::Pass
}

/// Typed subject reduction: each one-step reduct of a well-typed term has
/// a convertible kind.
pub fn check_type_preservation(checker: &Checker<'_>, ctx: &TypeContext, t: &Term) -> Outcome {
    let Ok(k) = checker.infer_type(ctx, t) else {
        return Outcome::skip("subject is not well-typed");
    };
    let e = Expr::Term(t.clone());
    for (pos, tag, r) in Reducer::new(checker.sig, &checker.rules).successors(&e) {
        let Expr::Term(r) = r else { continue };
        match checker.infer_type(ctx, &r) {
            Ok(k2) if checker.conv_kind(&k, &k2) => {}
            Ok(k2) => return Outcome::fail(format!("{tag} at {pos}: {r} has kind {k2}, expected {k}")),
            Err(err) => return Outcome::fail(format!("{tag} at {pos}: {r} is ill-typed: {err}")),
        }
    }
    Outcome::Pass
}

/// Well-typed terms have the arity of their kind.
pub fn check_bridge(checker: &Checker<'_>, ctx: &TypeContext, t: &Term) -> Outcome {
    match checker.theorem2_bridge(ctx, t) {
        Ok(_) => Outcome::Pass,
        Err(BridgeError::Type(_)) => Outcome::skip("subject is not well-typed"),
        Err(e) => Outcome::fail(e.to_string()),
    }
}

/// The reduction graph is finite and acyclic. A cycle refutes strong
/// normalisation; running out of fuel is only a bound.
pub fn check_sn(sig: &Signature, m: &Expr, rules: &RuleSet, fuel: usize) -> Outcome {
    let r = sn_explore(sig, m, rules, fuel);
    if r.cycle_detected {
        Outcome::fail(format!("{m} has a cyclic reduction"))
    } else if r.fuel_exhausted {
        Outcome::bound(format!("{m}: more than {fuel} reducts"))
    } else {
        Outcome::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_arity_context, parse_expr, parse_term};

    fn e(s: &str) -> Expr {
        parse_expr(s, &Signature::builtins()).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &Signature::builtins()).unwrap()
    }

    fn sig() -> Signature {
        Signature::builtins()
    }

    #[test]
    fn subst_eta_direct_step() {
        let s = sig();
        let out = check_subst_step(&s, &RuleTag::Eta, &e("\\y:El(a).f y"), &e("f"), "f", &t("g"));
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn subst_eta_second_clause() {
        let s = sig();
        let out = check_subst_arg(&s, &RuleTag::Eta, &e("h x"), "x", &t("\\y:El(a).g y"), &t("g"));
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn subst_eta_with_absent_variable() {
        let s = sig();
        let out = check_subst_step(&s, &RuleTag::Eta, &e("\\y:El(a).f y"), &e("f"), "z", &t("g"));
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn subst_pi1() {
        let s = sig();
        let m1 = e("pi1 A B (pair A B x b)");
        let out = check_subst_step(&s, &RuleTag::Sig("pi1".into()), &m1, &e("x"), "A", &t("C"));
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn fv_beta() {
        let s = sig();
        assert_eq!(check_fv_beta(&s, &e("(\\y:Type.y) z"), &e("z"), "x"), Outcome::Pass);
        assert!(matches!(
            check_fv_beta(&s, &e("(\\y:Type.w) z"), &e("w"), "z"),
            Outcome::Skip { .. }
        ));
    }

    #[test]
    fn eta_case_shapes() {
        let s = sig();
        let shape = |m1: &str, m2: &str| classify_case(&s, &RuleTag::Eta, &t(m1), &t(m2));
        assert_eq!(
            shape("\\y:Type.(\\x:El(a).g x x) y", "\\x:El(a).g x x"),
            [CaseShape::Expansion]
        );
        assert_eq!(shape("\\x:Type.(\\z:El(a).g z) x", "\\x:Type.g x"), [CaseShape::Body]);
        assert_eq!(
            shape("\\x:El((\\z:El(a).g z) c).x", "\\x:El(g c).x"),
            [CaseShape::Annotation]
        );
        assert_eq!(shape("\\x:(z:El(a))El(h z).x", "\\x:(z:El(a))El(h z).x"), []);
        assert_eq!(shape("\\x:El(\\z:Type.h z).x", "\\x:El(h).x"), [CaseShape::Annotation]);
        assert_eq!(
            check_eta_case(&s, &t("\\x:El(\\z:Type.h z).x"), &t("\\x:El(h).x")),
            Outcome::Pass
        );
    }

    #[test]
    fn eta_case_can_match_two_shapes() {
        let s = sig();
        let m1 = t("\\y:El(a).(\\x:El(a).g x) y");
        let target = t("\\x:El(a).g x");
        assert_eq!(
            classify_case(&s, &RuleTag::Eta, &m1, &target),
            [CaseShape::Expansion, CaseShape::Body]
        );
        assert_eq!(check_eta_case(&s, &m1, &target), Outcome::Pass);
    }

    #[test]
    fn pi1_case() {
        let s = sig();
        let tag = RuleTag::Sig("pi1".into());
        let m1 = t("\\x:Type.g (pi1 A B (pair A B a b)) x");
        let target = t("\\x:Type.g a x");
        assert_eq!(check_case(&s, &tag, &m1, &target), Outcome::Pass);
        let m1 = t("\\x:El(pi1 A B (pair A B a b)).x");
        assert_eq!(check_case(&s, &tag, &m1, &t("\\x:El(a).x")), Outcome::Pass);
    }

    #[test]
    fn commutation_eta_beta() {
        let s = sig();
        let out = check_commutation(
            &s,
            &e("(\\x:Type.(\\y:Type.y) x) a"),
            &RuleTag::Eta,
            &e("(\\y:Type.y) a"),
            &e("a"),
            20,
        );
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn commutation_pi1_beta() {
        let s = sig();
        let out = check_commutation(
            &s,
            &e("f (pi1 A B (pair A B ((\\z:Type.z) c) b))"),
            &RuleTag::Sig("pi1".into()),
            &e("f ((\\z:Type.z) c)"),
            &e("f c"),
            20,
        );
        assert_eq!(out, Outcome::Pass);
    }

    #[test]
    fn commutation_without_beta_is_skipped() {
        let s = sig();
        let out = check_commutation(&s, &e("\\x:Type.f x"), &RuleTag::Eta, &e("f"), &e("f"), 20);
        assert!(matches!(out, Outcome::Skip { .. }));
    }

    #[test]
    fn mutant_rule_breaks_type_preservation() {
        let mut s = Signature::sigma();
        let keep: std::collections::BTreeSet<Name> = ["pi2".into()].into_iter().collect();
        s = s.restrict_rules(&keep);
        s.add_rule_text(
            "pi1",
            "A:0, B:(0,0), a:0, b:0",
            "pi1 A B (pair A B a b)",
            "b",
            Arity::Zero,
        )
        .unwrap();
        let checker = Checker::new(&s);
        let src = "assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);";
        let ctx = checker
            .check_context(crate::surface::parse_type_context(src, &s).unwrap())
            .unwrap();
        let redex = parse_term("pi1 A B (pair A B a b)", &s).unwrap();
        assert!(matches!(
            check_type_preservation(&checker, &ctx, &redex),
            Outcome::Fail { .. }
        ));
    }

    #[test]
    fn arity_properties() {
        let s = sig();
        let ctx = parse_arity_context("f:(0,0), b:0, a:0, g:(0,0)").unwrap();
        assert_eq!(
            check_subject_reduction(&s, &ctx, &e("(\\x:El(a).f x) b"), &RuleSet::all()),
            Outcome::Pass
        );
        assert_eq!(check_uniqueness(&s, &ctx, &e("f b")), Outcome::Pass);
        assert_eq!(check_self_application(&s, &ctx, &t("\\x:El(a).x")), Outcome::Pass);
        assert_eq!(
            check_weakening(&s, &ctx, &e("f b"), "fresh", &Arity::Zero),
            Outcome::Pass
        );
        assert_eq!(check_valuation_identity(&e("\\x:El(a).f x")), Outcome::Pass);
    }

    #[test]
    fn sn_outcomes() {
        let s = sig();
        assert_eq!(check_sn(&s, &e("(\\x:Type.x) a"), &RuleSet::all(), 100), Outcome::Pass);
        let omega = e("(\\x:El(z).x x) (\\x:El(z).x x)");
        assert!(matches!(
            check_sn(&s, &omega, &RuleSet::all(), 100),
            Outcome::Fail { .. }
        ));
    }

    #[test]
    fn outcome_severity() {
        let f = Outcome::fail("x");
        assert_eq!(Outcome::Pass.and(f.clone()), f);
        assert_eq!(Outcome::skip("s").and(Outcome::Pass), Outcome::Pass);
        assert_eq!(f.clone().and(Outcome::bound("b")), f);
    }
}
