//! The property suite: every lemma checker run on generated cases.
//!
//! Case `i` of lemma `l` draws from a generator seeded by `(seed, l, i)`
//! alone, so reports are identical across runs and worker counts and any
//! case can be replayed on its own.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::props::gen::{gen_with, gen_with_redex, small_arity, GenConfig, Generated};
use crate::props::lemmas::*;
use crate::props::sweep::{exhaustive_sweep, SweepConfig, SweepReport, SWEEP_CONTEXT};
use crate::props::typed::{gen_typed, CORPUS_CONTEXT};
use crate::reduce::{RuleSet, RuleTag};
use crate::signature::Signature;
use crate::surface::{parse_arity_context, parse_type_context};
use crate::syntax::{Arity, ArityContext, Class, Expr, Name, Term};
use crate::typecheck::{Checker, TypeContext};

/// Arity context of the generated cases.
pub const SUITE_CONTEXT: &str = "A:0, B:(0,0), a:0, b:0, c:0, f:(0,0), g:((0,0),0), h:(0,(0,0))";

/// Node budget for strong-normalisation cases.
pub const SN_FUEL: usize = 100_000;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Only run lemmas whose name starts with one of these.
    pub only: Vec<String>,
    /// Also run the exhaustive sweep up to this size.
    pub exhaustive: Option<usize>,
    /// Record wall-clock time in the report (makes it nondeterministic).
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            cases: 1000,
            jobs: None,
            only: Vec::new(),
            exhaustive: None,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseFailure {
    pub case: usize,
    pub inputs: Vec<(String, String)>,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Outcome counts for one lemma.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaVerdict {
    pub lemma: String,
    pub cases: usize,
    pub passed: usize,
    pub skipped: usize,
    pub bound_exhausted: usize,
    pub counterexamples: usize,
    /// Failing and bound-exhausted cases, lowest case index first, at most
    /// [`MAX_RECORDED`].
    pub failures: Vec<CaseFailure>,
}

pub const MAX_RECORDED: usize = 10;

impl LemmaVerdict {
    pub fn ok(&self) -> bool {
        self.counterexamples == 0 && self.bound_exhausted == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub lemmas: Vec<LemmaVerdict>,
    pub counterexamples: usize,
    pub bound_exhaustions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl SuiteReport {
    /// No counterexample and no exhausted bound anywhere, including the
    /// lemma part of the sweep.
    pub fn ok(&self) -> bool {
        self.counterexamples == 0
            && self.bound_exhaustions == 0
            && self.sweep.as_ref().is_none_or(SweepReport::lemmas_hold)
    }
}

/// What a lemma case is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lemma {
    Subst(RuleTag),
    FvBeta,
    Case(RuleTag),
    Commutation(RuleTag),
    SubjectReduction,
    Uniqueness,
    SelfApplication,
    Weakening,
    ValuationIdentity,
    TypePreservation,
    KindArityBridge,
    StrongNormalization,
}

impl Lemma {
    pub fn name(&self) -> String {
        match self {
            Lemma::Subst(t) => format!("subst-{t}"),
            Lemma::FvBeta => "fv-beta".into(),
            Lemma::Case(t) => format!("{t}-case"),
            Lemma::Commutation(t) => format!("commutation-{t}-beta"),
            Lemma::SubjectReduction => "subject-reduction".into(),
            Lemma::Uniqueness => "uniqueness".into(),
            Lemma::SelfApplication => "self-application".into(),
            Lemma::Weakening => "weakening".into(),
            Lemma::ValuationIdentity => "valuation-identity".into(),
            Lemma::TypePreservation => "type-preservation".into(),
            Lemma::KindArityBridge => "kind-arity-bridge".into(),
            Lemma::StrongNormalization => "strong-normalization".into(),
        }
    }
}

/// Every lemma for `sig`, signature-rule variants in rule order.
pub fn lemmas(sig: &Signature) -> Vec<Lemma> {
    let sig_tags: Vec<RuleTag> = sig.rules().iter().map(|r| RuleTag::Sig(r.name.clone())).collect();
    let mut out = vec![Lemma::Subst(RuleTag::Eta)];
    out.extend(sig_tags.iter().cloned().map(Lemma::Subst));
    out.push(Lemma::FvBeta);
    out.push(Lemma::Case(RuleTag::Eta));
    out.extend(sig_tags.iter().cloned().map(Lemma::Case));
    out.push(Lemma::Commutation(RuleTag::Eta));
    out.extend(sig_tags.iter().cloned().map(Lemma::Commutation));
    out.extend([
        Lemma::SubjectReduction,
        Lemma::Uniqueness,
        Lemma::SelfApplication,
        Lemma::Weakening,
        Lemma::ValuationIdentity,
        Lemma::TypePreservation,
        Lemma::KindArityBridge,
        Lemma::StrongNormalization,
    ]);
    out
}

/// Everything a case needs besides its random stream.
pub struct Env {
    pub sig: Signature,
    pub ctx: ArityContext,
    /// Typed entries, when the signature declares the constants the
    /// corpus context uses.
    pub typed: Option<Vec<(Name, crate::syntax::Kind)>>,
}

impl Env {
    pub fn new(sig: Signature) -> Self {
        let ctx = parse_arity_context(SUITE_CONTEXT).expect("suite context parses");
        let typed = parse_type_context(CORPUS_CONTEXT, &sig)
            .ok()
            .filter(|entries| Checker::new(&sig).check_context(entries.clone()).is_ok());
        Env { sig, ctx, typed }
    }
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The generator for case `case` of `lemma` under `seed`.
pub fn case_rng(seed: u64, lemma: &str, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(lemma));
    rng.set_stream(case as u64);
    rng
}

type Inputs = Vec<(String, String)>;

fn input(name: &str, v: impl ToString) -> (String, String) {
    (name.to_string(), v.to_string())
}

const TRIES: usize = 20;

impl Env {
    fn cfg<R: Rng>(&self, rng: &mut R, lo: usize, hi: usize) -> GenConfig {
        let class = if rng.gen_bool(0.75) { Class::Term } else { Class::Kind };
        GenConfig::new(self.ctx.clone(), small_arity(rng))
            .size(rng.gen_range(lo..=hi))
            .class(class)
    }

    fn function_cfg<R: Rng>(&self, rng: &mut R, lo: usize, hi: usize) -> GenConfig {
        let target = loop {
            let a = small_arity(rng);
            if !a.is_zero() {
                break a;
            }
        };
        GenConfig::new(self.ctx.clone(), target).size(rng.gen_range(lo..=hi))
    }

    fn any<R: Rng>(&self, rng: &mut R, lo: usize, hi: usize) -> Option<Generated> {
        let cfg = self.cfg(rng, lo, hi);
        gen_with(&self.sig, &cfg, rng).ok()
    }

    fn pick<'v, T, R: Rng>(rng: &mut R, v: &'v [T]) -> Option<&'v T> {
        v.choose(rng)
    }

    /// A context variable, preferring ones free in `m`.
    fn variable<R: Rng>(&self, rng: &mut R, m: &Expr) -> (Name, Arity) {
        let fv = m.free_vars();
        let free: Vec<&(Name, Arity)> = self.ctx.entries().iter().filter(|(x, _)| fv.contains(x)).collect();
        if !free.is_empty() && rng.gen_bool(0.9) {
            free[rng.gen_range(0..free.len())].clone()
        } else {
            self.ctx.entries()[rng.gen_range(0..self.ctx.len())].clone()
        }
    }

    pub fn run_case(&self, lemma: &Lemma, rng: &mut ChaCha8Rng) -> (Inputs, Outcome) {
        let sig = &self.sig;
        match lemma {
            Lemma::Subst(tag) => {
                let lo = if matches!(tag, RuleTag::Sig(_)) { 16 } else { 6 };
                let cfg = self.cfg(rng, lo, lo + 10);
                let Some(g) = gen_with_redex(sig, &cfg, tag, TRIES, rng) else {
                    return (
                        vec![],
                        Outcome::Skip {
                            reason: format!("no {tag} redex generated"),
                        },
                    );
                };
                let steps = successors_by(sig, tag, &g.expr);
                let (_, m2) = Self::pick(rng, &steps).expect("redex present").clone();
                let (x, b) = self.variable(rng, &g.expr);
                let ncfg = GenConfig::new(self.ctx.clone(), b.clone()).size(rng.gen_range(1..=8));
                let Ok(n) = gen_with(sig, &ncfg, rng) else {
                    return (
                        vec![],
                        Outcome::Skip {
                            reason: "no substituend generated".into(),
                        },
                    );
                };
                let n = n.expr.as_term().expect("term").clone();
                let mut inputs = vec![input("M1", &g.expr), input("M2", &m2), input("x", &x), input("N", &n)];
                let mut out = check_subst_step(sig, tag, &g.expr, &m2, &x, &n);
                let acfg = GenConfig::new(self.ctx.clone(), b).size(rng.gen_range(lo..=lo + 6));
                if let Some(n1) = gen_with_redex(sig, &acfg, tag, TRIES, rng) {
                    let steps = successors_by(sig, tag, &n1.expr);
                    let (_, n2) = Self::pick(rng, &steps).expect("redex present").clone();
                    let (n1, n2) = (n1.expr.as_term().unwrap().clone(), n2.as_term().unwrap().clone());
                    inputs.push(input("N1", &n1));
                    inputs.push(input("N2", &n2));
                    out = out.and(check_subst_arg(sig, tag, &g.expr, &x, &n1, &n2));
                }
                (inputs, out)
            }
            Lemma::FvBeta => {
                let cfg = self.cfg(rng, 6, 16);
                let Some(g) = gen_with_redex(sig, &cfg, &RuleTag::Beta, TRIES, rng) else {
                    return (
                        vec![],
                        Outcome::Skip {
                            reason: "no β redex generated".into(),
                        },
                    );
                };
                let steps = successors_by(sig, &RuleTag::Beta, &g.expr);
                let (_, m2) = Self::pick(rng, &steps).unwrap().clone();
                let fv = g.expr.free_vars();
                let absent: Vec<Name> = self.ctx.names().filter(|x| !fv.contains(*x)).cloned().collect();
                let Some(x) = Self::pick(rng, &absent).cloned() else {
                    return (
                        vec![input("M1", &g.expr)],
                        Outcome::Skip {
                            reason: "every variable is free in M1".into(),
                        },
                    );
                };
                let inputs = vec![input("M1", &g.expr), input("M2", &m2), input("x", &x)];
                let out = check_fv_beta(sig, &g.expr, &m2, &x);
                (inputs, out)
            }
            Lemma::Case(tag) => {
                let lo = if matches!(tag, RuleTag::Sig(_)) { 18 } else { 6 };
                for _ in 0..TRIES {
                    let cfg = self.function_cfg(rng, lo, lo + 8);
                    let Some(g) = gen_with_redex(sig, &cfg, tag, TRIES, rng) else {
                        continue;
                    };
                    let Expr::Term(m1) = &g.expr else { continue };
                    let lams: Vec<Term> = successors_by(sig, tag, &g.expr)
                        .into_iter()
                        .filter_map(|(_, e)| match e {
                            Expr::Term(t @ Term::Lam(..)) => Some(t),
                            _ => None,
                        })
                        .collect();
                    let Some(target) = Self::pick(rng, &lams).cloned() else {
                        continue;
                    };
                    let out = check_case(sig, tag, m1, &target);
                    return (vec![input("M1", m1), input("target", &target)], out);
                }
                (
                    vec![],
                    Outcome::Skip {
                        reason: format!("no {tag} step to an abstraction generated"),
                    },
                )
            }
            Lemma::Commutation(tag) => {
                let lo = if matches!(tag, RuleTag::Sig(_)) { 16 } else { 6 };
                for _ in 0..TRIES {
                    let cfg = self.cfg(rng, lo, lo + 8);
                    let Some(g) = gen_with_redex(sig, &cfg, tag, TRIES, rng) else {
                        continue;
                    };
                    let mut pairs = Vec::new();
                    for (_, m2) in successors_by(sig, tag, &g.expr) {
                        for (_, m3) in successors_by(sig, &RuleTag::Beta, &m2) {
                            pairs.push((m2.clone(), m3));
                        }
                    }
                    let Some((m2, m3)) = Self::pick(rng, &pairs).cloned() else {
                        continue;
                    };
                    let bound = 2 * g.expr.size();
                    let out = check_commutation(sig, &g.expr, tag, &m2, &m3, bound);
                    return (vec![input("M1", &g.expr), input("M2", &m2), input("M3", &m3)], out);
                }
                (
                    vec![],
                    Outcome::Skip {
                        reason: format!("no {tag} step followed by β generated"),
                    },
                )
            }
            Lemma::SubjectReduction => match self.any(rng, 4, 20) {
                Some(g) => (
                    vec![input("M", &g.expr)],
                    check_subject_reduction(sig, &self.ctx, &g.expr, &RuleSet::all()),
                ),
                None => (
                    vec![],
                    Outcome::Skip {
                        reason: "nothing generated".into(),
                    },
                ),
            },
            Lemma::Uniqueness => match self.any(rng, 1, 14) {
                Some(g) => (vec![input("M", &g.expr)], check_uniqueness(sig, &self.ctx, &g.expr)),
                None => (
                    vec![],
                    Outcome::Skip {
                        reason: "nothing generated".into(),
                    },
                ),
            },
            Lemma::SelfApplication => {
                let cfg = GenConfig::new(self.ctx.clone(), small_arity(rng)).size(rng.gen_range(1..=14));
                match gen_with(sig, &cfg, rng) {
                    Ok(g) => {
                        let m = g.expr.as_term().unwrap();
                        (vec![input("M", m)], check_self_application(sig, &self.ctx, m))
                    }
                    Err(_) => (
                        vec![],
                        Outcome::Skip {
                            reason: "nothing generated".into(),
                        },
                    ),
                }
            }
            Lemma::Weakening => match self.any(rng, 1, 16) {
                Some(g) => {
                    let a = small_arity(rng);
                    let out = check_weakening(sig, &self.ctx, &g.expr, "fresh", &a);
                    (vec![input("M", &g.expr), input("extra", format!("fresh:{a}"))], out)
                }
                None => (
                    vec![],
                    Outcome::Skip {
                        reason: "nothing generated".into(),
                    },
                ),
            },
            Lemma::ValuationIdentity => match self.any(rng, 1, 16) {
                Some(g) => (vec![input("M", &g.expr)], check_valuation_identity(&g.expr)),
                None => (
                    vec![],
                    Outcome::Skip {
                        reason: "nothing generated".into(),
                    },
                ),
            },
            Lemma::TypePreservation | Lemma::KindArityBridge => {
                let Some(entries) = &self.typed else {
                    return (
                        vec![],
                        Outcome::Skip {
                            reason: "signature lacks the corpus constants".into(),
                        },
                    );
                };
                let checker = Checker::new(sig);
                let ctx: TypeContext = checker.check_context(entries.clone()).expect("checked in Env::new");
                let Some((t, _)) = gen_typed(&checker, &ctx, 3, rng) else {
                    return (
                        vec![],
                        Outcome::Skip {
                            reason: "no well-typed term generated".into(),
                        },
                    );
                };
                let out = if *lemma == Lemma::TypePreservation {
                    check_type_preservation(&checker, &ctx, &t)
                } else {
                    check_bridge(&checker, &ctx, &t)
                };
                (vec![input("M", &t)], out)
            }
            Lemma::StrongNormalization => match self.any(rng, 4, 18) {
                Some(g) => (
                    vec![input("M", &g.expr)],
                    check_sn(sig, &g.expr, &RuleSet::all(), SN_FUEL),
                ),
                None => (
                    vec![],
                    Outcome::Skip {
                        reason: "nothing generated".into(),
                    },
                ),
            },
        }
    }
}

/// Re-runs one case exactly as the suite ran it.
pub fn replay_case(sig: &Signature, lemma: &str, seed: u64, case: usize) -> Option<(Inputs, Outcome)> {
    let env = Env::new(sig.clone());
    let l = lemmas(sig).into_iter().find(|l| l.name() == lemma)?;
    let mut rng = case_rng(seed, lemma, case);
    Some(env.run_case(&l, &mut rng))
}

fn run_lemma(env: &Env, lemma: &Lemma, seed: u64, cases: usize) -> LemmaVerdict {
    let name = lemma.name();
    let results: Vec<(Inputs, Outcome)> = (0..cases)
        .into_par_iter()
        .map(|i| env.run_case(lemma, &mut case_rng(seed, &name, i)))
        .collect();
    let mut v = LemmaVerdict {
        lemma: name,
        cases,
        passed: 0,
        skipped: 0,
        bound_exhausted: 0,
        counterexamples: 0,
        failures: Vec::new(),
    };
    for (case, (inputs, outcome)) in results.into_iter().enumerate() {
        match &outcome {
            Outcome::Pass => v.passed += 1,
            Outcome::Skip { .. } => v.skipped += 1,
            Outcome::BoundExceeded { .. } => v.bound_exhausted += 1,
            Outcome::Fail { .. } => v.counterexamples += 1,
        }
        if matches!(outcome, Outcome::Fail { .. } | Outcome::BoundExceeded { .. }) && v.failures.len() < MAX_RECORDED {
            v.failures.push(CaseFailure { case, inputs, outcome });
        }
    }
    v
}

pub fn run_suite(sig: &Signature, cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let work = || {
        let env = Env::new(sig.clone());
        let selected: Vec<Lemma> = lemmas(sig)
            .into_iter()
            .filter(|l| cfg.only.is_empty() || cfg.only.iter().any(|p| l.name().starts_with(p.as_str())))
            .collect();
        let verdicts: Vec<LemmaVerdict> = selected
            .iter()
            .map(|l| run_lemma(&env, l, cfg.seed, cfg.cases))
            .collect();
        let sweep = cfg.exhaustive.map(|max_size| {
            let ctx = parse_arity_context(SWEEP_CONTEXT).expect("sweep context parses");
            exhaustive_sweep(
                sig,
                &ctx,
                &SweepConfig {
                    max_size,
                    ..SweepConfig::default()
                },
            )
        });
        (verdicts, sweep)
    };
    let (verdicts, sweep) = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    SuiteReport {
        seed: cfg.seed,
        cases: cfg.cases,
        counterexamples: verdicts.iter().map(|v| v.counterexamples).sum(),
        bound_exhaustions: verdicts.iter().map(|v| v.bound_exhausted).sum(),
        lemmas: verdicts,
        sweep,
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_millis()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_names() {
        let names: Vec<String> = lemmas(&Signature::builtins()).iter().map(Lemma::name).collect();
        for want in [
            "subst-eta",
            "subst-sig:pi1",
            "sig:b1-case",
            "commutation-sig:u-beta",
            "kind-arity-bridge",
        ] {
            assert!(names.iter().any(|n| n == want), "{want} not in {names:?}");
        }
    }

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let sig = Signature::builtins();
        let cfg = SuiteConfig {
            cases: 30,
            ..SuiteConfig::default()
        };
        let one = run_suite(
            &sig,
            &SuiteConfig {
                jobs: Some(1),
                ..cfg.clone()
            },
        );
        let many = run_suite(&sig, &SuiteConfig { jobs: Some(4), ..cfg });
        assert!(
            one.ok(),
            "{:#?}",
            one.lemmas.iter().filter(|v| !v.ok()).collect::<Vec<_>>()
        );
        assert_eq!(one, many);
    }

    #[test]
    fn mutant_projection_rule_is_caught() {
        let keep: std::collections::BTreeSet<Name> = ["pi2".into()].into_iter().collect();
        let mut sig = Signature::sigma().restrict_rules(&keep);
        sig.add_rule_text(
            "pi1",
            "A:0, B:(0,0), a:0, b:0",
            "pi1 A B (pair A B a b)",
            "b",
            Arity::Zero,
        )
        .unwrap();
        let sig = sig
            .merged(&Signature::bool())
            .unwrap()
            .merged(&Signature::universe())
            .unwrap();
        let cfg = SuiteConfig {
            cases: 200,
            only: vec![
                "subject-reduction".into(),
                "commutation".into(),
                "type-preservation".into(),
            ],
            ..SuiteConfig::default()
        };
        let r = run_suite(&sig, &cfg);
        assert!(!r.ok());
        let caught: Vec<&str> = r
            .lemmas
            .iter()
            .filter(|v| v.counterexamples > 0)
            .map(|v| v.lemma.as_str())
            .collect();
        // Both sides of the rule have arity 0, so only typing notices.
        assert_eq!(caught, ["type-preservation"]);
        let first = &r
            .lemmas
            .iter()
            .find(|v| v.lemma == "type-preservation")
            .unwrap()
            .failures[0];
        let replayed = replay_case(&sig, "type-preservation", cfg.seed, first.case).unwrap();
        assert_eq!(replayed.1, first.outcome);
    }

    #[test]
    fn cases_replay() {
        let sig = Signature::builtins();
        let a = replay_case(&sig, "commutation-eta-beta", 42, 7).unwrap();
        let b = replay_case(&sig, "commutation-eta-beta", 42, 7).unwrap();
        assert_eq!(a, b);
        assert!(replay_case(&sig, "no-such-lemma", 42, 7).is_none());
    }
}
