//! Sampled membership in the interpretation of an arity.
//!
//! `⟦0⟧` is the set of strongly normalising terms and `⟦(a1,a2)⟧` the terms
//! that land in `⟦a2⟧` whenever applied to a member of `⟦a1⟧`. The second
//! clause quantifies over infinitely many terms, so this is a necessary
//! condition only: a `member: false` verdict comes with a concrete
//! diverging application, a `member: true` verdict proves nothing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::explore::sn_explore;
use crate::props::gen::{gen_with, GenConfig};
use crate::reduce::RuleSet;
use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Expr, Kind, Term};

#[derive(Clone, Debug)]
pub struct InterpConfig {
    /// Members of `⟦a1⟧` sampled at each product arity.
    pub budget: usize,
    /// Node budget of each reduction-graph exploration.
    pub fuel: usize,
    pub seed: u64,
    pub rules: RuleSet,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            budget: 20,
            fuel: 10_000,
            seed: 0,
            rules: RuleSet::all(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InterpVerdict {
    pub member: bool,
    /// Applications explored.
    pub samples: usize,
    /// Arguments whose application to the subject did not terminate.
    pub witness: Option<Vec<String>>,
}

/// `λx:El(z).x x`: normal, hence in `⟦0⟧`, but not applicable to itself.
pub fn omega() -> Term {
    Term::lam(
        "x",
        Kind::el(Term::free("z")),
        Term::app(Term::free("x"), Term::free("x")),
    )
}

struct Sampler<'a> {
    sig: &'a Signature,
    cfg: &'a InterpConfig,
    rng: ChaCha8Rng,
    samples: usize,
    fresh: usize,
}

impl Sampler<'_> {
    /// Candidate members of `⟦a⟧`: a fresh variable (always a member), `ω`
    /// at arity `0`, then correct-arity terms.
    fn members(&mut self, a: &Arity) -> Vec<Term> {
        let mut out = vec![Term::free(&format!("ι{}", self.fresh))];
        self.fresh += 1;
        if a.is_zero() {
            out.push(omega());
        }
        let ctx = ArityContext::from_pairs([("z", Arity::Zero), ("g", Arity::pair(Arity::Zero, Arity::Zero))]);
        let cfg = GenConfig::new(ctx, a.clone()).size(10).rules(self.cfg.rules.clone());
        let mut misses = 0;
        while out.len() < self.cfg.budget && misses < self.cfg.budget {
            match gen_with(self.sig, &cfg, &mut self.rng) {
                Ok(g) => out.push(g.expr.as_term().cloned().expect("term generated")),
                Err(_) => misses += 1,
            }
        }
        out.truncate(self.cfg.budget.max(1));
        out
    }

    fn check(&mut self, m: &Term, a: &Arity, args: &mut Vec<Term>) -> bool {
        match a.split() {
            None => {
                self.samples += 1;
                sn_explore(self.sig, &Expr::Term(m.clone()), &self.cfg.rules, self.cfg.fuel).terminates()
            }
            Some((a1, a2)) => {
                let (a1, a2) = (a1.clone(), a2.clone());
                for n in self.members(&a1) {
                    args.push(n.clone());
                    if !self.check(&Term::app(m.clone(), n), &a2, args) {
                        return false;
                    }
                    args.pop();
                }
                true
            }
        }
    }
}

pub fn bounded_interp_member(sig: &Signature, m: &Term, a: &Arity, cfg: &InterpConfig) -> InterpVerdict {
    let mut s = Sampler {
        sig,
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        samples: 0,
        fresh: 0,
    };
    let mut args = Vec::new();
    let member = s.check(m, a, &mut args);
    InterpVerdict {
        member,
        samples: s.samples,
        witness: (!member).then(|| args.iter().map(Term::to_string).collect()),
    }
}
