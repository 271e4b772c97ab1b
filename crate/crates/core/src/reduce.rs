//! One-step reduction, normalisation and traces.
//!
//! Redexes are reported in preorder (leftmost-outermost first). At a single
//! node the order is η, β, β₂, then signature rules in declaration order; η
//! and β never share a node, so the order only matters between signature
//! rules.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arity::{infer_arity, ArityError};
use crate::position::{replace_at, subterm_at, Position};
use crate::signature::{RewriteRule, Signature};
use crate::syntax::{ArityContext, Expr, Kind, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    Beta,
    Beta2,
    Eta,
    Sig(Name),
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Beta => f.write_str("beta"),
            RuleTag::Beta2 => f.write_str("beta2"),
            RuleTag::Eta => f.write_str("eta"),
            RuleTag::Sig(n) => write!(f, "sig:{n}"),
        }
    }
}

impl Serialize for RuleTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SigRules {
    #[default]
    None,
    All,
    Named(BTreeSet<Name>),
}

/// Which reductions are enabled.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub beta: bool,
    pub beta2: bool,
    pub eta: bool,
    pub sig: SigRules,
}

impl RuleSet {
    /// β, β₂, η and every signature rule.
    pub fn all() -> Self {
        RuleSet {
            beta: true,
            beta2: true,
            eta: true,
            sig: SigRules::All,
        }
    }

    pub fn none() -> Self {
        RuleSet::default()
    }

    pub fn beta() -> Self {
        RuleSet {
            beta: true,
            ..RuleSet::default()
        }
    }

    pub fn eta() -> Self {
        RuleSet {
            eta: true,
            ..RuleSet::default()
        }
    }

    pub fn beta_eta() -> Self {
        RuleSet {
            beta: true,
            eta: true,
            ..RuleSet::default()
        }
    }

    /// β, η and all signature rules: the conversion of the typechecker.
    pub fn conversion() -> Self {
        RuleSet {
            beta: true,
            eta: true,
            sig: SigRules::All,
            ..RuleSet::default()
        }
    }

    pub fn only_sig(name: &str) -> Self {
        RuleSet {
            sig: SigRules::Named([Arc::from(name)].into_iter().collect()),
            ..RuleSet::default()
        }
    }

    /// Exactly the reduction named by `tag`.
    pub fn single(tag: &RuleTag) -> Self {
        match tag {
            RuleTag::Beta => RuleSet::beta(),
            RuleTag::Eta => RuleSet::eta(),
            RuleTag::Beta2 => RuleSet {
                beta2: true,
                ..RuleSet::default()
            },
            RuleTag::Sig(n) => RuleSet::only_sig(n),
        }
    }

    pub fn with_sig_rule(mut self, name: &str) -> Self {
        match &mut self.sig {
            SigRules::All => {}
            SigRules::Named(set) => {
                set.insert(Arc::from(name));
            }
            SigRules::None => self.sig = SigRules::Named([Arc::from(name)].into_iter().collect()),
        }
        self
    }

    pub fn enables(&self, tag: &RuleTag) -> bool {
        match tag {
            RuleTag::Beta => self.beta,
            RuleTag::Beta2 => self.beta2,
            RuleTag::Eta => self.eta,
            RuleTag::Sig(n) => self.enables_sig(n),
        }
    }

    pub fn enables_sig(&self, name: &str) -> bool {
        match &self.sig {
            SigRules::None => false,
            SigRules::All => true,
            SigRules::Named(set) => set.contains(name),
        }
    }

    pub fn active_rules<'s>(&self, sig: &'s Signature) -> Vec<&'s RewriteRule> {
        sig.rules().iter().filter(|r| self.enables_sig(&r.name)).collect()
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.beta {
            parts.push("beta".into());
        }
        if self.eta {
            parts.push("eta".into());
        }
        if self.beta2 {
            parts.push("beta2".into());
        }
        match &self.sig {
            SigRules::None => {}
            SigRules::All => parts.push("sig".into()),
            SigRules::Named(set) => parts.extend(set.iter().map(|n| format!("sig:{n}"))),
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown rule `{0}` (expected beta, eta, beta2, sig or sig:<name>)")]
pub struct UnknownRule(pub String);

impl FromStr for RuleSet {
    type Err = UnknownRule;

    /// Comma-separated `beta`, `eta`, `beta2`, `sig` (all signature rules),
    /// `sig:<name>`, or `all`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rs = RuleSet::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => rs = RuleSet::all(),
                "beta" => rs.beta = true,
                "eta" => rs.eta = true,
                "beta2" => rs.beta2 = true,
                "sig" => rs.sig = SigRules::All,
                p => match p.strip_prefix("sig:") {
                    Some(name) if !name.is_empty() => rs = rs.with_sig_rule(name),
                    _ => return Err(UnknownRule(p.to_string())),
                },
            }
        }
        Ok(rs)
    }
}

/// Signature plus enabled rules: everything needed to take a step.
#[derive(Clone, Copy)]
pub struct Reducer<'a> {
    pub sig: &'a Signature,
    pub rules: &'a RuleSet,
}

fn contract_beta(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, n) => match &**f {
            Term::Lam(_, _, body) => Some(body.instantiate(n)),
            _ => None,
        },
        _ => None,
    }
}

fn contract_eta(t: &Term) -> Option<Term> {
    match t {
        Term::Lam(_, _, body) => match &**body {
            Term::App(m, x) if **x == Term::Bound(0) && !m.has_loose(0) => Some(m.shift(-1, 0)),
            _ => None,
        },
        _ => None,
    }
}

fn contract_beta2(k: &Kind) -> Option<Kind> {
    match k {
        Kind::KApp(f, n) => match &**f {
            Kind::Pi(_, _, cod) => Some(cod.instantiate(n)),
            _ => None,
        },
        _ => None,
    }
}

impl<'a> Reducer<'a> {
    pub fn new(sig: &'a Signature, rules: &'a RuleSet) -> Self {
        Reducer { sig, rules }
    }

    fn sig_rules(&self) -> impl Iterator<Item = &'a RewriteRule> + '_ {
        let rules = self.rules;
        self.sig.rules().iter().filter(move |r| rules.enables_sig(&r.name))
    }

    /// Contractions available at the root of `e`, in tie-break order.
    pub fn root_contractions(&self, e: &Expr) -> Vec<(RuleTag, Expr)> {
        let mut out = Vec::new();
        match e {
            Expr::Term(t) => {
                if self.rules.eta {
                    if let Some(r) = contract_eta(t) {
                        out.push((RuleTag::Eta, Expr::Term(r)));
                    }
                }
                if self.rules.beta {
                    if let Some(r) = contract_beta(t) {
                        out.push((RuleTag::Beta, Expr::Term(r)));
                    }
                }
                if matches!(t, Term::App(..)) {
                    for rule in self.sig_rules() {
                        if let Some(r) = rule.apply(t) {
                            out.push((RuleTag::Sig(rule.name.clone()), Expr::Term(r)));
                        }
                    }
                }
            }
            Expr::Kind(k) => {
                if self.rules.beta2 {
                    if let Some(r) = contract_beta2(k) {
                        out.push((RuleTag::Beta2, Expr::Kind(r)));
                    }
                }
            }
        }
        out
    }

    /// Contracts the redex of kind `tag` at the root of `e`.
    pub fn contract(&self, e: &Expr, tag: &RuleTag) -> Option<Expr> {
        if !self.rules.enables(tag) {
            return None;
        }
        match (tag, e) {
            (RuleTag::Beta, Expr::Term(t)) => contract_beta(t).map(Expr::Term),
            (RuleTag::Eta, Expr::Term(t)) => contract_eta(t).map(Expr::Term),
            (RuleTag::Beta2, Expr::Kind(k)) => contract_beta2(k).map(Expr::Kind),
            (RuleTag::Sig(name), Expr::Term(t)) => self.sig.rule(name).and_then(|r| r.apply(t)).map(Expr::Term),
            _ => None,
        }
    }

    fn collect(&self, e: &Expr, path: &mut Vec<u8>, out: &mut Vec<(Position, RuleTag)>) {
        for (tag, _) in self.root_contractions(e) {
            out.push((Position(path.clone()), tag));
        }
        for_each_child(e, |i, child| {
            path.push(i);
            self.collect(&child, path, out);
            path.pop();
        });
    }

    /// All enabled redexes in preorder.
    pub fn redexes(&self, e: &Expr) -> Vec<(Position, RuleTag)> {
        let mut out = Vec::new();
        self.collect(e, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_normal(&self, e: &Expr) -> bool {
        fn go(r: &Reducer<'_>, e: &Expr) -> bool {
            if !r.root_contractions(e).is_empty() {
                return false;
            }
            let mut ok = true;
            for_each_child(e, |_, c| ok = ok && go(r, &c));
            ok
        }
        go(self, e)
    }

    pub fn step(&self, e: &Expr, pos: &Position, tag: &RuleTag) -> Result<Expr, StepError> {
        let not_redex = || StepError::NotARedex {
            position: pos.clone(),
            rule: tag.clone(),
        };
        let sub = subterm_at(e, pos).map_err(|_| not_redex())?;
        let contracted = self.contract(&sub, tag).ok_or_else(not_redex)?;
        replace_at(e, pos, contracted).map_err(|_| not_redex())
    }

    /// Every one-step successor, in redex order.
    pub fn successors(&self, e: &Expr) -> Vec<(Position, RuleTag, Expr)> {
        let mut out = Vec::new();
        for (tag, r) in self.root_contractions(e) {
            out.push((Position::root(), tag, r));
        }
        match e {
            Expr::Term(Term::Lam(b, k, m)) => {
                let (k, m) = (Expr::Kind((**k).clone()), Expr::Term((**m).clone()));
                for (p, tag, k2) in self.successors(&k) {
                    let k2 = k2.as_kind().unwrap().clone();
                    out.push((
                        prefixed(0, p),
                        tag,
                        Expr::Term(Term::Lam(b.clone(), k2.into(), as_term_arc(&m))),
                    ));
                }
                for (p, tag, m2) in self.successors(&m) {
                    let m2 = m2.as_term().unwrap().clone();
                    out.push((
                        prefixed(1, p),
                        tag,
                        Expr::Term(Term::Lam(b.clone(), as_kind_arc(&k), m2.into())),
                    ));
                }
            }
            Expr::Term(Term::App(f, a)) => {
                let (fe, ae) = (Expr::Term((**f).clone()), Expr::Term((**a).clone()));
                for (p, tag, f2) in self.successors(&fe) {
                    let f2 = f2.as_term().unwrap().clone();
                    out.push((prefixed(0, p), tag, Expr::Term(Term::App(f2.into(), a.clone()))));
                }
                for (p, tag, a2) in self.successors(&ae) {
                    let a2 = a2.as_term().unwrap().clone();
                    out.push((prefixed(1, p), tag, Expr::Term(Term::App(f.clone(), a2.into()))));
                }
            }
            Expr::Kind(Kind::El(m)) => {
                for (p, tag, m2) in self.successors(&Expr::Term((**m).clone())) {
                    let m2 = m2.as_term().unwrap().clone();
                    out.push((prefixed(0, p), tag, Expr::Kind(Kind::El(m2.into()))));
                }
            }
            Expr::Kind(Kind::Pi(b, k1, k2)) => {
                for (p, tag, d) in self.successors(&Expr::Kind((**k1).clone())) {
                    let d = d.as_kind().unwrap().clone();
                    out.push((
                        prefixed(0, p),
                        tag,
                        Expr::Kind(Kind::Pi(b.clone(), d.into(), k2.clone())),
                    ));
                }
                for (p, tag, c) in self.successors(&Expr::Kind((**k2).clone())) {
                    let c = c.as_kind().unwrap().clone();
                    out.push((
                        prefixed(1, p),
                        tag,
                        Expr::Kind(Kind::Pi(b.clone(), k1.clone(), c.into())),
                    ));
                }
            }
            Expr::Kind(Kind::KApp(k, n)) => {
                for (p, tag, k2) in self.successors(&Expr::Kind((**k).clone())) {
                    let k2 = k2.as_kind().unwrap().clone();
                    out.push((prefixed(0, p), tag, Expr::Kind(Kind::KApp(k2.into(), n.clone()))));
                }
                for (p, tag, n2) in self.successors(&Expr::Term((**n).clone())) {
                    let n2 = n2.as_term().unwrap().clone();
                    out.push((prefixed(1, p), tag, Expr::Kind(Kind::KApp(k.clone(), n2.into()))));
                }
            }
            _ => {}
        }
        out
    }

    /// The redex a strategy contracts next, if any.
    pub fn select(&self, e: &Expr, strategy: Strategy) -> Option<(Position, RuleTag)> {
        let rs = self.redexes(e);
        match strategy {
            Strategy::LeftmostOutermost => rs.into_iter().next(),
            Strategy::LeftmostInnermost => {
                let positions: Vec<Position> = rs.iter().map(|(p, _)| p.clone()).collect();
                rs.into_iter()
                    .find(|(p, _)| !positions.iter().any(|q| q != p && p.is_prefix_of(q)))
            }
        }
    }

    /// Reduces with the given strategy until no redex remains or `fuel`
    /// steps have been taken. Does not check arities.
    pub fn normalize(&self, e: &Expr, strategy: Strategy, fuel: usize) -> Result<Normalized, Box<NormalizeError>> {
        let mut trace = ReductionTrace {
            start: e.clone(),
            steps: Vec::new(),
        };
        let mut cur = e.clone();
        loop {
            let Some((pos, tag)) = self.select(&cur, strategy) else {
                return Ok(Normalized {
                    normal_form: cur,
                    trace,
                });
            };
            if trace.steps.len() >= fuel {
                return Err(Box::new(NormalizeError::FuelExhausted { fuel, trace }));
            }
            cur = self.step(&cur, &pos, &tag).expect("selected redex contracts");
            trace.steps.push(TraceStep {
                position: pos,
                rule: tag,
                result: cur.clone(),
            });
        }
    }

    /// Normal form, or `None` if fuel runs out.
    pub fn normal_form(&self, e: &Expr, fuel: usize) -> Option<Expr> {
        self.normalize(e, Strategy::LeftmostOutermost, fuel)
            .ok()
            .map(|n| n.normal_form)
    }
}

fn prefixed(i: u8, p: Position) -> Position {
    let mut v = Vec::with_capacity(p.0.len() + 1);
    v.push(i);
    v.extend(p.0);
    Position(v)
}

fn as_term_arc(e: &Expr) -> Arc<Term> {
    Arc::new(e.as_term().unwrap().clone())
}

fn as_kind_arc(e: &Expr) -> Arc<Kind> {
    Arc::new(e.as_kind().unwrap().clone())
}

/// Children of `e` in position order, wrapped as expressions.
pub(crate) fn for_each_child(e: &Expr, mut f: impl FnMut(u8, Expr)) {
    match e {
        Expr::Term(Term::Lam(_, k, m)) => {
            f(0, Expr::Kind((**k).clone()));
            f(1, Expr::Term((**m).clone()));
        }
        Expr::Term(Term::App(m, n)) => {
            f(0, Expr::Term((**m).clone()));
            f(1, Expr::Term((**n).clone()));
        }
        Expr::Kind(Kind::El(m)) => f(0, Expr::Term((**m).clone())),
        Expr::Kind(Kind::Pi(_, k1, k2)) => {
            f(0, Expr::Kind((**k1).clone()));
            f(1, Expr::Kind((**k2).clone()));
        }
        Expr::Kind(Kind::KApp(k, n)) => {
            f(0, Expr::Kind((**k).clone()));
            f(1, Expr::Term((**n).clone()));
        }
        _ => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    LeftmostInnermost,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outermost" | "leftmost-outermost" | "lo" => Ok(Strategy::LeftmostOutermost),
            "innermost" | "leftmost-innermost" | "li" => Ok(Strategy::LeftmostInnermost),
            other => Err(format!("unknown strategy `{other}` (expected outermost or innermost)")),
        }
    }
}

pub const DEFAULT_NORMALIZE_FUEL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no {rule} redex at {position}")]
    NotARedex { position: Position, rule: RuleTag },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub position: Position,
    pub rule: RuleTag,
    pub result: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub start: Expr,
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    pub fn last(&self) -> &Expr {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// Re-runs every step and checks it lands on the recorded result.
    pub fn replays(&self, r: &Reducer<'_>) -> bool {
        let mut cur = self.start.clone();
        for s in &self.steps {
            match r.step(&cur, &s.position, &s.rule) {
                Ok(next) if next == s.result => cur = next,
                _ => return false,
            }
        }
        true
    }

    pub fn document(&self) -> TraceDocument {
        let last = self.last();
        TraceDocument {
            start: self.start.to_string(),
            steps: self
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| StepRecord {
                    step: i + 1,
                    rule: s.rule.to_string(),
                    position: s.position.to_string(),
                    term: s.result.to_string(),
                })
                .collect(),
            normal_form: last.to_string(),
            stats: TraceStats {
                steps: self.steps.len(),
                start_size: self.start.size(),
                result_size: last.size(),
            },
        }
    }
}

impl fmt::Display for ReductionTrace {
    /// One `step <n>: <rule> at <position> => <term>` line per step.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "step {}: {} at {} => {}", i + 1, s.rule, s.position, s.result)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceDocument {
    pub start: String,
    pub steps: Vec<StepRecord>,
    pub normal_form: String,
    pub stats: TraceStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub rule: String,
    pub position: String,
    pub term: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStats {
    pub steps: usize,
    pub start_size: usize,
    pub result_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub normal_form: Expr,
    pub trace: ReductionTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    NoArity(#[from] ArityError),
    #[error("fuel exhausted after {fuel} steps")]
    FuelExhausted { fuel: usize, trace: ReductionTrace },
}

/// All enabled redexes of `subject` in preorder.
pub fn redexes(sig: &Signature, rules: &RuleSet, subject: &Expr) -> Vec<(Position, RuleTag)> {
    Reducer::new(sig, rules).redexes(subject)
}

pub fn step(
    sig: &Signature,
    rules: &RuleSet,
    subject: &Expr,
    pos: &Position,
    tag: &RuleTag,
) -> Result<Expr, StepError> {
    Reducer::new(sig, rules).step(subject, pos, tag)
}

/// Checks that `subject` has an arity under `ctx`, then normalises it.
pub fn normalize(
    sig: &Signature,
    ctx: &ArityContext,
    subject: &Expr,
    rules: &RuleSet,
    strategy: Strategy,
    fuel: usize,
) -> Result<Normalized, Box<NormalizeError>> {
    infer_arity(sig, ctx, subject).map_err(|e| Box::new(NormalizeError::NoArity(e)))?;
    Reducer::new(sig, rules).normalize(subject, strategy, fuel)
}

/// As [`normalize`] without the arity check.
pub fn normalize_unchecked(
    sig: &Signature,
    subject: &Expr,
    rules: &RuleSet,
    strategy: Strategy,
    fuel: usize,
) -> Result<Normalized, Box<NormalizeError>> {
    Reducer::new(sig, rules).normalize(subject, strategy, fuel)
}
