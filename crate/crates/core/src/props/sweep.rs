//! Exhaustive small-scope sweep: every correct-arity subject up to a size
//! bound is explored completely and checked for strong normalisation,
//! subject reduction, arity uniqueness and uniqueness of normal forms.

use rayon::prelude::*;
use serde::Serialize;

use crate::explore::{sn_explore, DEFAULT_SN_FUEL};
use crate::props::enumerate::enumerate;
use crate::props::lemmas::{check_subject_reduction, check_uniqueness, Outcome};
use crate::reduce::RuleSet;
use crate::signature::Signature;
use crate::syntax::{Arity, ArityContext, Class, Expr};

/// One `(0,0)` and two `0` variables.
pub const SWEEP_CONTEXT: &str = "f:(0,0), x:0, y:0";

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub max_size: usize,
    pub fuel: usize,
    pub rules: RuleSet,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_size: 8,
            fuel: DEFAULT_SN_FUEL,
            rules: RuleSet::all(),
        }
    }
}

/// A subject with more than one normal form, enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalFormConflict {
    pub context: String,
    pub rules: String,
    pub subject: String,
    pub class: Class,
    pub normal_forms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub max_size: usize,
    pub context: String,
    pub rules: String,
    pub fuel: usize,
    pub subjects: usize,
    pub terms: usize,
    pub kinds: usize,
    pub fuel_exhaustions: Vec<String>,
    pub longest_path: usize,
    pub longest_path_subject: String,
    pub largest_graph: usize,
    pub subject_reduction_failures: Vec<String>,
    pub uniqueness_failures: Vec<String>,
    pub normal_form_conflicts: Vec<NormalFormConflict>,
}

impl SweepReport {
    /// Strong normalisation, subject reduction and arity uniqueness held
    /// everywhere. Normal-form conflicts are reported separately.
    pub fn lemmas_hold(&self) -> bool {
        self.fuel_exhaustions.is_empty()
            && self.subject_reduction_failures.is_empty()
            && self.uniqueness_failures.is_empty()
    }
}

struct Row {
    exhausted: bool,
    longest: usize,
    nodes: usize,
    subject_reduction: Option<String>,
    uniqueness: Option<String>,
    normal_forms: Vec<String>,
}

fn explain(o: Outcome) -> Option<String> {
    match o {
        Outcome::Fail { explanation } | Outcome::BoundExceeded { explanation } => Some(explanation),
        _ => None,
    }
}

pub fn exhaustive_sweep(sig: &Signature, ctx: &ArityContext, cfg: &SweepConfig) -> SweepReport {
    let subjects: Vec<(Expr, Arity)> = enumerate(sig, ctx, cfg.max_size);
    let rows: Vec<Row> = subjects
        .par_iter()
        .map(|(e, _)| {
            let r = sn_explore(sig, e, &cfg.rules, cfg.fuel);
            Row {
                exhausted: r.fuel_exhausted,
                longest: r.longest_path.unwrap_or(0),
                nodes: r.nodes,
                subject_reduction: explain(check_subject_reduction(sig, ctx, e, &cfg.rules)),
                uniqueness: explain(check_uniqueness(sig, ctx, e)),
                normal_forms: r.normal_forms.iter().map(Expr::to_string).collect(),
            }
        })
        .collect();
    let mut report = SweepReport {
        max_size: cfg.max_size,
        context: ctx.to_string(),
        rules: cfg.rules.to_string(),
        fuel: cfg.fuel,
        subjects: subjects.len(),
        terms: subjects.iter().filter(|(e, _)| e.class() == Class::Term).count(),
        kinds: subjects.iter().filter(|(e, _)| e.class() == Class::Kind).count(),
        fuel_exhaustions: Vec::new(),
        longest_path: 0,
        longest_path_subject: String::new(),
        largest_graph: 0,
        subject_reduction_failures: Vec::new(),
        uniqueness_failures: Vec::new(),
        normal_form_conflicts: Vec::new(),
    };
    for ((e, _), row) in subjects.iter().zip(rows) {
        if row.exhausted {
            report.fuel_exhaustions.push(e.to_string());
        }
        if row.longest > report.longest_path {
            report.longest_path = row.longest;
            report.longest_path_subject = e.to_string();
        }
        report.largest_graph = report.largest_graph.max(row.nodes);
        if let Some(s) = row.subject_reduction {
            report.subject_reduction_failures.push(s);
        }
        if let Some(s) = row.uniqueness {
            report.uniqueness_failures.push(s);
        }
        if row.normal_forms.len() > 1 {
            report.normal_form_conflicts.push(NormalFormConflict {
                context: ctx.to_string(),
                rules: cfg.rules.to_string(),
                subject: e.to_string(),
                class: e.class(),
                normal_forms: row.normal_forms,
            });
        }
    }
    report
}
