use std::fmt::Write;

use mlf_kernel::explore::DEFAULT_SN_FUEL;
use mlf_kernel::props::lemmas::Outcome;
use mlf_kernel::props::{replay_case, run_suite, SuiteConfig, SuiteReport};
use mlf_kernel::reduce::{normalize_unchecked, NormalizeError, DEFAULT_NORMALIZE_FUEL};
use mlf_kernel::typecheck::TypeErrorReason;
use mlf_kernel::{
    arity_translate, arity_translate_entries, infer_arity, normalize, sn_explore, Checker, Expr, Signature,
};
use serde_json::{json, Value};

use crate::input::{self, InputError};
use crate::{Cli, Command, Flags, Reduction, Report, Subject};

pub const OK: u8 = 0;
pub const JUDGEMENT_FAILED: u8 = 1;
pub const EXHAUSTED: u8 = 3;

pub fn run(cli: Cli) -> Report {
    let name = command_name(&cli.command);
    let result = match &cli.command {
        Command::Arity { context, subject } => arity(&cli.flags, context, subject),
        Command::Check { context, subject } => check(&cli.flags, context, subject),
        Command::Normalize { subject, reduction } => reduce(&cli.flags, subject, reduction, false),
        Command::Trace { subject, reduction } => reduce(&cli.flags, subject, reduction, true),
        Command::Sn { subject } => sn(&cli.flags, subject),
        Command::Props {
            seed,
            cases,
            jobs,
            only,
            exhaustive,
            timing,
            replay,
        } => match replay {
            Some(r) => replay_one(&cli.flags, *seed, &r[0], &r[1]),
            None => props(
                &cli.flags,
                SuiteConfig {
                    seed: *seed,
                    cases: *cases,
                    jobs: *jobs,
                    only: only.clone(),
                    exhaustive: *exhaustive,
                    timing: *timing,
                },
            ),
        },
        Command::Translate { subject } => translate(&cli.flags, subject),
    };
    let mut report = result.unwrap_or_else(|e| e.report(name));
    if let Value::Object(m) = &mut report.json {
        m.insert("command".into(), json!(name));
    }
    report
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Arity { .. } => "arity",
        Command::Check { .. } => "check",
        Command::Normalize { .. } => "normalize",
        Command::Trace { .. } => "trace",
        Command::Sn { .. } => "sn",
        Command::Props { .. } => "props",
        Command::Translate { .. } => "translate",
    }
}

fn ok(json: Value, text: String) -> Report {
    Report {
        code: OK,
        json,
        text,
        diag: String::new(),
    }
}

fn failed(code: u8, json: Value, diag: String) -> Report {
    Report {
        code,
        json,
        text: String::new(),
        diag,
    }
}

fn arity(flags: &Flags, context: &std::path::Path, subject: &Subject) -> Result<Report, InputError> {
    let sig = input::signature(&flags.sig)?;
    let ctx = input::arity_context(&input::read(context)?, &sig)?;
    let e = input::expr(&input::subject_source(subject)?, &sig)?;
    Ok(match infer_arity(&sig, &ctx, &e) {
        Ok(a) => ok(
            json!({ "status": "ok", "subject": e.to_string(), "class": e.class(), "arity": a }),
            format!("{a}\n"),
        ),
        Err(err) => failed(
            JUDGEMENT_FAILED,
            json!({ "status": "no_arity", "subject": e.to_string(), "error": err }),
            format!("NoArity: {err}\n"),
        ),
    })
}

fn check(flags: &Flags, context: &std::path::Path, subject: &Subject) -> Result<Report, InputError> {
    let sig = input::signature(&flags.sig)?;
    let entries = input::type_context(&input::read(context)?, &sig)?;
    let e = input::expr(&input::subject_source(subject)?, &sig)?;
    let checker = Checker::with_rules(&sig, flags.rules.clone());
    let type_failure = |what: String, err: &mlf_kernel::TypeError| {
        let code = if err.reason == TypeErrorReason::NormalizationFuel {
            EXHAUSTED
        } else {
            JUDGEMENT_FAILED
        };
        failed(
            code,
            json!({ "status": "type_error", "in": what, "error": err }),
            format!("TypeError in {what}: {err}\n"),
        )
    };
    if let Err(err) = checker.check_signature() {
        return Ok(type_failure(format!("signature constant `{}`", err.name), &err.error));
    }
    let ctx = match checker.check_context(entries) {
        Ok(ctx) => ctx,
        Err(err) => return Ok(type_failure(format!("context entry `{}`", err.name), &err.error)),
    };
    Ok(match &e {
        Expr::Term(t) => match checker.infer_type(&ctx, t) {
            Ok(k) => ok(
                json!({ "status": "ok", "subject": t.to_string(), "class": "term", "kind": k.to_string() }),
                format!("{k}\n"),
            ),
            Err(err) => type_failure("subject".into(), &err),
        },
        Expr::Kind(k) => match checker.check_kind(&ctx, k) {
            Ok(()) => ok(
                json!({ "status": "ok", "subject": k.to_string(), "class": "kind", "wellFormed": true }),
                format!("{k} is a well-formed kind\n"),
            ),
            Err(err) => type_failure("subject".into(), &err),
        },
    })
}

fn reduce(flags: &Flags, subject: &Subject, r: &Reduction, trace: bool) -> Result<Report, InputError> {
    let sig = input::signature(&flags.sig)?;
    let e = input::expr(&input::subject_source(subject)?, &sig)?;
    let fuel = flags.fuel.unwrap_or(DEFAULT_NORMALIZE_FUEL);
    let result = match &r.context {
        Some(path) => {
            let ctx = input::arity_context(&input::read(path)?, &sig)?;
            normalize(&sig, &ctx, &e, &flags.rules, r.strategy, fuel)
        }
        None => normalize_unchecked(&sig, &e, &flags.rules, r.strategy, fuel),
    };
    Ok(match result {
        Ok(n) => {
            let doc = n.trace.document();
            let mut text = String::new();
            if trace {
                writeln!(text, "start: {}", n.trace.start).unwrap();
                write!(text, "{}", n.trace).unwrap();
                let steps = n.trace.steps.len();
                let plural = if steps == 1 { "" } else { "s" };
                writeln!(text, "normal form: {} ({steps} step{plural})", n.normal_form).unwrap();
            } else {
                writeln!(text, "{}", n.normal_form).unwrap();
            }
            let mut json = json!({ "status": "ok", "normalForm": doc.normal_form, "steps": doc.stats.steps });
            if trace {
                json["trace"] = serde_json::to_value(&doc).expect("trace serialises");
            }
            ok(json, text)
        }
        Err(err) => match *err {
            NormalizeError::NoArity(a) => failed(
                JUDGEMENT_FAILED,
                json!({ "status": "no_arity", "subject": e.to_string(), "error": a }),
                format!("NoArity: {a}\n"),
            ),
            NormalizeError::FuelExhausted { fuel, trace: t } => {
                let doc = t.document();
                let mut json = json!({ "status": "fuel_exhausted", "fuel": fuel, "last": t.last().to_string() });
                if trace {
                    json["trace"] = serde_json::to_value(&doc).expect("trace serialises");
                }
                let mut diag = String::new();
                if trace {
                    write!(diag, "{t}").unwrap();
                }
                writeln!(diag, "fuel exhausted after {fuel} steps; last term: {}", t.last()).unwrap();
                failed(EXHAUSTED, json, diag)
            }
        },
    })
}

fn sn(flags: &Flags, subject: &Subject) -> Result<Report, InputError> {
    let sig = input::signature(&flags.sig)?;
    let e = input::expr(&input::subject_source(subject)?, &sig)?;
    let fuel = flags.fuel.unwrap_or(DEFAULT_SN_FUEL);
    let r = sn_explore(&sig, &e, &flags.rules, fuel);
    let doc = r.document();
    let mut text = String::new();
    writeln!(text, "nodes: {}", r.nodes).unwrap();
    writeln!(text, "edges: {}", r.edges).unwrap();
    match r.longest_path {
        Some(n) => writeln!(text, "longest path: {n}").unwrap(),
        None => writeln!(text, "longest path: unknown").unwrap(),
    }
    writeln!(text, "largest term: {}", r.max_size).unwrap();
    for nf in &doc.normal_forms {
        writeln!(text, "normal form: {nf}").unwrap();
    }
    let status = if r.cycle_detected {
        "fuel_exhausted (cycle found)"
    } else if r.fuel_exhausted {
        "fuel_exhausted"
    } else {
        "terminates"
    };
    writeln!(text, "status: {status}").unwrap();
    let json = json!({
        "status": if r.fuel_exhausted { "fuel_exhausted" } else { "ok" },
        "fuel": fuel,
        "report": doc,
    });
    Ok(Report {
        code: if r.fuel_exhausted { EXHAUSTED } else { OK },
        json,
        text,
        diag: String::new(),
    })
}

fn suite_signature(flags: &Flags) -> Result<Signature, InputError> {
    if flags.sig.is_empty() {
        Ok(Signature::builtins())
    } else {
        input::signature(&flags.sig)
    }
}

fn props(flags: &Flags, cfg: SuiteConfig) -> Result<Report, InputError> {
    let sig = suite_signature(flags)?;
    let report = run_suite(&sig, &cfg);
    let code = suite_code(&report);
    let mut text = String::new();
    for v in &report.lemmas {
        write!(
            text,
            "{:<28} {:>5}/{} passed, {} skipped",
            v.lemma, v.passed, v.cases, v.skipped
        )
        .unwrap();
        if v.bound_exhausted > 0 {
            write!(text, ", {} bound exhausted", v.bound_exhausted).unwrap();
        }
        if v.counterexamples > 0 {
            write!(text, ", {} COUNTEREXAMPLES", v.counterexamples).unwrap();
        }
        text.push('\n');
        for f in &v.failures {
            writeln!(text, "  case {}: {}", f.case, f.outcome).unwrap();
            for (k, val) in &f.inputs {
                writeln!(text, "    {k} = {val}").unwrap();
            }
        }
    }
    if let Some(s) = &report.sweep {
        writeln!(
            text,
            "sweep (size <= {}, {}): {} subjects, longest path {}, largest graph {}, {} fuel exhaustions, {} subject-reduction failures, {} uniqueness failures, {} subjects with several normal forms",
            s.max_size,
            s.context,
            s.subjects,
            s.longest_path,
            s.largest_graph,
            s.fuel_exhaustions.len(),
            s.subject_reduction_failures.len(),
            s.uniqueness_failures.len(),
            s.normal_form_conflicts.len()
        )
        .unwrap();
        for c in &s.normal_form_conflicts {
            writeln!(
                text,
                "  {} has normal forms {}",
                c.subject,
                c.normal_forms.join(" and ")
            )
            .unwrap();
        }
    }
    writeln!(
        text,
        "seed {}: {} counterexamples, {} bound exhaustions",
        report.seed, report.counterexamples, report.bound_exhaustions
    )
    .unwrap();
    if let Some(ms) = report.elapsed_ms {
        writeln!(text, "elapsed: {ms} ms").unwrap();
    }
    let mut json = serde_json::to_value(&report).expect("report serialises");
    json["status"] = json!(if code == OK { "ok" } else { "failed" });
    Ok(Report {
        code,
        json,
        text,
        diag: String::new(),
    })
}

fn suite_code(r: &SuiteReport) -> u8 {
    let sweep_failed = r
        .sweep
        .as_ref()
        .is_some_and(|s| !s.subject_reduction_failures.is_empty() || !s.uniqueness_failures.is_empty());
    let sweep_exhausted = r.sweep.as_ref().is_some_and(|s| !s.fuel_exhaustions.is_empty());
    if r.counterexamples > 0 || sweep_failed {
        JUDGEMENT_FAILED
    } else if r.bound_exhaustions > 0 || sweep_exhausted {
        EXHAUSTED
    } else {
        OK
    }
}

fn replay_one(flags: &Flags, seed: u64, lemma: &str, case: &str) -> Result<Report, InputError> {
    let sig = suite_signature(flags)?;
    let case: usize = case.parse().map_err(|_| InputError {
        message: format!("case index `{case}` is not a number"),
        detail: json!({ "kind": "usage", "message": format!("case index `{case}` is not a number") }),
    })?;
    let Some((inputs, outcome)) = replay_case(&sig, lemma, seed, case) else {
        let message = format!("no lemma named `{lemma}`");
        return Err(InputError {
            detail: json!({ "kind": "usage", "message": message }),
            message,
        });
    };
    let code = match outcome {
        Outcome::Fail { .. } => JUDGEMENT_FAILED,
        Outcome::BoundExceeded { .. } => EXHAUSTED,
        _ => OK,
    };
    let mut text = format!("{lemma} case {case} (seed {seed}): {outcome}\n");
    for (k, v) in &inputs {
        writeln!(text, "  {k} = {v}").unwrap();
    }
    let inputs: serde_json::Map<String, Value> = inputs.into_iter().map(|(k, v)| (k, json!(v))).collect();
    Ok(Report {
        code,
        json: json!({ "lemma": lemma, "seed": seed, "case": case, "inputs": inputs, "outcome": outcome }),
        text,
        diag: String::new(),
    })
}

fn translate(flags: &Flags, subject: &Subject) -> Result<Report, InputError> {
    let sig = input::signature(&flags.sig)?;
    let src = input::subject_source(subject)?;
    if input::is_typed_context(&src.text) {
        let entries = input::type_context(&src, &sig)?;
        return Ok(match arity_translate_entries(&entries) {
            Ok(ctx) => ok(
                json!({ "status": "ok", "context": ctx.to_string() }),
                format!("{ctx}\n"),
            ),
            Err(e) => failed(
                JUDGEMENT_FAILED,
                json!({ "status": "not_mlf", "message": e.to_string() }),
                format!("{e}\n"),
            ),
        });
    }
    Ok(match input::expr(&src, &sig)? {
        Expr::Kind(k) => match arity_translate(&k) {
            Ok(a) => ok(
                json!({ "status": "ok", "kind": k.to_string(), "arity": a }),
                format!("{a}\n"),
            ),
            Err(e) => failed(
                JUDGEMENT_FAILED,
                json!({ "status": "not_mlf", "kind": k.to_string(), "message": e.to_string() }),
                format!("{e}\n"),
            ),
        },
        Expr::Term(t) => {
            let message = format!("`{t}` is a term; translate expects a kind or a typed context");
            failed(
                JUDGEMENT_FAILED,
                json!({ "status": "not_a_kind", "subject": t.to_string(), "message": message }),
                format!("{message}\n"),
            )
        }
    })
}
