//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines come out in order. The
//! process fails if any criterion fails, except those listed in
//! [`KNOWN_UNATTAINABLE`]: those still print FAIL, and only count as
//! expected when their counterexample artifact replays. A listed criterion
//! that starts passing also fails the run, so the list cannot go stale.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use mlf_kernel::explore::DEFAULT_SN_FUEL;
use mlf_kernel::props::sweep::{NormalFormConflict, SWEEP_CONTEXT};
use mlf_kernel::props::typed::{corpus_context, typed_corpus};
use mlf_kernel::props::{exhaustive_sweep, run_suite, SuiteConfig, SweepConfig, SweepReport};
use mlf_kernel::signature::finite_type;
use mlf_kernel::surface::{parse_arity_context, parse_expr, parse_term, parse_type_context, ParseErrorKind};
use mlf_kernel::{alpha_eq, infer_arity, sn_explore, Arity, Checker, Expr, RuleSet, Signature, Term};

/// Criteria that fail for a reason recorded alongside the artifact: with
/// typed binders, β and η overlap on terms like `λx:Type.(λy:El(a).y) x`,
/// whose two normal forms differ in their binder annotation.
const KNOWN_UNATTAINABLE: &[&str] = &["unique-normal-form"];

struct Verdict {
    pass: bool,
    detail: String,
    /// For failures: whether the counterexample was re-derived from the
    /// emitted artifact.
    reproduced: bool,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict {
        pass: true,
        detail: detail.into(),
        reproduced: false,
    }
}

fn fail(detail: impl Into<String>) -> Verdict {
    Verdict {
        pass: false,
        detail: detail.into(),
        reproduced: false,
    }
}

fn within(limit: Duration, took: Duration, v: Verdict) -> Verdict {
    if v.pass && took > limit {
        return fail(format!("{} but took {took:?}, limit {limit:?}", v.detail));
    }
    Verdict {
        detail: format!("{} [{:.2?}]", v.detail, took),
        ..v
    }
}

fn artifact_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("artifact directory");
    dir
}

fn example_fidelity() -> Verdict {
    let start = Instant::now();
    let sig = Signature::empty();
    let mut problems = Vec::new();
    for (ctx, subject) in [
        ("A:0, B:0, C:0, f:(0,0), b:0", "f b"),
        ("A:0, B:(0,0), f:(0,(0,0)), x1:0, x2:0, b:0", "f x1 b"),
    ] {
        let ctx = parse_arity_context(ctx).unwrap();
        match infer_arity(&sig, &ctx, &parse_expr(subject, &sig).unwrap()) {
            Ok(Arity::Zero) => {}
            other => problems.push(format!("{subject}: {other:?}")),
        }
    }
    let checker = Checker::new(&sig);
    let typed = parse_type_context(
        "assume A : Type; assume B : Type; assume C : Type; assume f : (x:El(A))El(C); assume b : El(B);",
        &sig,
    )
    .unwrap();
    let gamma = checker.check_context(typed).unwrap();
    if checker.infer_type(&gamma, &parse_term("f b", &sig).unwrap()).is_ok() {
        problems.push("f b typechecks".into());
    }
    let z = parse_arity_context("z:0").unwrap();
    for subject in ["\\x:El(z).x x", "(\\x:El(z).x x) (\\x:El(z).x x)"] {
        if infer_arity(&sig, &z, &parse_expr(subject, &sig).unwrap()).is_ok() {
            problems.push(format!("{subject} has an arity"));
        }
    }
    match parse_expr("El(Type)", &sig) {
        Err(e) if e.kind == ParseErrorKind::IllFormed => {}
        other => problems.push(format!("El(Type) not rejected as ill-formed: {other:?}")),
    }
    let v = if problems.is_empty() {
        pass("2 arity examples give 0; f b, ω, ωω and El(Type) rejected")
    } else {
        fail(problems.join("; "))
    };
    within(Duration::from_secs(1), start.elapsed(), v)
}

fn rule_fidelity() -> Verdict {
    let three = finite_type("T", &["c1", "c2", "c3"]).unwrap();
    let sig = Signature::builtins().merged(&three).unwrap();
    let cases = [
        ("pi1 A B (pair A B a b)", "a"),
        ("pi2 A B (pair A B a b)", "b"),
        ("E_Bool P x y true", "x"),
        ("E_Bool P x y false", "y"),
        ("E_T P x y z c1", "x"),
        ("E_T P x y z c2", "y"),
        ("E_T P x y z c3", "z"),
        ("uo bool", "Bool"),
    ];
    let mut problems = Vec::new();
    for (lhs, rhs) in cases {
        let e = parse_expr(lhs, &sig).unwrap();
        let want = parse_expr(rhs, &sig).unwrap();
        match mlf_kernel::Reducer::new(&sig, &RuleSet::all()).normal_form(&e, 100) {
            Some(g) if alpha_eq(&g, &want) => {}
            other => problems.push(format!("{lhs} gave {other:?}, want {rhs}")),
        }
    }
    if problems.is_empty() {
        pass(format!("{} rule instances reach their right-hand sides", cases.len()))
    } else {
        fail(problems.join("; "))
    }
}

fn bridge() -> Verdict {
    let start = Instant::now();
    let sig = Signature::builtins();
    let checker = Checker::new(&sig);
    let ctx = corpus_context(&checker);
    let corpus = typed_corpus(&checker, &ctx, 42, 600);
    let mut occurring = BTreeSet::new();
    let mut applied = BTreeSet::new();
    let mut violations = Vec::new();
    for (t, _) in &corpus {
        occurring.extend(t.constants().iter().map(|c| c.to_string()));
        applied.extend(applied_constants(t));
        if let Err(e) = checker.theorem2_bridge(&ctx, t) {
            violations.push(format!("{t}: {e}"));
        }
    }
    // Constants of arity 0 cannot be applied; they must occur.
    let missing: Vec<String> = sig
        .constants()
        .iter()
        .filter(|d| {
            let n = d.name.to_string();
            if d.arity.is_zero() {
                !occurring.contains(&n)
            } else {
                !applied.contains(&n)
            }
        })
        .map(|d| d.name.to_string())
        .collect();
    let v = if corpus.len() < 500 {
        fail(format!("only {} well-typed terms generated", corpus.len()))
    } else if !missing.is_empty() {
        fail(format!("constants missing from the corpus: {missing:?}"))
    } else if !violations.is_empty() {
        fail(format!("{} violations, first {}", violations.len(), violations[0]))
    } else {
        pass(format!(
            "{} well-typed terms covering all {} constants ({} applied), 0 violations",
            corpus.len(),
            sig.constants().len(),
            applied.len()
        ))
    };
    within(Duration::from_secs(30), start.elapsed(), v)
}

/// Constants that occur applied to at least one argument.
fn applied_constants(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn walk_term(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::App(f, a) => {
                if let (Term::Const(c), _) = t.spine() {
                    out.insert(c.to_string());
                }
                walk_term(f, out);
                walk_term(a, out);
            }
            Term::Lam(_, k, b) => {
                walk_kind(k, out);
                walk_term(b, out);
            }
            _ => {}
        }
    }
    fn walk_kind(k: &mlf_kernel::Kind, out: &mut BTreeSet<String>) {
        match k {
            mlf_kernel::Kind::El(t) => walk_term(t, out),
            mlf_kernel::Kind::Pi(_, a, b) => {
                walk_kind(a, out);
                walk_kind(b, out);
            }
            mlf_kernel::Kind::KApp(k, t) => {
                walk_kind(k, out);
                walk_term(t, out);
            }
            mlf_kernel::Kind::Type => {}
        }
    }
    walk_term(t, &mut out);
    out
}

fn sweep() -> (SweepReport, Duration) {
    let start = Instant::now();
    let ctx = parse_arity_context(SWEEP_CONTEXT).unwrap();
    let cfg = SweepConfig {
        max_size: 8,
        fuel: DEFAULT_SN_FUEL,
        rules: RuleSet::all(),
    };
    let r = exhaustive_sweep(&Signature::sigma(), &ctx, &cfg);
    (r, start.elapsed())
}

fn strong_normalization(r: &SweepReport, took: Duration) -> Verdict {
    let v = if r.fuel_exhaustions.is_empty() {
        pass(format!(
            "{} subjects of size <= {} over {} + sigma, fuel {}: 0 exhaustions; longest path {} ({}), largest graph {} nodes",
            r.subjects, r.max_size, r.context, r.fuel, r.longest_path, r.longest_path_subject, r.largest_graph
        ))
    } else {
        fail(format!(
            "{} fuel exhaustions, first {}",
            r.fuel_exhaustions.len(),
            r.fuel_exhaustions[0]
        ))
    };
    within(Duration::from_secs(600), took, v)
}

fn divergence() -> Verdict {
    let sig = Signature::empty();
    let ww = parse_expr("(\\x:El(z).x x) (\\x:El(z).x x)", &sig).unwrap();
    let fuels = [1, 2, 10, 1_000, DEFAULT_SN_FUEL];
    for fuel in fuels {
        let r = sn_explore(&sig, &ww, &RuleSet::all(), fuel);
        if !r.fuel_exhausted || !r.cycle_detected {
            return fail(format!(
                "fuel {fuel}: exhausted {}, cycle {}",
                r.fuel_exhausted, r.cycle_detected
            ));
        }
    }
    pass(format!("ωω exhausts fuel with a cycle at fuel {fuels:?}"))
}

fn lemma_suites() -> Verdict {
    let start = Instant::now();
    let sig = Signature::builtins();
    let report = run_suite(
        &sig,
        &SuiteConfig {
            seed: 42,
            cases: 1000,
            ..SuiteConfig::default()
        },
    );
    let required = [
        "subst-eta",
        "subst-sig:pi1",
        "fv-beta",
        "eta-case",
        "sig:pi1-case",
        "commutation-eta-beta",
        "commutation-sig:pi1-beta",
        "commutation-sig:pi2-beta",
        "commutation-sig:b1-beta",
        "commutation-sig:b2-beta",
        "commutation-sig:u-beta",
        "subject-reduction",
        "uniqueness",
    ];
    let mut problems = Vec::new();
    for name in required {
        match report.lemmas.iter().find(|v| v.lemma == name) {
            None => problems.push(format!("{name} not run")),
            Some(v) if v.cases != 1000 => problems.push(format!("{name}: {} cases", v.cases)),
            Some(v) if v.passed == 0 => problems.push(format!("{name}: every case skipped")),
            Some(_) => {}
        }
    }
    for v in report.lemmas.iter().filter(|v| !v.ok()) {
        let first = v.failures.first().map(|f| f.outcome.to_string()).unwrap_or_default();
        problems.push(format!(
            "{}: {} counterexamples, {} bound exhaustions; {first}",
            v.lemma, v.counterexamples, v.bound_exhausted
        ));
    }
    let checked: usize = report.lemmas.iter().map(|v| v.passed).sum();
    let skipped: usize = report.lemmas.iter().map(|v| v.skipped).sum();
    let v = if problems.is_empty() {
        pass(format!(
            "{} lemmas x 1000 cases at seed 42: {checked} checked, {skipped} skipped by precondition, 0 counterexamples, 0 bound exhaustions",
            report.lemmas.len()
        ))
    } else {
        fail(problems.join("; "))
    };
    within(Duration::from_secs(60), start.elapsed(), v)
}

/// Re-derives each recorded conflict from its text alone.
fn replay_conflict(c: &NormalFormConflict) -> Result<(), String> {
    let sig = Signature::sigma();
    let ctx = parse_arity_context(&c.context).map_err(|e| e.to_string())?;
    let rules: RuleSet = c
        .rules
        .parse()
        .map_err(|e: mlf_kernel::reduce::UnknownRule| e.to_string())?;
    let subject = parse_expr(&c.subject, &sig).map_err(|e| e.to_string())?;
    infer_arity(&sig, &ctx, &subject).map_err(|e| format!("{}: {e}", c.subject))?;
    let r = sn_explore(&sig, &subject, &rules, DEFAULT_SN_FUEL);
    let recorded: Vec<Expr> = c
        .normal_forms
        .iter()
        .map(|s| parse_expr(s, &sig).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let same = r.normal_forms.len() == recorded.len()
        && recorded.iter().all(|n| r.normal_forms.iter().any(|m| alpha_eq(n, m)));
    if r.fuel_exhausted || !same || recorded.len() < 2 {
        return Err(format!(
            "{} replays to {:?}",
            c.subject,
            r.normal_forms.iter().map(Expr::to_string).collect::<Vec<_>>()
        ));
    }
    if alpha_eq(&recorded[0], &recorded[1]) {
        return Err(format!("{}: normal forms are α-equal", c.subject));
    }
    Ok(())
}

fn unique_normal_forms(r: &SweepReport) -> Verdict {
    if r.normal_form_conflicts.is_empty() {
        return pass(format!("{} subjects, each with one normal form", r.subjects));
    }
    let path = artifact_dir().join("normal-form-conflicts.json");
    let doc = serde_json::json!({
        "maxSize": r.max_size,
        "context": r.context,
        "rules": r.rules,
        "signature": "sig:sigma",
        "conflicts": r.normal_form_conflicts,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).expect("write artifact");
    let replayed = r
        .normal_form_conflicts
        .iter()
        .map(replay_conflict)
        .collect::<Result<Vec<()>, String>>();
    let first = &r.normal_form_conflicts[0];
    Verdict {
        pass: false,
        detail: format!(
            "{} of {} subjects have two α-distinct normal forms, e.g. {} -> {}; artifact {}{}",
            r.normal_form_conflicts.len(),
            r.subjects,
            first.subject,
            first.normal_forms.join(" | "),
            path.display(),
            match &replayed {
                Ok(_) => String::new(),
                Err(e) => format!("; replay FAILED: {e}"),
            }
        ),
        reproduced: replayed.is_ok(),
    }
}

fn determinism() -> Verdict {
    let run = |jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mlf"))
            .args([
                "--json",
                "props",
                "--seed",
                "42",
                "--cases",
                "200",
                "--exhaustive",
                "6",
                "--jobs",
                jobs,
            ])
            .output()
            .expect("mlf runs");
        (out.status.code(), out.stdout)
    };
    let workers = std::thread::available_parallelism()
        .map_or(4, |n| n.get().max(2))
        .to_string();
    let first = run("1");
    let second = run("1");
    let parallel = run(&workers);
    if serde_json::from_slice::<serde_json::Value>(&first.1).is_err() {
        return fail("--json output does not parse");
    }
    if first != second {
        return fail("two runs with --jobs 1 differ");
    }
    if first != parallel {
        return fail(format!("--jobs 1 and --jobs {workers} differ"));
    }
    pass(format!(
        "props --json ({} bytes) identical over 2 runs and --jobs 1/{workers}",
        first.1.len()
    ))
}

fn main() {
    let (sweep_report, sweep_time) = sweep();
    let criteria: Vec<(&str, Verdict)> = vec![
        ("example-fidelity", example_fidelity()),
        ("rule-fidelity", rule_fidelity()),
        ("kind-arity-bridge", bridge()),
        (
            "strong-normalization-sweep",
            strong_normalization(&sweep_report, sweep_time),
        ),
        ("divergence-witness", divergence()),
        ("lemma-suites", lemma_suites()),
        ("unique-normal-form", unique_normal_forms(&sweep_report)),
        ("determinism", determinism()),
    ];
    let mut ok = true;
    for (name, v) in &criteria {
        let known = KNOWN_UNATTAINABLE.contains(name);
        let note = match (v.pass, known) {
            (true, true) => {
                ok = false;
                " [listed as unattainable but passed: update the list]"
            }
            (false, true) if v.reproduced => " [known unattainable; counterexample replayed from artifact]",
            (false, true) => {
                ok = false;
                " [known unattainable, but the artifact did not replay]"
            }
            (false, false) => {
                ok = false;
                ""
            }
            (true, false) => "",
        };
        println!("{} {name}: {}{note}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if !ok {
        std::process::exit(1);
    }
}
