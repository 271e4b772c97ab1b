use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

fn mlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlf"))
        .args(args)
        .output()
        .expect("mlf runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON document")
}

#[test]
fn arity_of_the_two_context_examples() {
    let o = mlf(&["arity", &corpus("remark-arity-1.ctx"), &corpus("f-b.term")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "0\n"));
    let o = mlf(&["arity", &corpus("remark-arity-2.ctx"), "-e", "f x1 b"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "0\n"));
}

#[test]
fn omega_omega_has_no_arity() {
    let o = mlf(&["arity", &corpus("z.ctx"), &corpus("omega-omega.term")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("NoArity"), "{}", stderr(&o));
}

#[test]
fn malformed_input_exits_2() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "(\\x:El(z).x").unwrap();
    let path = f.path().to_str().unwrap();
    let o = mlf(&["arity", &corpus("z.ctx"), path]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains(path), "{}", stderr(&o));
    let o = mlf(&["arity", &corpus("z.ctx"), "-e", "El(Type)"]);
    assert_eq!(code(&o), 2);
    let o = mlf(&["arity", "no/such/file", "-e", "x"]);
    assert_eq!(code(&o), 2);
    let o = mlf(&["normalize", "--rules", "gamma", "-e", "x"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_prints_the_kind() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = dir.path().join("a.ctx");
    std::fs::write(&ctx, "assume A : Type;\n").unwrap();
    let o = mlf(&["check", ctx.to_str().unwrap(), "-e", "\\x:El(A).x"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "(x:El(A))El(A)\n"));
}

#[test]
fn f_b_is_ill_typed() {
    let o = mlf(&["check", &corpus("remark-typed.ctx"), &corpus("f-b.term")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("TypeError"));
}

#[test]
fn projection_rule_makes_the_term_typecheck() {
    let ctx = corpus("projection.ctx");
    let term = corpus("f-y.term");
    assert_eq!(code(&mlf(&["check", &ctx, &term])), 1);
    let o = mlf(&["check", "--sig", "sigma", &ctx, &term]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "El(C)\n"));
    let o = mlf(&["check", "--sig", "sig:sigma", "--rules", "beta,eta", &ctx, &term]);
    assert_eq!(code(&o), 1);
    let o = mlf(&[
        "check",
        "--sig",
        "sig:sigma",
        "--rules",
        "beta,eta,sig:pi1",
        &ctx,
        &term,
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn signature_file_loads_and_checks() {
    let sig = corpus("sigma.sig");
    let o = mlf(&["check", "--sig", &sig, &corpus("projection.ctx"), &corpus("f-y.term")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "El(C)\n"));
    let o = mlf(&["check", "--sig", &corpus("three.sig"), "/dev/null", "-e", "E_Three"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn normalize_projection() {
    let o = mlf(&["normalize", "--sig", "sigma", &corpus("pi1-pair.term")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "a\n"));
    let o = mlf(&[
        "normalize",
        "--sig",
        &corpus("three.sig"),
        "-e",
        "E_Three P x y z three",
    ]);
    assert_eq!(stdout(&o), "z\n");
}

#[test]
fn normalize_checks_arity_when_given_a_context() {
    let o = mlf(&["normalize", "--ctx", &corpus("z.ctx"), &corpus("omega-omega.term")]);
    assert_eq!(code(&o), 1);
    let o = mlf(&["normalize", "--fuel", "50", &corpus("omega-omega.term")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn trace_lists_each_step() {
    let o = mlf(&["trace", "--sig", "sig:all", "-e", "pi1 U uo (pair U uo bool b)"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("step 1: sig:pi1 at [] => bool"), "{out}");
    let o = mlf(&["--json", "trace", "-e", "(\\x:Type.x) ((\\y:Type.y) a)"]);
    let doc = json(&o);
    assert_eq!(doc["trace"]["steps"].as_array().unwrap().len(), 2);
    assert_eq!(doc["normalForm"], "a");
}

#[test]
fn sn_on_omega_omega_exhausts_fuel() {
    let o = mlf(&["sn", "--fuel", "100", &corpus("omega-omega.term")]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("fuel_exhausted"));
    let o = mlf(&["--json", "sn", "-e", "\\x:El(a).f x"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["report"]["nodes"], 2);
    assert_eq!(doc["report"]["normalForms"][0], "f");
}

#[test]
fn translate_kinds_and_contexts() {
    let o = mlf(&["translate", "-e", "(x:Type)(y:El(x))Type"]);
    assert_eq!(stdout(&o), "(0,(0,0))\n");
    let o = mlf(&["translate", &corpus("remark-typed.ctx")]);
    assert_eq!(stdout(&o), "<A:0, B:0, C:0, f:(0,0), b:0>\n");
    let o = mlf(&["translate", "-e", "((x:Type)Type) y"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn props_small_run_passes() {
    let o = mlf(&["props", "--cases", "20", "--only", "subst", "--only", "commutation"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("commutation-eta-beta"));
}

#[test]
fn props_json_is_deterministic_across_runs_and_workers() {
    let args = |jobs: &'static str| ["--json", "props", "--seed", "7", "--cases", "25", "--jobs", jobs];
    let a = mlf(&args("1"));
    let b = mlf(&args("1"));
    let c = mlf(&args("4"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(json(&a)["seed"], 7);
}

#[test]
fn props_replays_a_case() {
    let o = mlf(&["--json", "props", "--replay", "fv-beta", "3"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["case"], 3);
    assert!(doc["inputs"]["M1"].is_string());
    let o = mlf(&["props", "--replay", "no-such-lemma", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn every_command_emits_one_json_document() {
    let runs: Vec<Vec<String>> = vec![
        vec!["arity".into(), corpus("z.ctx"), "-e".into(), "z z".into()],
        vec!["check".into(), corpus("remark-typed.ctx"), corpus("f-b.term")],
        vec!["normalize".into(), "-e".into(), "(\\x".into()],
        vec!["sn".into(), "--fuel".into(), "3".into(), corpus("omega-omega.term")],
        vec!["translate".into(), "-e".into(), "Type".into()],
    ];
    for args in runs {
        let mut full = vec!["--json"];
        full.extend(args.iter().map(String::as_str));
        let o = mlf(&full);
        let doc = json(&o);
        assert!(doc["command"].is_string(), "{doc}");
        assert!(o.stderr.is_empty(), "{}", stderr(&o));
    }
}
