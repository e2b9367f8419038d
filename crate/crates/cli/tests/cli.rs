use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kohn_core::{audit_trace, Trace};
use tempfile::TempDir;

fn kohn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kohn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn problem(dir: &Path, name: &str, vars: &[&str], gens: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let body = serde_json::json!({ "variables": vars, "generators": gens });
    std::fs::write(&path, body.to_string()).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn type_reports_the_bracket() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^3", "w^4"]);
    let o = kohn(&["type", arg(&p)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "p* = 6; p in [3/2, 6]");

    let p = problem(dir.path(), "q.json", &["z", "w"], &["z", "w"]);
    let o = kohn(&["type", arg(&p)]);
    assert_eq!(stdout(&o).trim(), "p* = 1; p in [1/4, 1]");
}

#[test]
fn infinite_type_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^2"]);
    assert_eq!(code(&kohn(&["type", arg(&p)])), 3);
    assert_eq!(code(&kohn(&["run", arg(&p)])), 3);
}

#[test]
fn small_type_cap_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^5", "w^5"]);
    assert_eq!(code(&kohn(&["type", arg(&p), "--type-cap", "4"])), 3);
}

#[test]
fn bad_problems_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "a.json", &["z", "w"], &["z + 1", "w"]);
    assert_eq!(code(&kohn(&["run", arg(&p)])), 2);
    let p = problem(dir.path(), "b.json", &["z", "w"], &["z +* w"]);
    assert_eq!(code(&kohn(&["type", arg(&p)])), 2);
    let p = problem(dir.path(), "c.json", &["z", "w"], &["x^2"]);
    assert_eq!(code(&kohn(&["type", arg(&p)])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&kohn(&["type", arg(&missing)])), 2);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&kohn(&["run", arg(&junk)])), 2);
}

#[test]
fn usage_errors_exit_with_five() {
    assert_eq!(code(&kohn(&["frobnicate"])), 5);
    assert_eq!(code(&kohn(&["run"])), 5);
    assert_eq!(code(&kohn(&["type", "x.json", "--seed", "minus one"])), 5);
    assert_eq!(code(&kohn(&["--help"])), 0);
}

#[test]
fn compare_classic_rejects_three_variables() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["x", "y", "z"], &["x", "y", "z"]);
    assert_eq!(code(&kohn(&["compare-classic", arg(&p)])), 5);
}

#[test]
fn trivial_run_has_two_steps() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z", "w"]);
    let t = dir.path().join("t.jsonl");
    let o = kohn(&["run", arg(&p), "--trace", arg(&t)]);
    assert_eq!(code(&o), 0);
    let trace = Trace::from_jsonl(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(trace.steps.len(), 2);
    assert!(trace.steps.last().unwrap().output.is_one());
}

#[test]
fn written_traces_audit_clean() {
    let dir = TempDir::new().unwrap();
    let cases: [(&[&str], &[&str]); 3] = [
        (&["z", "w"], &["z^2", "w^3 + w*z^5"]),
        (&["z", "w"], &["z^3 + z*w", "z^4 + 2*w^2"]),
        (&["x", "y", "z"], &["x^2", "y^2", "z^2"]),
    ];
    for (i, (vars, gens)) in cases.iter().enumerate() {
        let p = problem(dir.path(), &format!("p{i}.json"), vars, gens);
        let t = dir.path().join(format!("t{i}.jsonl"));
        let o = kohn(&["run", arg(&p), "--trace", arg(&t)]);
        assert_eq!(code(&o), 0, "{gens:?}");
        let trace = Trace::from_jsonl(&std::fs::read_to_string(&t).unwrap()).unwrap();
        assert!(trace.is_terminated());
        let report = audit_trace(&trace);
        assert!(report.is_clean(), "{gens:?}: {report}");
        assert_eq!(code(&kohn(&["audit", arg(&t)])), 0);
    }
}

#[test]
fn tampered_trace_fails_the_audit() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^2", "w^3 + w*z^5"]);
    let t = dir.path().join("t.jsonl");
    assert_eq!(code(&kohn(&["run", arg(&p), "--trace", arg(&t)])), 0);
    let text = std::fs::read_to_string(&t).unwrap();
    let bad = text.replacen("\"epsilon\":\"1/24\"", "\"epsilon\":\"1/12\"", 1);
    assert_ne!(text, bad);
    std::fs::write(&t, bad).unwrap();
    assert_eq!(code(&kohn(&["audit", arg(&t)])), 1);
}

#[test]
fn summary_does_not_depend_on_k() {
    let dir = TempDir::new().unwrap();
    let summary = |k: u32| {
        let f2 = format!("w^3 + w*z^{k}");
        let p = problem(dir.path(), &format!("k{k}.json"), &["z", "w"], &["z^2", &f2]);
        let o = kohn(&["run", arg(&p)]);
        assert_eq!(code(&o), 0);
        stdout(&o).lines().last().unwrap().to_string()
    };
    let s5 = summary(5);
    assert_eq!(s5, "terminated after 10 steps; final ε = 1/192; p* = 4");
    assert_eq!(summary(50), s5);
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^3 + z*w", "z^4 + 2*w^2"]);
    let a = kohn(&["run", arg(&p), "--seed", "7", "--format", "json"]);
    let b = kohn(&["run", arg(&p), "--seed", "7", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    assert_eq!(v["status"], "terminated");
}

#[test]
fn exhausted_budget_exits_with_four_and_keeps_the_trace() {
    let dir = TempDir::new().unwrap();
    // Needs the induction: the direct route stalls on this pair.
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^3 + z*w", "z^4 + 2*w^2"]);
    let t = dir.path().join("t.jsonl");
    let o = kohn(&["run", arg(&p), "--max-retries", "0", "--trace", arg(&t)]);
    assert_eq!(code(&o), 4);
    let trace = Trace::from_jsonl(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert!(!trace.is_terminated());
    assert!(!trace.steps.is_empty());
    assert!(audit_trace(&trace).is_clean());
}

#[test]
fn jacobian_bound_checks() {
    let o = kohn(&["check-jacobian-bound", "--map", "z^2", "--map", "w^3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("λ = 6, ord Jac = 3, pass"));
    let o = kohn(&["check-jacobian-bound", "--map", "z", "--map", "w"]);
    assert!(stdout(&o).contains("λ = 1, ord Jac = 0, pass"));
    let o = kohn(&["check-jacobian-bound", "--trials", "100", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("100 checked, 0 failed, 0 skipped"));
    let o = kohn(&["check-jacobian-bound", "--map", "z^2", "--map", "z*w"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("skipped"));
}

#[test]
fn classic_comparison_reports_both_sides() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^2", "w^3 + w*z^5"]);
    let o = kohn(&["compare-classic", arg(&p)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("classic: least k with z^k in J1 is 7"), "{out}");
    assert!(out.contains("final ε = 1/192"), "{out}");
}

#[test]
fn oracle_commands() {
    let dir = TempDir::new().unwrap();
    let p = problem(dir.path(), "p.json", &["z", "w"], &["z^3", "w^4"]);
    assert_eq!(stdout(&kohn(&["oracle", "colength", arg(&p)])).trim(), "12");
    assert_eq!(stdout(&kohn(&["oracle", "type", arg(&p)])).trim(), "6");
    assert_eq!(stdout(&kohn(&["oracle", "member", arg(&p), "z^2*w^3"])).trim(), "false");
    assert_eq!(stdout(&kohn(&["oracle", "member", arg(&p), "z^4 - w^5"])).trim(), "true");
}
