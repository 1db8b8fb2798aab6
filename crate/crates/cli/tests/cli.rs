use std::fs;
use std::path::PathBuf;
use std::process::Command;

use sat_transys::cnf::{Formula, Valuation};
use sat_transys::oracle::is_model;
use sat_transys_cli::dimacs::{parse_dimacs, write_dimacs};
use sat_transys_cli::{run, EXIT_BUDGET, EXIT_FAILURE, EXIT_OK, EXIT_SAT, EXIT_UNSAT};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn sh(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["satts"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn model(stdout: &str) -> Valuation {
    let line = stdout.lines().find(|l| l.starts_with("v ")).expect("a v line");
    let lits: Vec<i32> = line[2..].split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(lits.last(), Some(&0));
    Valuation::from_dimacs(&lits[..lits.len() - 1]).unwrap()
}

fn formula(path: &str) -> Formula {
    parse_dimacs(&fs::read_to_string(path).unwrap(), false).unwrap().formula
}

#[test]
fn solve_reports_a_checkable_model() {
    let file = fixture("example.cnf");
    for system in ["dpll", "backjump", "learn", "cdcl", "full"] {
        let (code, out, _) = sh(&["solve", &file, "--system", system]);
        assert_eq!(code, EXIT_SAT, "{system}");
        assert!(out.contains("s SATISFIABLE"));
        let m = model(&out);
        assert_eq!(m.len(), 7);
        assert!(is_model(&m, &formula(&file)));
    }
}

#[test]
fn solve_reports_unsat() {
    let (code, out, _) = sh(&["solve", &fixture("contradiction.cnf")]);
    assert_eq!(code, EXIT_UNSAT);
    assert!(out.lines().any(|l| l == "s UNSATISFIABLE"));
    assert!(!out.contains("\nv "));
}

#[test]
fn policies_and_seeds_are_accepted() {
    let file = fixture("cycle.cnf");
    let (code, out, _) = sh(&[
        "solve", &file, "--system", "full", "--restarts", "luby:1", "--forget", "size:1:0",
        "--decide", "random", "--seed", "7",
    ]);
    assert_eq!(code, EXIT_SAT);
    assert!(is_model(&model(&out), &formula(&file)));
    let (code, _, err) = sh(&["solve", &file, "--system", "cdcl", "--restarts", "every-conflict"]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(err.contains("need system full"), "{err}");
    let (code, _, _) = sh(&["solve", &file, "--restarts", "sometimes"]);
    assert_eq!(code, EXIT_FAILURE);
}

#[test]
fn budget_exhaustion_has_its_own_code() {
    let (code, out, _) = sh(&["solve", &fixture("example.cnf"), "--step-budget", "2"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(out.contains("s UNKNOWN"));
}

#[test]
fn shipped_traces_verify() {
    let example = fixture("example.cnf");
    for t in ["dpll-example", "backjump-example", "learn-example", "cdcl-example"] {
        let (code, out, _) = sh(&["verify", &example, "--trace", &fixture(&format!("{t}.satt"))]);
        assert_eq!(code, EXIT_OK, "{t}: {out}");
        assert!(out.contains("OK"));
    }
    let (code, out, _) =
        sh(&["verify", &fixture("cycle.cnf"), "--trace", &fixture("restart-cycle.satt")]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.contains("step 17"), "{out}");
}

#[test]
fn verify_rejects_a_mutated_trace_and_the_wrong_formula() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("dpll-example.satt")).unwrap();
    let bad = dir.path().join("bad.satt");
    fs::write(&bad, text.replacen(r#""lit":2}"#, r#""lit":-2}"#, 1)).unwrap();
    let example = fixture("example.cnf");
    let (code, out, _) = sh(&["verify", &example, "--trace", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.contains("isUnit"), "{out}");

    let (code, out, _) =
        sh(&["verify", &fixture("cycle.cnf"), "--trace", &fixture("dpll-example.satt")]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.contains("different formula"), "{out}");

    let truncated = dir.path().join("truncated.satt");
    fs::write(&truncated, &text[..text.len() - 5]).unwrap();
    let (code, out, _) = sh(&["verify", &example, "--trace", truncated.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.contains("line 26"), "{out}");
}

#[test]
fn solver_traces_verify_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let example = fixture("example.cnf");
    let mut traces = Vec::new();
    for (i, system) in ["dpll", "backjump", "learn", "cdcl", "full"].iter().enumerate() {
        let path = dir.path().join(format!("{i}.satt"));
        let p = path.to_str().unwrap().to_string();
        let (code, _, _) = sh(&["solve", &example, "--system", system, "--trace", &p]);
        assert_eq!(code, EXIT_SAT);
        let (code, out, _) = sh(&["verify", &example, "--trace", &p]);
        assert_eq!(code, EXIT_OK, "{system}: {out}");
        assert!(out.contains("Accepting"));
        traces.push(p);
    }
    let mut args = vec!["check", example.as_str(), "--oracle"];
    for t in &traces {
        args.push("--trace");
        args.push(t);
    }
    let (code, out, _) = sh(&args);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.contains(": OK")).count(), 5);
}

#[test]
fn oracle_command() {
    let (code, out, _) = sh(&["oracle", &fixture("example.cnf")]);
    assert_eq!(code, EXIT_SAT);
    assert!(is_model(&model(&out), &formula(&fixture("example.cnf"))));
    assert_eq!(sh(&["oracle", &fixture("contradiction.cnf")]).0, EXIT_UNSAT);
    let (code, out, _) = sh(&["oracle", &fixture("example.cnf"), "--oracle-budget", "3"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(out.contains("s UNKNOWN"));
}

#[test]
fn declared_variables_are_assigned() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nine.cnf");
    fs::write(&path, "p cnf 9 1\n1 0\n").unwrap();
    let (code, out, _) = sh(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_SAT);
    assert_eq!(model(&out).len(), 9);
}

#[test]
fn header_mismatches_warn_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loose.cnf");
    fs::write(&path, "p cnf 1 3\n1 2 0\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, _, err) = sh(&["solve", p]);
    assert_eq!(code, EXIT_SAT);
    assert!(err.contains("warning"));
    let (code, _, err) = sh(&["solve", p, "--strict"]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(err.contains("exceeds the declared"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(sh(&[]).0, EXIT_FAILURE);
    assert_eq!(sh(&["solve"]).0, EXIT_FAILURE);
    assert_eq!(sh(&["solve", "/no/such/file.cnf"]).0, EXIT_FAILURE);
    assert_eq!(sh(&["--help"]).0, EXIT_OK);
}

#[test]
fn dimacs_round_trip() {
    let text = "p cnf 4 4\n1 -2 0\n1 1 0\n-3 3 4 0\n0\n";
    let p = parse_dimacs(text, true).unwrap();
    assert_eq!(write_dimacs(&p), text);
    assert_eq!(parse_dimacs(&write_dimacs(&p), true).unwrap(), p);
}

#[test]
fn the_binary_uses_competition_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_satts");
    let out = Command::new(bin).args(["solve", &fixture("example.cnf")]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_SAT));
    assert!(String::from_utf8_lossy(&out.stdout).contains("s SATISFIABLE"));
    let out = Command::new(bin).args(["solve", &fixture("contradiction.cnf")]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_UNSAT));
}
