//! The shipped `fixtures/` directory matches the built-in fixtures. Set
//! `SATT_BLESS=1` to rewrite the files.

use std::fs;
use std::path::PathBuf;

use sat_transys::cnf::{Formula, HasVars};
use sat_transys::orderings::CheckMode;
use sat_transys::rules::SolverConfig;
use sat_transys::trace::{cycle_formula, example_formula, fixtures, verify_trace, TraceFile};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn cnf(f: &Formula) -> String {
    let nvars = f.vars().iter().next_back().copied().unwrap_or(0);
    let mut out = format!("p cnf {nvars} {}\n", f.len());
    for c in f.iter() {
        for l in c.iter() {
            out.push_str(&format!("{} ", l.to_dimacs()));
        }
        out.push_str("0\n");
    }
    out
}

fn expected() -> Vec<(String, String)> {
    let mut files = vec![
        ("example.cnf".to_string(), cnf(&example_formula())),
        ("cycle.cnf".to_string(), cnf(&cycle_formula())),
        ("contradiction.cnf".to_string(), cnf(&Formula::from_dimacs(&[&[1], &[-1]]).unwrap())),
    ];
    for f in fixtures() {
        files.push((format!("{}.satt", f.name), f.trace.to_string()));
    }
    files
}

#[test]
fn shipped_files_match_the_fixtures() {
    let bless = std::env::var_os("SATT_BLESS").is_some();
    if bless {
        fs::create_dir_all(dir()).unwrap();
    }
    for (name, text) in expected() {
        let path = dir().join(&name);
        if bless {
            fs::write(&path, &text).unwrap();
        }
        let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, text, "{name} is out of date");
    }
}

#[test]
fn shipped_traces_parse_and_verify() {
    for f in fixtures() {
        let text = fs::read_to_string(dir().join(format!("{}.satt", f.name))).unwrap();
        let trace = TraceFile::parse(&text).unwrap();
        let v = verify_trace(&f.f0, &SolverConfig::default(), &trace, CheckMode::Cheap).unwrap();
        assert_eq!(v.is_ok(), f.name != "restart-cycle", "{}", f.name);
    }
}
