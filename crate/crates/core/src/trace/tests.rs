use proptest::prelude::*;

use super::*;
use crate::rules::Guard;

fn lit(v: i32) -> Literal {
    Literal::from_dimacs(v).unwrap()
}

#[test]
fn records_match_the_schema() {
    assert_eq!(
        emit(&RuleInstance::unit_propagate(&[-1, 2], 2)),
        r#"{"rule":"unitPropagate","clause":[-1,2],"lit":2}"#
    );
    assert_eq!(emit(&RuleInstance::Restart), r#"{"rule":"restart"}"#);
    assert_eq!(
        emit(&RuleInstance::forget(&[&[-1, -2]])),
        r#"{"rule":"forget","forgotten":[[-1,-2]]}"#
    );
    assert_eq!(
        emit(&RuleInstance::backjump_learn(-2, 1)),
        r#"{"rule":"backjumpLearn","lit":-2,"level":1}"#
    );
}

#[test]
fn malformed_records_are_rejected() {
    for bad in [
        r#"{"rule":"decide"}"#,
        r#"{"rule":"decide","lit":0}"#,
        r#"{"rule":"decide","lit":1,"level":2}"#,
        r#"{"rule":"jump","lit":1}"#,
        r#"{"rule":"conflict","clause":[1,"#,
        r#"{"rule":"restart","extra":1}"#,
    ] {
        assert!(parse_step(bad).is_err(), "{bad}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let f = fixture("cdcl-example").unwrap();
    let mut text = f.trace.to_string();
    text.push_str("{\"rule\":\"decide\",\"lit\"\n");
    match TraceFile::parse(&text) {
        Err(TraceError::Parse { line, .. }) => assert_eq!(line, f.trace.steps.len() + 2),
        other => panic!("{other:?}"),
    }
    assert_eq!(TraceFile::parse(""), Err(TraceError::MissingHeader));
}

#[test]
fn digest_is_over_the_clause_lines() {
    let f = Formula::from_dimacs(&[&[1, -2], &[]]).unwrap();
    // sha256 of "1 -2 0\n0\n"
    assert_eq!(f0_digest(&f), "a98a6b3d3828824a7388f52c45d4ddbef8e8cff72e387c7b7a1c5cbd84be37e5");
    assert_ne!(f0_digest(&f), f0_digest(&Formula::from_dimacs(&[&[], &[1, -2]]).unwrap()));
}

#[test]
fn the_worked_examples_verify() {
    for f in fixtures().into_iter().filter(|f| f.name != "restart-cycle") {
        for mode in [CheckMode::Cheap, CheckMode::Oracle] {
            let v = verify_trace(&f.f0, &SolverConfig::default(), &f.trace, mode).unwrap();
            assert!(v.is_ok(), "{}: {:?}", f.name, v.result);
            assert_eq!(v.state.trail(), &f.final_trail, "{}", f.name);
        }
    }
    let counts: Vec<usize> = fixtures().iter().map(|f| f.trace.steps.len()).collect();
    assert_eq!(counts, [25, 20, 17, 12, 27]);
}

#[test]
fn final_classifications() {
    let outcome = |name| {
        let f = fixture(name).unwrap();
        verify_trace(&f.f0, &SolverConfig::default(), &f.trace, CheckMode::Cheap).unwrap().outcome
    };
    assert_eq!(outcome("dpll-example"), Outcome::Accepting);
    assert_eq!(outcome("learn-example"), Outcome::Accepting);
    assert_eq!(outcome("cdcl-example"), Outcome::Intermediate);
}

#[test]
fn the_cycle_derivation_stops_at_the_forget_row() {
    let f = fixture("restart-cycle").unwrap();
    let v = verify_trace(&f.f0, &SolverConfig::default(), &f.trace, CheckMode::Cheap).unwrap();
    let failure = v.result.unwrap_err();
    assert_eq!(failure.index, 17);
    match failure.reason {
        CertifyError::Rule(e) => assert_eq!(e.guard(), Some(Guard::NotAReason)),
        other => panic!("{other}"),
    }
}

#[test]
fn a_flipped_polarity_fails_the_unit_guard() {
    let mut f = fixture("dpll-example").unwrap();
    f.trace.steps[1] = RuleInstance::UnitPropagate {
        clause: Clause::from_dimacs(&[-1, 2]).unwrap(),
        lit: lit(-2),
    };
    let v = verify_trace(&f.f0, &SolverConfig::default(), &f.trace, CheckMode::Cheap).unwrap();
    let failure = v.result.unwrap_err();
    assert_eq!(failure.index, 1);
    assert!(failure.reason.to_string().contains("isUnit"), "{}", failure.reason);
}

#[test]
fn headers_guard_against_the_wrong_formula() {
    let f = fixture("dpll-example").unwrap();
    let other = Formula::from_dimacs(&[&[1]]).unwrap();
    assert!(matches!(
        verify_trace(&other, &SolverConfig::default(), &f.trace, CheckMode::Cheap),
        Err(TraceError::DigestMismatch { .. })
    ));
    let config = SolverConfig::with_dec_vars([1, 2].into_iter().collect());
    assert!(matches!(
        verify_trace(&f.f0, &config, &f.trace, CheckMode::Cheap),
        Err(TraceError::DecVarsMismatch { .. })
    ));
}

#[test]
fn files_round_trip() {
    for f in fixtures() {
        let text = f.trace.to_string();
        assert_eq!(TraceFile::parse(&text).unwrap(), f.trace);
        let mut buf = Vec::new();
        f.trace.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }
}

fn arb_lit() -> impl Strategy<Value = Literal> {
    (1u32..50, any::<bool>()).prop_map(|(v, s)| Literal::new(v, s))
}

fn arb_clause() -> impl Strategy<Value = Clause> {
    proptest::collection::vec(arb_lit(), 0..5).prop_map(Clause::new)
}

fn arb_rule() -> impl Strategy<Value = RuleInstance> {
    prop_oneof![
        arb_lit().prop_map(|lit| RuleInstance::Decide { lit }),
        (arb_clause(), arb_lit()).prop_map(|(clause, lit)| RuleInstance::UnitPropagate { clause, lit }),
        Just(RuleInstance::Backtrack),
        (proptest::option::of(arb_clause()), arb_lit(), 0usize..9)
            .prop_map(|(clause, lit, level)| RuleInstance::Backjump { clause, lit, level }),
        proptest::option::of(arb_clause()).prop_map(|clause| RuleInstance::Learn { clause }),
        proptest::collection::vec(arb_clause(), 0..4).prop_map(|clauses| RuleInstance::Forget { clauses }),
        arb_clause().prop_map(|clause| RuleInstance::Conflict { clause }),
        (arb_lit(), arb_clause()).prop_map(|(lit, clause)| RuleInstance::Explain { lit, clause }),
        (proptest::option::of(arb_clause()), arb_lit(), 0usize..9)
            .prop_map(|(clause, lit, level)| RuleInstance::BackjumpLearn { clause, lit, level }),
        Just(RuleInstance::Restart),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn emit_parse_round_trip(r in arb_rule()) {
        let line = emit(&r);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(parse_step(&line).unwrap(), r);
    }
}
