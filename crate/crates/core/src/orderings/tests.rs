use proptest::prelude::*;

use super::*;
use crate::rules::SolverConfig;

fn cl(v: &[i32]) -> Clause {
    Clause::from_dimacs(v).unwrap()
}

fn trail(lits: &[i32], decisions: &[i32]) -> Trail {
    Trail::from_dimacs(lits, decisions).unwrap()
}

fn entry(v: i32, decision: bool) -> TrailEntry {
    let l = Literal::from_dimacs(v).unwrap();
    if decision {
        TrailEntry::decision(l)
    } else {
        TrailEntry::implied(l)
    }
}

fn f0() -> Formula {
    Formula::from_dimacs(&[
        &[-1, 2],
        &[-1, -3, 5, 7],
        &[-1, -2, 5, -7],
        &[-2, 3],
        &[2, 4],
        &[-2, -5, 7],
        &[-3, -6, -7],
        &[-5, 6],
    ])
    .unwrap()
}

fn vars(n: u32) -> VarSet {
    (1..=n).collect()
}

#[test]
fn literal_order() {
    assert!(succ_lit(&entry(5, true), &entry(6, false)));
    assert!(!succ_lit(&entry(6, false), &entry(5, true)));
    assert!(!succ_lit(&entry(5, true), &entry(4, true)));
}

#[test]
fn trail_order() {
    assert!(succ_tr(&Trail::new(), &trail(&[1], &[1])));
    let old = trail(&[1, 2, 3, 4, 5, 6, 7], &[1, 4, 5]);
    let new = trail(&[1, 2, 3, 4, -5], &[1, 4]);
    assert!(succ_tr(&old, &new));
    assert!(!succ_tr(&new, &old));
    assert!(!succ_tr(&old, &old));
    assert!(succ_tr_restricted(&old, &new, &vars(7)));
    assert!(!succ_tr_restricted(&old, &new, &vars(6)));
    let dup = trail(&[1, 1], &[1]);
    assert!(succ_tr(&Trail::new(), &dup));
    assert!(!succ_tr_restricted(&Trail::new(), &dup, &vars(7)));
}

#[test]
fn multiset_examples() {
    assert!(multiset_greater(&[3], &[1, 1, 2]));
    assert!(!multiset_greater(&[1, 2], &[1, 2]));
    assert!(multiset_greater(&[5, 1], &[4, 4, 4, 1]));
    assert!(!multiset_greater(&[1, 1, 2], &[3]));
    assert!(multiset_greater(&[1], &[]));
    assert!(!multiset_greater::<u8>(&[], &[]));
}

#[test]
fn conflict_clause_order() {
    let m = trail(&[1, 2, 3, 4, 5, 6, 7], &[1, 4, 5]);
    assert!(succ_c(&cl(&[-3, -6, -7]), &cl(&[-2, -3, -5, -6]), &m).unwrap());
    assert!(succ_c(&cl(&[-2, -3, -5, -6]), &cl(&[-2, -3, -5]), &m).unwrap());
    assert!(!succ_c(&cl(&[-2, -3, -5]), &cl(&[-2, -3, -5]), &m).unwrap());
    assert!(!succ_c(&cl(&[-2, -3, -5]), &cl(&[-5, -3, -2, -2]), &m).unwrap());
    assert!(succ_c(&cl(&[-8]), &cl(&[-1]), &m).is_err());
}

#[test]
fn formula_orders() {
    let c = cl(&[-2, -3, -5]);
    assert!(succ_f(&f0(), &f0().with(c.clone()), &c));
    assert!(!succ_f(&f0(), &f0(), &c));
    assert!(formula_inclusion_greater(&f0(), &f0().with(c.clone()), &vars(7)));
    assert!(!formula_inclusion_greater(&f0(), &f0().with(cl(&[6, -5])), &vars(7)));
    assert!(!formula_inclusion_greater(&f0(), &f0().with(cl(&[8])), &vars(7)));
}

fn apply_all(ctx: &mut Context, steps: &[RuleInstance], mode: CheckMode) -> Vec<StepReport> {
    let mut s = State::initial(ctx);
    let mut out = Vec::new();
    for r in steps {
        let snap = Snapshot::of(&s);
        s.apply(ctx, r).unwrap();
        out.push(check_step(ctx, &snap, r, &s, mode).unwrap_or_else(|e| panic!("{r}: {e}")));
    }
    out
}

#[test]
fn cdcl_steps_decrease_the_expected_slots() {
    let steps = [
        RuleInstance::decide(1),
        RuleInstance::unit_propagate(&[-1, 2], 2),
        RuleInstance::unit_propagate(&[-2, 3], 3),
        RuleInstance::decide(4),
        RuleInstance::decide(5),
        RuleInstance::unit_propagate(&[-5, 6], 6),
        RuleInstance::unit_propagate(&[-2, -5, 7], 7),
        RuleInstance::conflict(&[-3, -6, -7]),
        RuleInstance::explain(-7, &[-2, -5, 7]),
        RuleInstance::explain(-6, &[-5, 6]),
        RuleInstance::learn(&[-2, -3, -5]),
        RuleInstance::backjump(&[-2, -3, -5], -5, 1),
    ];
    for mode in [CheckMode::Cheap, CheckMode::Oracle] {
        let mut ctx = Context::new(System::Cdcl, f0(), &SolverConfig::default());
        let slots: Vec<Slot> =
            apply_all(&mut ctx, &steps, mode).iter().map(|r| r.measure.slot().unwrap()).collect();
        use Slot::*;
        assert_eq!(
            slots,
            [Trail, Trail, Trail, Trail, Trail, Trail, Trail, Conflict, Clause, Clause, Formula, Trail]
        );
    }
}

#[test]
fn wrong_results_are_mismatches() {
    let mut ctx = Context::new(System::Dpll, f0(), &SolverConfig::default());
    let s = State::initial(&ctx);
    let wrong = State::from_parts(&ctx, trail(&[-1], &[-1]), f0(), Clause::empty(), false, false);
    let err = certify_step(&mut ctx, &s, &RuleInstance::decide(1), &wrong, CheckMode::Cheap)
        .unwrap_err();
    assert_eq!(err, CertifyError::Mismatch { field: "M" });
    let right = State::from_parts(&ctx, trail(&[1], &[1]), f0(), Clause::empty(), false, false);
    let report =
        certify_step(&mut ctx, &s, &RuleInstance::decide(1), &right, CheckMode::Oracle).unwrap();
    assert_eq!(report.measure.slot(), Some(Slot::Trail));
}

#[test]
fn broken_states_violate_named_invariants() {
    let ctx = Context::new(System::Cdcl, f0(), &SolverConfig::default());
    let implied_out_of_thin_air =
        State::from_parts(&ctx, trail(&[4], &[]), f0(), Clause::empty(), false, false);
    let err = check_invariants_exact(&ctx, &implied_out_of_thin_air).unwrap_err();
    assert!(matches!(err, CertifyError::Invariant { invariant: Invariant::ImpliedLits, .. }));
    let weaker = State::from_parts(
        &ctx,
        Trail::new(),
        Formula::new(f0().clauses()[1..].to_vec()),
        Clause::empty(),
        false,
        false,
    );
    let err = check_invariants_exact(&ctx, &weaker).unwrap_err();
    assert!(matches!(err, CertifyError::Invariant { invariant: Invariant::Equiv, .. }));
    let not_false = State::from_parts(&ctx, trail(&[1], &[1]), f0(), cl(&[-2]), true, false);
    let err = check_invariants_exact(&ctx, &not_false).unwrap_err();
    assert!(matches!(err, CertifyError::Invariant { invariant: Invariant::CFalse, .. }));
    let unjustified = State::from_parts(&ctx, trail(&[2], &[2]), f0(), cl(&[-2]), true, false);
    let err = check_invariants_exact(&ctx, &unjustified).unwrap_err();
    assert!(matches!(err, CertifyError::Invariant { invariant: Invariant::CEntailed, .. }));
    let m = trail(&[1, 2, 3, 4, 5, 6, 7], &[1, 4, 5]);
    let fine = State::from_parts(&ctx, m, f0(), cl(&[-3, -6, -7]), true, false);
    assert_eq!(check_invariants_exact(&ctx, &fine), Ok(()));
}

#[test]
fn full_system_has_no_measure() {
    let f = Formula::from_dimacs(&[&[1, 2]]).unwrap();
    let mut ctx = Context::new(System::Full, f, &SolverConfig::default());
    let reports = apply_all(&mut ctx, &[RuleInstance::decide(1)], CheckMode::Oracle);
    assert_eq!(reports[0].measure, MeasureVerdict::NotWellFounded);
}

// ---- properties ----

fn arb_trail(nvars: i32, max_len: usize) -> impl Strategy<Value = Trail> {
    prop::collection::vec((1..=nvars, any::<bool>(), any::<bool>()), 0..max_len)
        .prop_map(|v| Trail::from_entries(v.into_iter().map(|(x, s, d)| entry(if s { x } else { -x }, d))))
}

/// All distinct, consistent trails over variables 1 and 2.
fn small_trails() -> Vec<Trail> {
    let lits = [1, -1, 2, -2];
    let mut out = vec![Trail::new()];
    let mut frontier = vec![Trail::new()];
    while let Some(t) = frontier.pop() {
        for &l in &lits {
            let lit = Literal::from_dimacs(l).unwrap();
            if !t.is_undefined(lit) {
                continue;
            }
            for d in [false, true] {
                let mut u = t.clone();
                u.push(if d { TrailEntry::decision(lit) } else { TrailEntry::implied(lit) });
                out.push(u.clone());
                frontier.push(u);
            }
        }
    }
    out
}

#[test]
fn restricted_trail_order_is_acyclic_on_two_variables() {
    let ts = small_trails();
    let n = ts.len();
    let vbl = vars(2);
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| succ_tr_restricted(&ts[i], &ts[j], &vbl)).collect())
        .collect();
    // Kahn's algorithm: every node gets removed iff there is no cycle
    let mut indeg = vec![0; n];
    for js in &adj {
        for &j in js {
            indeg[j] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop() {
        seen += 1;
        for &j in &adj[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push(j);
            }
        }
    }
    assert_eq!(seen, n);
}

/// Transitive closure of the one-step multiset reduction: replace one element
/// by any number of smaller elements.
fn multiset_closure(universe: &[Vec<u8>]) -> HashSet<(Vec<u8>, Vec<u8>)> {
    let index: std::collections::HashMap<&Vec<u8>, usize> =
        universe.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = universe.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, m) in universe.iter().enumerate() {
        for k in 0..m.len() {
            let x = m[k];
            let mut rest = m.clone();
            rest.remove(k);
            for other in universe {
                // other = rest + smaller elements
                let mut extra = other.clone();
                let mut ok = true;
                for r in &rest {
                    if let Some(p) = extra.iter().position(|e| e == r) {
                        extra.remove(p);
                    } else {
                        ok = false;
                        break;
                    }
                }
                if ok && extra.iter().all(|&e| e < x) {
                    reach[i][index[other]] = true;
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    let mut out = HashSet::new();
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                out.insert((universe[i].clone(), universe[j].clone()));
            }
        }
    }
    out
}

/// Sorted multisets over {0,1,2} of size at most `k`.
fn small_multisets(k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &out {
            let lo = m.last().copied().unwrap_or(0);
            for x in lo..3 {
                let mut n = m.clone();
                n.push(x);
                next.push(n);
            }
        }
        out.extend(next.into_iter().filter(|m: &Vec<u8>| m.len() <= k));
        out.sort();
        out.dedup();
    }
    out
}

#[test]
fn multiset_order_matches_its_transitive_closure() {
    let universe = small_multisets(4);
    let closure = multiset_closure(&universe);
    for a in &universe {
        for b in &universe {
            assert_eq!(
                multiset_greater(a, b),
                closure.contains(&(a.clone(), b.clone())),
                "{a:?} vs {b:?}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn trail_order_is_irreflexive_and_transitive(
        a in arb_trail(4, 6), b in arb_trail(4, 6), c in arb_trail(4, 6)
    ) {
        prop_assert!(!succ_tr(&a, &a));
        if succ_tr(&a, &b) && succ_tr(&b, &c) {
            prop_assert!(succ_tr(&a, &c));
        }
        prop_assert!(!(succ_tr(&a, &b) && succ_tr(&b, &a)));
    }

    #[test]
    fn trail_order_is_a_prefix_congruence(
        m in arb_trail(4, 5), a in arb_trail(4, 5), b in arb_trail(4, 5)
    ) {
        if succ_tr(&a, &b) {
            let join = |x: &Trail| Trail::from_entries(m.entries().iter().chain(x.entries()).copied());
            prop_assert!(succ_tr(&join(&a), &join(&b)));
        }
    }

    #[test]
    fn backjumping_decreases_the_trail(m in arb_trail(6, 8), v in 1..=6i32, level in 0usize..4) {
        if level < m.current_level() {
            let mut p = m.prefix_to_level(level);
            p.push(entry(v, false));
            prop_assert!(succ_tr(&m, &p));
        }
    }

    #[test]
    fn multiset_order_is_a_strict_order(
        a in prop::collection::vec(0u8..5, 0..5),
        b in prop::collection::vec(0u8..5, 0..5),
        c in prop::collection::vec(0u8..5, 0..5),
    ) {
        prop_assert!(!multiset_greater(&a, &a));
        prop_assert!(!(multiset_greater(&a, &b) && multiset_greater(&b, &a)));
        if multiset_greater(&a, &b) && multiset_greater(&b, &c) {
            prop_assert!(multiset_greater(&a, &c));
        }
    }
}
