use crate::cnf::{Formula, HasVars};
use crate::rules::{RuleInstance as R, System};
use crate::trail::Trail;

use super::{Header, TraceFile};

/// A worked example: the formula, its trace and the trail the trace ends in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub f0: Formula,
    pub trace: TraceFile,
    pub final_trail: Trail,
}

/// The formula shared by the DPLL, backjumping, learning and conflict
/// analysis examples.
pub fn example_formula() -> Formula {
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
    .expect("valid literals")
}

/// Two independent copies of `[-a,-b,c], [-a,-b,d], [-a,-c,-d]`.
pub fn cycle_formula() -> Formula {
    Formula::from_dimacs(&[
        &[-1, -2, 3],
        &[-1, -2, 4],
        &[-1, -3, -4],
        &[-5, -6, 7],
        &[-5, -6, 8],
        &[-5, -7, -8],
    ])
    .expect("valid literals")
}

fn build(name: &'static str, system: System, f0: Formula, steps: Vec<R>, m: (&[i32], &[i32])) -> Fixture {
    let header = Header::new(system, f0.vars(), &f0);
    Fixture {
        name,
        trace: TraceFile { header, steps },
        f0,
        final_trail: Trail::from_dimacs(m.0, m.1).expect("valid literals"),
    }
}

/// The first eight rows shared by the examples: decide +1, two
/// propagations, decide +4 and +5, two more propagations.
fn opening() -> Vec<R> {
    vec![
        R::decide(1),
        R::unit_propagate(&[-1, 2], 2),
        R::unit_propagate(&[-2, 3], 3),
        R::decide(4),
        R::decide(5),
        R::unit_propagate(&[-5, 6], 6),
        R::unit_propagate(&[-2, -5, 7], 7),
    ]
}

fn dpll_example() -> Fixture {
    let mut s = opening();
    s.extend([
        R::Backtrack,
        R::unit_propagate(&[-1, -3, 5, 7], 7),
        R::Backtrack,
        R::decide(5),
        R::unit_propagate(&[-5, 6], 6),
        R::unit_propagate(&[-2, -5, 7], 7),
        R::Backtrack,
        R::unit_propagate(&[-1, -3, 5, 7], 7),
        R::Backtrack,
        R::decide(2),
        R::unit_propagate(&[-2, 3], 3),
        R::decide(4),
        R::decide(5),
        R::unit_propagate(&[-5, 6], 6),
        R::unit_propagate(&[-2, -5, 7], 7),
        R::Backtrack,
        R::decide(6),
        R::unit_propagate(&[-3, -6, -7], -7),
    ]);
    build("dpll-example", System::Dpll, example_formula(), s, (&[-1, 2, 3, 4, -5, 6, -7], &[2, 4, 6]))
}

/// Rows shared by the backjumping and learning examples after the
/// opening, with `learn` inserted after the first backjump when given.
fn backjump_rows(learn: bool) -> Vec<R> {
    let mut s = opening();
    s.push(R::backjump(&[-2, -3, -5], -5, 1));
    if learn {
        s.push(R::learn(&[-2, -3, -5]));
    }
    s.extend([
        R::unit_propagate(&[-1, -3, 5, 7], 7),
        R::backjump(&[-1], -1, 0),
        R::decide(2),
        R::unit_propagate(&[-2, 3], 3),
    ]);
    if learn {
        s.push(R::unit_propagate(&[-2, -3, -5], -5));
    } else {
        s.extend([
            R::decide(4),
            R::decide(5),
            R::unit_propagate(&[-5, 6], 6),
            R::unit_propagate(&[-2, -5, 7], 7),
            R::backjump(&[-2, -3, -5], -5, 1),
        ]);
    }
    s.extend([R::decide(4), R::decide(6), R::unit_propagate(&[-3, -6, -7], -7)]);
    s
}

fn backjump_example() -> Fixture {
    build(
        "backjump-example",
        System::Backjump,
        example_formula(),
        backjump_rows(false),
        (&[-1, 2, 3, -5, 4, 6, -7], &[2, 4, 6]),
    )
}

fn learn_example() -> Fixture {
    build(
        "learn-example",
        System::LearnForget,
        example_formula(),
        backjump_rows(true),
        (&[-1, 2, 3, -5, 4, 6, -7], &[2, 4, 6]),
    )
}

fn cdcl_example() -> Fixture {
    let mut s = opening();
    s.extend([
        R::conflict(&[-3, -6, -7]),
        R::explain(-7, &[-2, -5, 7]),
        R::explain(-6, &[-5, 6]),
        R::learn(&[-2, -3, -5]),
        R::backjump(&[-2, -3, -5], -5, 1),
    ]);
    build("cdcl-example", System::Cdcl, example_formula(), s, (&[1, 2, 3, -5], &[1]))
}

/// Learning `[-a,-b]` from one copy of the cycle gadget, starting from
/// decision level `base`.
fn gadget_round(a: i32, base: usize) -> Vec<R> {
    let (b, c, d) = (a + 1, a + 2, a + 3);
    vec![
        R::decide(a),
        R::decide(b),
        R::unit_propagate(&[-a, -b, c], c),
        R::unit_propagate(&[-a, -b, d], d),
        R::conflict(&[-a, -c, -d]),
        R::explain(-d, &[-a, -b, d]),
        R::explain(-c, &[-a, -b, c]),
        R::backjump_learn(-b, base + 1),
    ]
}

fn restart_cycle() -> Fixture {
    let mut s = gadget_round(1, 0);
    s.push(R::Restart);
    s.extend(gadget_round(5, 0));
    s.push(R::forget(&[&[-1, -2], &[-5, -6]]));
    s.extend(gadget_round(1, 1));
    s.push(R::Restart);
    build("restart-cycle", System::Full, cycle_formula(), s, (&[], &[]))
}

/// All shipped fixtures.
pub fn fixtures() -> Vec<Fixture> {
    vec![dpll_example(), backjump_example(), learn_example(), cdcl_example(), restart_cycle()]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}
