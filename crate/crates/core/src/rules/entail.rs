//! Certification of entailment guards `F ⊨ c`.
//!
//! Cheap sufficient checks come first: membership (as a literal set),
//! subsumption, tautology, clauses the caller already certified, and reverse
//! unit propagation (asserting the opposites of `c` and unit-propagating to a
//! conflict). Only when all of those fail is the brute-force oracle asked,
//! within its variable budget.

use std::collections::HashSet;

use crate::cnf::{Clause, Formula, Literal};
use crate::oracle::{Oracle, OracleError};

/// Every literal of `d` occurs in `c`.
fn subsumes(d: &Clause, c: &HashSet<Literal>) -> bool {
    d.iter().all(|l| c.contains(l))
}

/// Unit propagation over `clauses` starting from the opposites of `c`
/// reaches a false clause.
pub(crate) fn rup<'a, I>(clauses: I, c: &Clause) -> bool
where
    I: IntoIterator<Item = &'a Clause>,
    I::IntoIter: Clone,
{
    let clauses = clauses.into_iter();
    let mut assigned: HashSet<Literal> = HashSet::new();
    for &l in c {
        if assigned.contains(&l) {
            return true;
        }
        assigned.insert(l.opposite());
    }
    loop {
        let mut changed = false;
        for d in clauses.clone() {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in d {
                if assigned.contains(&l) {
                    sat = true;
                    break;
                }
                if !assigned.contains(&l.opposite()) && open != Some(l) {
                    n_open += 1;
                    open = Some(l);
                }
            }
            if sat {
                continue;
            }
            match n_open {
                0 => return true,
                1 => {
                    assigned.insert(open.expect("one open literal"));
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return false;
        }
    }
}

/// Outcome of trying to certify `F ⊨ c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Verdict {
    Entailed,
    NotEntailed,
    Unknown(OracleError),
}

/// Certifies `clauses ⊨ c`, trusting `trusted` as additional entailed
/// clauses.
pub(crate) fn certify<'a, I>(clauses: I, trusted: &'a [Clause], c: &Clause, budget: usize) -> Verdict
where
    I: IntoIterator<Item = &'a Clause>,
    I::IntoIter: Clone,
{
    let clauses = clauses.into_iter();
    if c.is_tautology() {
        return Verdict::Entailed;
    }
    let lits: HashSet<Literal> = c.iter().copied().collect();
    if clauses.clone().chain(trusted.iter()).any(|d| subsumes(d, &lits)) {
        return Verdict::Entailed;
    }
    if rup(clauses.clone().chain(trusted.iter()), c) {
        return Verdict::Entailed;
    }
    let f: Formula = clauses.cloned().collect();
    match Oracle::new(budget).entails(&f, c) {
        Ok(true) => Verdict::Entailed,
        Ok(false) => Verdict::NotEntailed,
        Err(e) => Verdict::Unknown(e),
    }
}
