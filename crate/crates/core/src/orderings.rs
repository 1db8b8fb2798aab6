//! Termination orderings, the reachable-state invariants and a step
//! certifier combining the two.
//!
//! Orientation: `a ≻ b` means `b` is smaller, so a legal step from `s` to
//! `s'` must satisfy `measure(s) ≻ measure(s')`. On trails, a proper prefix
//! is greater than its extensions and, at the first difference, a decision
//! is greater than an implied literal.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::cnf::{clause_false, is_reason, Clause, Formula, HasVars, Literal, VarSet};
use crate::error::CnfError;
use crate::oracle::{ModelTable, OracleError};
use crate::rules::{Context, RuleError, RuleInstance, State, System};
use crate::trail::{Trail, TrailEntry};

/// `a ≻lit b`: `a` is a decision and `b` is not.
pub fn succ_lit(a: &TrailEntry, b: &TrailEntry) -> bool {
    a.decision && !b.decision
}

/// `m1 ≻tr m2` over entry lists.
pub fn succ_tr_entries(m1: &[TrailEntry], m2: &[TrailEntry]) -> bool {
    for (a, b) in m1.iter().zip(m2) {
        if a != b {
            return succ_lit(a, b);
        }
    }
    m1.len() < m2.len()
}

/// `m1 ≻tr m2`
pub fn succ_tr(m1: &Trail, m2: &Trail) -> bool {
    succ_tr_entries(m1.entries(), m2.entries())
}

/// `≻tr` restricted to distinct trails over `vbl`.
pub fn succ_tr_restricted(m1: &Trail, m2: &Trail, vbl: &VarSet) -> bool {
    m1.is_distinct()
        && m2.is_distinct()
        && m1.vars_within(vbl)
        && m2.vars_within(vbl)
        && succ_tr(m1, m2)
}

/// The multiset extension of `>` (Dershowitz–Manna): `s1 ≠ s2` and every
/// element with more copies in `s2` is dominated by a larger element with
/// more copies in `s1`.
pub fn multiset_greater<T: Ord + Clone>(s1: &[T], s2: &[T]) -> bool {
    let mut diff: BTreeMap<T, i64> = BTreeMap::new();
    for x in s1 {
        *diff.entry(x.clone()).or_insert(0) += 1;
    }
    for x in s2 {
        *diff.entry(x.clone()).or_insert(0) -= 1;
    }
    diff.retain(|_, n| *n != 0);
    if diff.is_empty() {
        return false;
    }
    // the largest differing element must have surplus in s1
    let mut covered = false;
    for (_, &n) in diff.iter().rev() {
        if n > 0 {
            covered = true;
        } else if !covered {
            return false;
        }
    }
    true
}

fn positions(c: &Clause, m: &Trail) -> Result<Vec<usize>, CnfError> {
    c.dedup()
        .iter()
        .map(|l| m.position(l.opposite()).ok_or(CnfError::LiteralNotInTrail(l.opposite())))
        .collect()
}

/// `c1 ≻C c2` with respect to `m`: the multiset of trail positions of the
/// opposites of `c1` is greater than that of `c2`.
pub fn succ_c(c1: &Clause, c2: &Clause, m: &Trail) -> Result<bool, CnfError> {
    Ok(multiset_greater(&positions(c1, m)?, &positions(c2, m)?))
}

/// `f1 ≻F f2` with respect to `c`: `c ∉ f1 ∧ c ∈ f2`, clauses as sets.
pub fn succ_f(f1: &Formula, f2: &Formula, c: &Clause) -> bool {
    !f1.contains_set(c) && f2.contains_set(c)
}

fn clause_set<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> HashSet<Vec<Literal>> {
    clauses.into_iter().map(|c| c.normalized()).collect()
}

/// `f1 ≻ f2` by strict inclusion of their duplicate-free clause sets, both
/// over `vbl`.
pub fn formula_inclusion_greater(f1: &Formula, f2: &Formula, vbl: &VarSet) -> bool {
    if !f1.vars().is_subset(vbl) || !f2.vars().is_subset(vbl) {
        return false;
    }
    let (s1, s2) = (clause_set(f1), clause_set(f2));
    s1.len() < s2.len() && s1.is_subset(&s2)
}

// ---- measures ----

/// A component of a lexicographic termination measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// the trail under restricted `≻tr`
    Trail,
    /// `cflct`, with `⊥ ≻ ⊤`
    Conflict,
    /// `C` under `≻C`
    Clause,
    /// `F` under `≻F`
    Formula,
    /// `F0 @ Fl` by duplicate-free inclusion
    FormulaSet,
    /// `lnt`, with `⊤ ≻ ⊥`
    Learnt,
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Slot::Trail => "M",
            Slot::Conflict => "cflct",
            Slot::Clause => "C",
            Slot::Formula => "F",
            Slot::FormulaSet => "F̄",
            Slot::Learnt => "lnt",
        }
    }

    /// The measure components of `system`, most significant first; `None`
    /// when the system is not terminating.
    pub fn measure_of(system: System) -> Option<&'static [Slot]> {
        use Slot::*;
        match system {
            System::Dpll | System::Backjump => Some(&[Trail]),
            System::Cdcl => Some(&[Trail, Conflict, Clause, Formula]),
            System::NoRestart => Some(&[Trail, Conflict, Clause, Learnt]),
            System::NoForget => Some(&[FormulaSet, Learnt, Trail, Conflict, Clause]),
            System::LearnForget | System::Full => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of comparing the measures of two successive states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureVerdict {
    Decreased { slot: Slot, detail: String },
    NotDecreased { detail: String },
    /// The system has no well-founded measure; nothing was compared.
    NotWellFounded,
}

impl MeasureVerdict {
    pub fn decreased(&self) -> bool {
        matches!(self, MeasureVerdict::Decreased { .. })
    }

    pub fn slot(&self) -> Option<Slot> {
        match self {
            MeasureVerdict::Decreased { slot, .. } => Some(*slot),
            _ => None,
        }
    }
}

impl fmt::Display for MeasureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureVerdict::Decreased { slot, detail } => write!(f, "decreased in {slot} ({detail})"),
            MeasureVerdict::NotDecreased { detail } => write!(f, "not decreased ({detail})"),
            MeasureVerdict::NotWellFounded => f.write_str("n/a: the system is not well-founded"),
        }
    }
}

/// The measure-relevant part of a state, kept from before a step.
#[derive(Debug, Clone)]
pub struct Snapshot {
    trail: Trail,
    formula: Formula,
    conflict: Clause,
    cflct: bool,
    lnt: bool,
    outside_vars: bool,
}

impl Snapshot {
    pub fn of(s: &State) -> Snapshot {
        Snapshot {
            trail: s.trail().clone(),
            formula: s.formula().clone(),
            conflict: s.conflict_clause().clone(),
            cflct: s.cflct(),
            lnt: s.lnt(),
            outside_vars: s.has_clause_outside_vars(),
        }
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn conflict_clause(&self) -> &Clause {
        &self.conflict
    }
}

enum Cmp {
    Less(String),
    Equal,
    Other(String),
}

/// When `after`'s formula extends `before` by appending clauses: whether
/// some appended clause is new as a set.
fn appended_fresh(before: &Formula, after: &State) -> Option<bool> {
    let (old, new) = (before.clauses(), after.formula().clauses());
    if new.len() <= old.len() || new[..old.len()] != *old {
        return None;
    }
    let added = &new[old.len()..];
    Some(added.iter().any(|c| {
        let copies = added.iter().filter(|d| d.set_eq(c)).count() as u32;
        after.clause_set_count(c) == copies
    }))
}

fn compare_slot(ctx: &Context, slot: Slot, before: &Snapshot, after: &State) -> Cmp {
    match slot {
        Slot::Trail => {
            if before.trail == *after.trail() {
                Cmp::Equal
            } else if succ_tr_restricted(&before.trail, after.trail(), ctx.vars()) {
                Cmp::Less("≻tr".into())
            } else {
                Cmp::Other(format!("{} ⊁tr {}", before.trail, after.trail()))
            }
        }
        Slot::Conflict => match (before.cflct, after.cflct()) {
            (a, b) if a == b => Cmp::Equal,
            (false, true) => Cmp::Less("cflct ⊥ → ⊤".into()),
            _ => Cmp::Other("cflct ⊤ → ⊥".into()),
        },
        Slot::Clause => {
            if before.conflict == *after.conflict_clause() {
                Cmp::Equal
            } else {
                match succ_c(&before.conflict, after.conflict_clause(), &before.trail) {
                    Ok(true) => Cmp::Less("≻C".into()),
                    Ok(false) => {
                        Cmp::Other(format!("{} ⊁C {}", before.conflict, after.conflict_clause()))
                    }
                    Err(e) => Cmp::Other(e.to_string()),
                }
            }
        }
        Slot::Formula => {
            if before.formula == *after.formula() {
                Cmp::Equal
            } else if succ_f(&before.formula, after.formula(), &before.conflict) {
                Cmp::Less("C learnt".into())
            } else {
                Cmp::Other("formula changed without learning C".into())
            }
        }
        Slot::FormulaSet => {
            if before.formula == *after.formula() {
                return Cmp::Equal;
            }
            let within = !before.outside_vars && !after.has_clause_outside_vars();
            if let Some(grew) = appended_fresh(&before.formula, after) {
                return match (grew, within) {
                    (false, _) => Cmp::Equal,
                    (true, true) => Cmp::Less("learnt a fresh clause".into()),
                    (true, false) => Cmp::Other("clause outside Vars".into()),
                };
            }
            let s1 = clause_set(ctx.f0().iter().chain(before.formula.iter()));
            let s2 = clause_set(ctx.f0().iter().chain(after.formula().iter()));
            if s1 == s2 {
                Cmp::Equal
            } else if within && s1.len() < s2.len() && s1.is_subset(&s2) {
                Cmp::Less("learnt a fresh clause".into())
            } else {
                Cmp::Other("clause set did not grow".into())
            }
        }
        Slot::Learnt => match (before.lnt, after.lnt()) {
            (a, b) if a == b => Cmp::Equal,
            (true, false) => Cmp::Less("lnt ⊤ → ⊥".into()),
            _ => Cmp::Other("lnt ⊥ → ⊤".into()),
        },
    }
}

/// Compares the lexicographic measure of `ctx.system` across one step.
pub fn measure_decrease(ctx: &Context, before: &Snapshot, after: &State) -> MeasureVerdict {
    let Some(slots) = Slot::measure_of(ctx.system) else {
        return MeasureVerdict::NotWellFounded;
    };
    for &slot in slots {
        match compare_slot(ctx, slot, before, after) {
            Cmp::Equal => continue,
            Cmp::Less(detail) => return MeasureVerdict::Decreased { slot, detail },
            Cmp::Other(detail) => {
                return MeasureVerdict::NotDecreased { detail: format!("{slot}: {detail}") }
            }
        }
    }
    MeasureVerdict::NotDecreased { detail: "all components equal".into() }
}

// ---- invariants ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    Consistent,
    Distinct,
    VarsM,
    ImpliedLits,
    Equiv,
    VarsF,
    CFalse,
    CEntailed,
    ReasonClauses,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::Consistent => "consistent",
            Invariant::Distinct => "distinct",
            Invariant::VarsM => "varsM",
            Invariant::ImpliedLits => "impliedLits",
            Invariant::Equiv => "equiv",
            Invariant::VarsF => "varsF",
            Invariant::CFalse => "Cfalse",
            Invariant::CEntailed => "Centailed",
            Invariant::ReasonClauses => "reasonClauses",
        }
    }

    /// The invariants of reachable states of `system`.
    pub fn of(system: System) -> &'static [Invariant] {
        use Invariant::*;
        if system.has_conflict_analysis() {
            &[Consistent, Distinct, VarsM, ImpliedLits, Equiv, VarsF, CFalse, CEntailed, ReasonClauses]
        } else {
            &[Consistent, Distinct, VarsM, ImpliedLits, Equiv, VarsF]
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the semantic invariants are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CheckMode {
    /// Syntactic invariants exactly; `Centailed` and `reasonClauses`
    /// inductively from the step's own justification; `impliedLits` and
    /// `equiv` are not checked.
    #[default]
    Cheap,
    /// Every invariant exactly, by model enumeration within the oracle
    /// budget.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("resulting state differs in {field}")]
    Mismatch { field: &'static str },
    #[error("invariant {invariant} violated: {detail}")]
    Invariant { invariant: Invariant, detail: String },
    #[error("invariant {invariant} could not be checked: {reason}")]
    Unchecked { invariant: Invariant, reason: OracleError },
    #[error("measure did not decrease: {detail}")]
    NotDecreased { detail: String },
}

fn violated(invariant: Invariant, detail: impl Into<String>) -> CertifyError {
    CertifyError::Invariant { invariant, detail: detail.into() }
}

/// Checks the invariants that need no entailment reasoning.
fn check_syntactic(ctx: &Context, s: &State) -> Result<(), CertifyError> {
    let m = s.trail();
    if !m.is_consistent() {
        return Err(violated(Invariant::Consistent, format!("{m}")));
    }
    if !m.is_distinct() {
        return Err(violated(Invariant::Distinct, format!("{m}")));
    }
    if !m.vars_within(ctx.vars()) {
        return Err(violated(Invariant::VarsM, format!("{m}")));
    }
    if s.has_clause_outside_vars() {
        return Err(violated(Invariant::VarsF, "a clause mentions a variable outside Vars"));
    }
    if ctx.system.has_conflict_analysis() && s.cflct() && !clause_false(s.conflict_clause(), m) {
        return Err(violated(Invariant::CFalse, format!("{} is not false", s.conflict_clause())));
    }
    Ok(())
}

/// Checks every invariant of `ctx.system` in `s` exactly, with the oracle.
pub fn check_invariants_exact(ctx: &Context, s: &State) -> Result<(), CertifyError> {
    check_syntactic(ctx, s)?;
    let m = s.trail();
    let g = s.full_formula(ctx);
    let mut vars = ctx.vars().clone();
    vars.extend(g.vars());
    vars.extend(m.vars());
    vars.extend(s.conflict_clause().vars());
    let budget = ctx.oracle_budget();
    let unchecked = |invariant| move |reason| CertifyError::Unchecked { invariant, reason };
    let table = ModelTable::build(&g, &vars, budget).map_err(unchecked(Invariant::Equiv))?;
    let t0 = ModelTable::build(ctx.f0(), &vars, budget).map_err(unchecked(Invariant::Equiv))?;
    if !table.same_models(&t0) {
        return Err(violated(Invariant::Equiv, "F and F0 have different models"));
    }
    for (i, e) in m.entries().iter().enumerate() {
        let l = e.literal;
        let decisions: Vec<Literal> =
            m.entries()[..=i].iter().filter(|e| e.decision).map(|e| e.literal).collect();
        if !table.entails_under(&decisions, &[l]) {
            return Err(violated(Invariant::ImpliedLits, format!("{l} is not implied")));
        }
    }
    if !ctx.system.has_conflict_analysis() {
        return Ok(());
    }
    if s.cflct() && !table.entails_clause(s.conflict_clause()) {
        return Err(violated(Invariant::CEntailed, format!("{} is not entailed", s.conflict_clause())));
    }
    for (i, e) in m.entries().iter().enumerate() {
        if e.decision {
            continue;
        }
        let before: Vec<Literal> = m.entries()[..i].iter().map(|e| e.literal).collect();
        if !table.entails_under(&before, &[e.literal]) {
            return Err(violated(
                Invariant::ReasonClauses,
                format!("{} has no entailed reason", e.literal),
            ));
        }
    }
    Ok(())
}

fn known_entailed(ctx: &Context, s: &State, c: &Clause) -> bool {
    c.is_tautology() || s.contains_clause_set(c) || ctx.is_certified(c)
}

/// Checks the invariants in `after` given that it was reached from `before`
/// by `r`, in the cheap inductive mode.
fn check_invariants_inductive(
    ctx: &mut Context,
    before: &Snapshot,
    r: &RuleInstance,
    after: &State,
) -> Result<(), CertifyError> {
    check_syntactic(ctx, after)?;
    if !ctx.system.has_conflict_analysis() {
        return Ok(());
    }
    if after.cflct() {
        let c = after.conflict_clause();
        let justified = known_entailed(ctx, after, c)
            || match r {
                RuleInstance::Explain { clause, .. } => {
                    known_entailed(ctx, after, &before.conflict) && known_entailed(ctx, after, clause)
                }
                _ => *c == before.conflict,
            };
        if !justified {
            return Err(violated(Invariant::CEntailed, format!("{c} has no justification")));
        }
        ctx.certify(c);
    }
    let m = after.trail();
    let old = before.trail.entries();
    let grew = m.len() > old.len() || m.entries() != &old[..m.len()];
    if grew {
        let Some(last) = m.entries().last().copied() else { return Ok(()) };
        if !last.decision {
            let reason = match r {
                RuleInstance::UnitPropagate { clause, .. } => Some(clause.clone()),
                RuleInstance::Backjump { .. } | RuleInstance::BackjumpLearn { .. } => {
                    Some(before.conflict.clone())
                }
                _ => None,
            };
            let ok = reason.is_some_and(|c| {
                is_reason(&c, last.literal, m) && known_entailed(ctx, after, &c)
            });
            if !ok {
                return Err(violated(
                    Invariant::ReasonClauses,
                    format!("{} has no entailed reason", last.literal),
                ));
            }
        }
    }
    Ok(())
}

/// What a certified step established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub measure: MeasureVerdict,
    pub mode: CheckMode,
}

/// Checks invariants and the measure for a step `before →r after` that has
/// already been applied (its guard held).
pub fn check_step(
    ctx: &mut Context,
    before: &Snapshot,
    r: &RuleInstance,
    after: &State,
    mode: CheckMode,
) -> Result<StepReport, CertifyError> {
    match mode {
        CheckMode::Cheap => check_invariants_inductive(ctx, before, r, after)?,
        CheckMode::Oracle => check_invariants_exact(ctx, after)?,
    }
    let measure = measure_decrease(ctx, before, after);
    if let MeasureVerdict::NotDecreased { detail } = &measure {
        return Err(CertifyError::NotDecreased { detail: detail.clone() });
    }
    Ok(StepReport { measure, mode })
}

/// The first component in which two states differ; conflict clauses are
/// compared as sets.
pub fn first_difference(a: &State, b: &State) -> Option<&'static str> {
    if a.trail() != b.trail() {
        Some("M")
    } else if a.formula() != b.formula() {
        Some("F")
    } else if !a.conflict_clause().set_eq(b.conflict_clause()) {
        Some("C")
    } else if a.cflct() != b.cflct() {
        Some("cflct")
    } else if a.lnt() != b.lnt() {
        Some("lnt")
    } else {
        None
    }
}

/// Certifies that `r` leads from `before` to `after`: the guard holds, the
/// result matches `after`, the invariants hold in `after` and the measure
/// decreased.
pub fn certify_step(
    ctx: &mut Context,
    before: &State,
    r: &RuleInstance,
    after: &State,
    mode: CheckMode,
) -> Result<StepReport, CertifyError> {
    let snap = Snapshot::of(before);
    let next = before.applied(ctx, r)?;
    if let Some(field) = first_difference(&next, after) {
        return Err(CertifyError::Mismatch { field });
    }
    check_step(ctx, &snap, r, &next, mode)
}

#[cfg(test)]
mod tests;
