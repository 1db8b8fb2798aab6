use std::collections::HashSet;
use std::fmt;

use crate::cnf::{
    clause_false, is_reason, is_unit, resolvent, Clause, Formula, HasVars, Literal, Var,
};
use crate::trail::{Trail, TrailEntry};

use super::entail::{self, Verdict};
use super::index::ClauseIndex;
use super::levels::{is_backjump_level, is_minimal_backjump_level};
use super::{Context, Guard, RuleError, RuleInstance, RuleName, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Accepting,
    Rejecting,
    Intermediate,
}

/// `(M, F)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateD {
    pub m: Trail,
    pub f: Formula,
}

/// `(M, F, C, cflct)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateC {
    pub m: Trail,
    pub f: Formula,
    pub c: Clause,
    pub cflct: bool,
}

/// `(M, Fl, C, cflct, lnt)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateR {
    pub m: Trail,
    pub fl: Formula,
    pub c: Clause,
    pub cflct: bool,
    pub lnt: bool,
}

/// A solver state of any system; see the module documentation for how the
/// components are read.
#[derive(Clone)]
pub struct State {
    trail: Trail,
    /// `F`, or `Fl` in the five-tuple systems
    formula: Formula,
    conflict: Clause,
    cflct: bool,
    lnt: bool,
    /// status of the guard clauses: `F`, or `F0 @ Fl`
    index: ClauseIndex,
    /// number of `F0` clauses at the head of the index
    base: usize,
    five_tuple: bool,
}

impl PartialEq for State {
    fn eq(&self, other: &State) -> bool {
        self.trail == other.trail
            && self.formula == other.formula
            && self.conflict == other.conflict
            && self.cflct == other.cflct
            && self.lnt == other.lnt
    }
}

impl Eq for State {}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(M = {}, {} = {}, C = {}, cflct = {}, lnt = {})",
            self.trail,
            if self.five_tuple { "Fl" } else { "F" },
            self.formula,
            self.conflict,
            self.cflct,
            self.lnt
        )
    }
}

fn rejected(rule: RuleName, guard: Guard) -> RuleError {
    RuleError::Rejected { rule, guard }
}

fn ensure(cond: bool, rule: RuleName, guard: Guard) -> Result<(), RuleError> {
    if cond {
        Ok(())
    } else {
        Err(rejected(rule, guard))
    }
}

/// `isUnit c l P` for the prefix `P` of `m` of length `plen`.
fn is_unit_in_prefix(c: &Clause, l: Literal, m: &Trail, plen: usize) -> bool {
    let in_p = |x: Literal| matches!(m.position(x), Some(p) if p < plen);
    c.contains(l)
        && !in_p(l)
        && !in_p(l.opposite())
        && c.iter().filter(|&&x| x != l).all(|&x| in_p(x.opposite()))
}

/// `c` is the reason for some literal of `m`.
fn is_reason_for_any(c: &Clause, m: &Trail) -> bool {
    c.iter().any(|&l| m.contains(l) && is_reason(c, l, m))
}

fn distinct_literals(c: &Clause) -> Vec<Literal> {
    c.dedup().literals().to_vec()
}

impl State {
    /// `([], F0)`, `([], F0, [], ⊥)` or `([], [], [], ⊥, ⊥)`.
    pub fn initial(ctx: &Context) -> State {
        let formula = if ctx.system.is_five_tuple() { Formula::default() } else { ctx.f0().clone() };
        State::from_parts(ctx, Trail::new(), formula, Clause::empty(), false, false)
    }

    /// Builds an arbitrary state; `formula` is `F`, or `Fl` in the
    /// five-tuple systems.
    pub fn from_parts(
        ctx: &Context,
        trail: Trail,
        formula: Formula,
        conflict: Clause,
        cflct: bool,
        lnt: bool,
    ) -> State {
        let five_tuple = ctx.system.is_five_tuple();
        let mut index = ClauseIndex::new();
        let mut base = 0;
        if five_tuple {
            for c in ctx.f0() {
                index.push(c.clone(), &trail, ctx.vars());
            }
            base = ctx.f0().len();
        }
        for c in &formula {
            index.push(c.clone(), &trail, ctx.vars());
        }
        State { trail, formula, conflict, cflct, lnt, index, base, five_tuple }
    }

    pub fn from_d(ctx: &Context, s: StateD) -> State {
        State::from_parts(ctx, s.m, s.f, Clause::empty(), false, false)
    }

    pub fn from_c(ctx: &Context, s: StateC) -> State {
        State::from_parts(ctx, s.m, s.f, s.c, s.cflct, false)
    }

    pub fn from_r(ctx: &Context, s: StateR) -> State {
        State::from_parts(ctx, s.m, s.fl, s.c, s.cflct, s.lnt)
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    /// `F`, or `Fl` in the five-tuple systems.
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Occurrences of clauses set-equal to `c` among the guard clauses.
    pub fn clause_set_count(&self, c: &Clause) -> u32 {
        self.index.set_count(c)
    }

    /// The conflict-analysis clause `C`.
    pub fn conflict_clause(&self) -> &Clause {
        &self.conflict
    }

    pub fn cflct(&self) -> bool {
        self.cflct
    }

    pub fn lnt(&self) -> bool {
        self.lnt
    }

    /// The clauses the guards range over (`F`, or `F0 @ Fl`), in order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> + Clone + '_ {
        self.index.clauses()
    }

    /// `F`, or `F0 @ Fl`, as a formula value.
    pub fn full_formula(&self, ctx: &Context) -> Formula {
        if self.five_tuple {
            ctx.f0().concat(&self.formula)
        } else {
            self.formula.clone()
        }
    }

    pub fn as_d(&self) -> StateD {
        StateD { m: self.trail.clone(), f: self.formula.clone() }
    }

    pub fn as_c(&self) -> StateC {
        StateC {
            m: self.trail.clone(),
            f: self.formula.clone(),
            c: self.conflict.clone(),
            cflct: self.cflct,
        }
    }

    pub fn as_r(&self) -> StateR {
        StateR {
            m: self.trail.clone(),
            fl: self.formula.clone(),
            c: self.conflict.clone(),
            cflct: self.cflct,
            lnt: self.lnt,
        }
    }

    // ---- clause status queries ----

    fn fast(&self) -> bool {
        self.trail.is_consistent()
    }

    /// `M ⊨¬ F` (or `F0 @ Fl`).
    pub fn formula_false(&self) -> bool {
        if self.fast() {
            self.index.has_false()
        } else {
            self.clauses().any(|c| clause_false(c, &self.trail))
        }
    }

    /// Clauses false in `M`, in list order (duplicates included).
    pub fn false_clauses(&self) -> Vec<Clause> {
        if self.fast() {
            let mut ids: Vec<u32> = self.index.false_ids().collect();
            ids.sort_unstable();
            ids.iter().map(|&id| self.index.clause(id).clone()).collect()
        } else {
            self.clauses().filter(|c| clause_false(c, &self.trail)).cloned().collect()
        }
    }

    /// `(c, l)` with `isUnit c l M`, in list order.
    pub fn unit_clauses(&self) -> Vec<(Clause, Literal)> {
        if self.fast() {
            self.index
                .unit_ids()
                .map(|id| (self.index.clause(id).clone(), self.index.unit_literal(id, &self.trail)))
                .collect()
        } else {
            self.clauses()
                .filter_map(|c| {
                    distinct_literals(c)
                        .into_iter()
                        .find(|&l| is_unit(c, l, &self.trail))
                        .map(|l| (c.clone(), l))
                })
                .collect()
        }
    }

    /// The first unit clause in list order.
    pub fn first_unit(&self) -> Option<(Clause, Literal)> {
        if self.fast() {
            self.index
                .unit_ids()
                .next()
                .map(|id| (self.index.clause(id).clone(), self.index.unit_literal(id, &self.trail)))
        } else {
            self.unit_clauses().into_iter().next()
        }
    }

    /// The first false clause in list order.
    pub fn first_false(&self) -> Option<Clause> {
        if self.fast() {
            self.index.false_ids().next().map(|id| self.index.clause(id).clone())
        } else {
            self.clauses().find(|c| clause_false(c, &self.trail)).cloned()
        }
    }

    pub fn has_unit_clause(&self) -> bool {
        if self.fast() {
            self.index.has_unit()
        } else {
            !self.unit_clauses().is_empty()
        }
    }

    /// Member clauses (of `F` or `F0 @ Fl`) that are reasons for `l`.
    pub fn reasons_for(&self, l: Literal) -> Vec<Clause> {
        let mut ids: Vec<u32> = self.index.occurrences(l).to_vec();
        ids.sort_unstable();
        ids.iter()
            .map(|&id| self.index.clause(id))
            .filter(|c| is_reason(c, l, &self.trail))
            .cloned()
            .collect()
    }

    pub fn contains_clause(&self, c: &Clause) -> bool {
        self.index.contains_exact(c)
    }

    pub fn contains_clause_set(&self, c: &Clause) -> bool {
        self.index.contains_set(c)
    }

    /// Some guard clause mentions a variable outside `Vars`.
    pub fn has_clause_outside_vars(&self) -> bool {
        self.index.has_outside_vars()
    }

    /// The smallest undefined decision variable.
    pub fn first_undefined_dec_var(&self, ctx: &Context) -> Option<Var> {
        ctx.dec_vars()
            .iter()
            .copied()
            .find(|&v| self.trail.is_undefined(Literal::pos(v)))
    }

    // ---- raw mutation keeping the index in sync ----

    fn push_entry(&mut self, e: TrailEntry) {
        let fresh = !self.trail.contains(e.literal);
        self.trail.push(e);
        if fresh {
            self.index.assign(e.literal);
        }
    }

    fn truncate(&mut self, len: usize) {
        while self.trail.len() > len {
            let e = self.trail.pop().expect("non-empty trail");
            if !self.trail.contains(e.literal) {
                self.index.unassign(e.literal);
            }
        }
    }

    fn add_clause(&mut self, ctx: &Context, c: Clause) {
        self.formula.push(c.clone());
        self.index.push(c, &self.trail, ctx.vars());
    }

    // ---- entailment ----

    fn check_entailed(
        &self,
        ctx: &mut Context,
        rule: RuleName,
        c: &Clause,
    ) -> Result<(), RuleError> {
        if self.index.contains_set(c) || ctx.is_certified(c) {
            return Ok(());
        }
        match entail::certify(self.clauses(), ctx.certified_clauses(), c, ctx.oracle_budget()) {
            Verdict::Entailed => {
                ctx.certify(c);
                Ok(())
            }
            Verdict::NotEntailed => Err(rejected(rule, Guard::Entailed)),
            Verdict::Unknown(reason) => {
                Err(RuleError::Uncertifiable { rule, clause: c.clone(), reason })
            }
        }
    }

    /// `F ∖ c ⊨ c` with every occurrence of `c` removed.
    fn redundant(&self, ctx: &Context, c: &Clause) -> Verdict {
        let rest: Vec<&Clause> = self.clauses().filter(|d| *d != c).collect();
        entail::certify(rest.iter().copied(), &[], c, ctx.oracle_budget())
    }

    // ---- rules ----

    /// Checks the guard of `r` and, when it holds, performs the step in
    /// place. On error the state is unchanged. Entailments certified along
    /// the way are recorded in `ctx`.
    pub fn apply(&mut self, ctx: &mut Context, r: &RuleInstance) -> Result<(), RuleError> {
        let sys = ctx.system;
        let name = r.name();
        ensure(sys.has_rule(name), name, Guard::RuleInSystem)?;
        match r {
            RuleInstance::Decide { lit } => {
                ensure(ctx.dec_vars().contains(&lit.var()), name, Guard::DecVar)?;
                ensure(self.trail.is_undefined(*lit), name, Guard::LiteralUndefined)?;
                if sys.is_five_tuple() {
                    ensure(!self.has_unit_clause(), name, Guard::NoUnitClause)?;
                }
                self.push_entry(TrailEntry::decision(*lit));
            }
            RuleInstance::UnitPropagate { clause, lit } => {
                match sys {
                    System::Dpll | System::NoRestart | System::NoForget | System::Full => {
                        ensure(self.index.contains_exact(clause), name, Guard::ClauseInFormula)?;
                        ensure(is_unit(clause, *lit, &self.trail), name, Guard::IsUnit)?;
                    }
                    _ => {
                        ensure(ctx.vars().contains(&lit.var()), name, Guard::VarInVars)?;
                        ensure(is_unit(clause, *lit, &self.trail), name, Guard::IsUnit)?;
                        self.check_entailed(ctx, name, clause)?;
                    }
                }
                self.push_entry(TrailEntry::implied(*lit));
            }
            RuleInstance::Backtrack => {
                ensure(self.formula_false(), name, Guard::FormulaFalse)?;
                let last = self.trail.last_decision().map_err(|_| rejected(name, Guard::HasDecisions))?;
                let keep = self.trail.prefix_before_last_decision().len();
                self.truncate(keep);
                self.push_entry(TrailEntry::implied(last.opposite()));
            }
            RuleInstance::Backjump { clause, lit, level } => {
                let plen = self.trail.prefix_len_to_level(*level);
                if sys == System::Cdcl {
                    ensure(self.cflct, name, Guard::ConflictSet)?;
                    if let Some(c) = clause {
                        ensure(c.set_eq(&self.conflict), name, Guard::MatchesC)?;
                    }
                    ensure(
                        is_backjump_level(*level, *lit, &self.conflict, &self.trail),
                        name,
                        Guard::IsBackjumpLevel,
                    )?;
                    self.truncate(plen);
                    self.push_entry(TrailEntry::implied(*lit));
                    self.conflict = Clause::empty();
                    self.cflct = false;
                } else {
                    let Some(c) = clause else {
                        return Err(rejected(name, Guard::IsUnit));
                    };
                    ensure(ctx.vars().contains(&lit.var()), name, Guard::VarInVars)?;
                    ensure(*level < self.trail.current_level(), name, Guard::LevelBelowCurrent)?;
                    ensure(is_unit_in_prefix(c, *lit, &self.trail, plen), name, Guard::IsUnit)?;
                    self.check_entailed(ctx, name, c)?;
                    self.truncate(plen);
                    self.push_entry(TrailEntry::implied(*lit));
                }
            }
            RuleInstance::Learn { clause } => {
                if sys == System::Cdcl {
                    ensure(self.cflct, name, Guard::ConflictSet)?;
                    if let Some(c) = clause {
                        ensure(c.set_eq(&self.conflict), name, Guard::MatchesC)?;
                    }
                    ensure(!self.index.contains_set(&self.conflict), name, Guard::NotYetLearnt)?;
                    let c = self.conflict.clone();
                    self.add_clause(ctx, c);
                } else {
                    let Some(c) = clause else {
                        return Err(rejected(name, Guard::Entailed));
                    };
                    ensure(c.vars().is_subset(ctx.vars()), name, Guard::VarsWithinVars)?;
                    self.check_entailed(ctx, name, c)?;
                    self.add_clause(ctx, c.clone());
                }
            }
            RuleInstance::Forget { clauses } => {
                if sys.is_five_tuple() {
                    ensure(!self.cflct, name, Guard::ConflictUnset)?;
                    ensure(self.lnt, name, Guard::LearntSinceLast)?;
                    ensure(clauses.iter().all(|c| self.formula.contains(c)), name, Guard::OnlyLearnt)?;
                    ensure(
                        clauses.iter().all(|c| !is_reason_for_any(c, &self.trail)),
                        name,
                        Guard::NotAReason,
                    )?;
                    self.forget_learnt(ctx, clauses);
                    self.lnt = false;
                } else {
                    ensure(clauses.len() == 1, name, Guard::SingleClause)?;
                    let c = &clauses[0];
                    ensure(self.formula.contains(c), name, Guard::ClauseInFormula)?;
                    match self.redundant(ctx, c) {
                        Verdict::Entailed => {}
                        Verdict::NotEntailed => return Err(rejected(name, Guard::Redundant)),
                        Verdict::Unknown(reason) => {
                            return Err(RuleError::Uncertifiable { rule: name, clause: c.clone(), reason })
                        }
                    }
                    let pos = self.formula.iter().position(|d| d == c).expect("member clause");
                    self.formula.remove_first(c);
                    self.index.remove_at(pos, ctx.vars());
                }
            }
            RuleInstance::Conflict { clause } => {
                ensure(!self.cflct, name, Guard::ConflictUnset)?;
                if sys.is_five_tuple() {
                    ensure(self.index.contains_exact(clause), name, Guard::ClauseInFormula)?;
                }
                ensure(clause_false(clause, &self.trail), name, Guard::ClauseFalse)?;
                if !sys.is_five_tuple() {
                    self.check_entailed(ctx, name, clause)?;
                }
                self.conflict = clause.clone();
                self.cflct = true;
            }
            RuleInstance::Explain { lit, clause } => {
                ensure(self.cflct, name, Guard::ConflictSet)?;
                ensure(self.conflict.contains(*lit), name, Guard::LiteralInC)?;
                if sys.is_five_tuple() {
                    ensure(self.index.contains_exact(clause), name, Guard::ClauseInFormula)?;
                }
                ensure(is_reason(clause, lit.opposite(), &self.trail), name, Guard::IsReason)?;
                if !sys.is_five_tuple() {
                    self.check_entailed(ctx, name, clause)?;
                }
                self.conflict = resolvent(&self.conflict, clause, *lit);
            }
            RuleInstance::BackjumpLearn { clause, lit, level } => {
                ensure(self.cflct, name, Guard::ConflictSet)?;
                if let Some(c) = clause {
                    ensure(c.set_eq(&self.conflict), name, Guard::MatchesC)?;
                }
                ensure(
                    is_minimal_backjump_level(*level, *lit, &self.conflict, &self.trail),
                    name,
                    Guard::IsMinimalBackjumpLevel,
                )?;
                let plen = self.trail.prefix_len_to_level(*level);
                self.truncate(plen);
                self.push_entry(TrailEntry::implied(*lit));
                let c = std::mem::replace(&mut self.conflict, Clause::empty());
                self.add_clause(ctx, c);
                self.cflct = false;
                self.lnt = true;
            }
            RuleInstance::Restart => {
                ensure(!self.cflct, name, Guard::ConflictUnset)?;
                ensure(self.lnt, name, Guard::LearntSinceLast)?;
                let plen = self.trail.prefix_len_to_level(0);
                self.truncate(plen);
                self.lnt = false;
            }
        }
        Ok(())
    }

    /// `Fl := Fl ∖ Fc`, every occurrence removed.
    fn forget_learnt(&mut self, ctx: &Context, cs: &[Clause]) {
        let doomed: Vec<usize> = self
            .formula
            .iter()
            .enumerate()
            .filter(|(_, d)| cs.contains(d))
            .map(|(i, _)| i)
            .collect();
        for &i in doomed.iter().rev() {
            self.index.remove_at(self.base + i, ctx.vars());
        }
        self.formula.remove_all(cs);
    }

    /// Pure variant of [`State::apply`].
    pub fn applied(&self, ctx: &mut Context, r: &RuleInstance) -> Result<State, RuleError> {
        let mut next = self.clone();
        next.apply(ctx, r)?;
        Ok(next)
    }

    // ---- enumeration and classification ----

    /// Clauses over which entailment-guarded existentials range: the guard
    /// clauses, then certified clauses not already listed.
    fn clause_pool(&self, ctx: &Context) -> Vec<Clause> {
        let mut seen: HashSet<&Clause> = HashSet::new();
        let mut pool = Vec::new();
        for c in self.clauses().chain(ctx.certified_clauses().iter()) {
            if seen.insert(c) {
                pool.push(c.clone());
            }
        }
        pool
    }

    /// Every rule instance whose guard holds, without duplicates, ordered by
    /// rule (definition order), clause position, literal position, level and
    /// decision variable (ascending, positive polarity first).
    pub fn enumerate_applicable(&self, ctx: &Context) -> Vec<RuleInstance> {
        let sys = ctx.system;
        let m = &self.trail;
        let mut out: Vec<RuleInstance> = Vec::new();
        let mut seen: HashSet<RuleInstance> = HashSet::new();
        let mut emit = |r: RuleInstance| {
            if seen.insert(r.clone()) {
                out.push(r);
            }
        };
        let membership_only = matches!(
            sys,
            System::Dpll | System::NoRestart | System::NoForget | System::Full
        );
        let pool = if membership_only {
            self.clauses().cloned().collect::<Vec<_>>()
        } else {
            self.clause_pool(ctx)
        };
        for &rule in sys.rules() {
            match rule {
                RuleName::Decide => {
                    if sys.is_five_tuple() && self.has_unit_clause() {
                        continue;
                    }
                    for &v in ctx.dec_vars() {
                        for lit in [Literal::pos(v), Literal::neg(v)] {
                            if m.is_undefined(lit) {
                                emit(RuleInstance::Decide { lit });
                            }
                        }
                    }
                }
                RuleName::UnitPropagate => {
                    for c in &pool {
                        for l in distinct_literals(c) {
                            let var_ok = membership_only || ctx.vars().contains(&l.var());
                            if var_ok && is_unit(c, l, m) {
                                emit(RuleInstance::UnitPropagate { clause: c.clone(), lit: l });
                            }
                        }
                    }
                }
                RuleName::Backtrack => {
                    if self.formula_false() && !m.decisions().is_empty() {
                        emit(RuleInstance::Backtrack);
                    }
                }
                RuleName::Backjump if sys == System::Cdcl => {
                    if !self.cflct {
                        continue;
                    }
                    for l in distinct_literals(&self.conflict) {
                        for level in 0..=m.current_level() {
                            if is_backjump_level(level, l, &self.conflict, m) {
                                emit(RuleInstance::Backjump {
                                    clause: Some(self.conflict.clone()),
                                    lit: l,
                                    level,
                                });
                            }
                        }
                    }
                }
                RuleName::Backjump => {
                    for c in &pool {
                        for l in distinct_literals(c) {
                            if !ctx.vars().contains(&l.var()) {
                                continue;
                            }
                            for level in 0..m.current_level() {
                                let plen = m.prefix_len_to_level(level);
                                if is_unit_in_prefix(c, l, m, plen) {
                                    emit(RuleInstance::Backjump {
                                        clause: Some(c.clone()),
                                        lit: l,
                                        level,
                                    });
                                }
                            }
                        }
                    }
                }
                RuleName::Learn if sys == System::Cdcl => {
                    if self.cflct && !self.index.contains_set(&self.conflict) {
                        emit(RuleInstance::Learn { clause: Some(self.conflict.clone()) });
                    }
                }
                RuleName::Learn => {
                    for c in &pool {
                        if c.vars().is_subset(ctx.vars()) {
                            emit(RuleInstance::Learn { clause: Some(c.clone()) });
                        }
                    }
                }
                RuleName::Forget if sys.is_five_tuple() => {
                    if self.cflct || !self.lnt {
                        continue;
                    }
                    let mut candidates: Vec<Clause> = Vec::new();
                    for c in &self.formula {
                        if !candidates.contains(c) && !is_reason_for_any(c, m) {
                            candidates.push(c.clone());
                        }
                    }
                    for mask in 0u64..(1u64 << candidates.len()) {
                        let subset = candidates
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, c)| c.clone())
                            .collect();
                        emit(RuleInstance::Forget { clauses: subset });
                    }
                }
                RuleName::Forget => {
                    for c in &self.formula {
                        if self.redundant(ctx, c) == Verdict::Entailed {
                            emit(RuleInstance::Forget { clauses: vec![c.clone()] });
                        }
                    }
                }
                RuleName::Conflict => {
                    if self.cflct {
                        continue;
                    }
                    for c in &pool {
                        if clause_false(c, m) {
                            emit(RuleInstance::Conflict { clause: c.clone() });
                        }
                    }
                }
                RuleName::Explain => {
                    if !self.cflct {
                        continue;
                    }
                    for l in distinct_literals(&self.conflict) {
                        for c in &pool {
                            if is_reason(c, l.opposite(), m) {
                                emit(RuleInstance::Explain { lit: l, clause: c.clone() });
                            }
                        }
                    }
                }
                RuleName::BackjumpLearn => {
                    if !self.cflct {
                        continue;
                    }
                    for l in distinct_literals(&self.conflict) {
                        for level in 0..=m.current_level() {
                            if is_minimal_backjump_level(level, l, &self.conflict, m) {
                                emit(RuleInstance::BackjumpLearn {
                                    clause: Some(self.conflict.clone()),
                                    lit: l,
                                    level,
                                });
                            }
                        }
                    }
                }
                RuleName::Restart => {
                    if !self.cflct && self.lnt {
                        emit(RuleInstance::Restart);
                    }
                }
            }
        }
        out
    }

    /// Accepting, rejecting or neither, per the outcome-state definitions of
    /// the state's system family.
    pub fn classify(&self, ctx: &Context) -> Outcome {
        let no_decision_left = self.first_undefined_dec_var(ctx).is_none();
        if ctx.system.has_conflict_analysis() {
            if !self.cflct && !self.formula_false() && no_decision_left {
                Outcome::Accepting
            } else if self.cflct && self.conflict.is_empty() {
                Outcome::Rejecting
            } else {
                Outcome::Intermediate
            }
        } else {
            let falsified = self.formula_false();
            if !falsified && no_decision_left {
                Outcome::Accepting
            } else if falsified && self.trail.decisions().is_empty() {
                Outcome::Rejecting
            } else {
                Outcome::Intermediate
            }
        }
    }
}
