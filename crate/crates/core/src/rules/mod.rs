//! The transition systems as data: states, rule instances, guards, rule
//! application, applicable-instance enumeration and outcome classification.
//!
//! One [`State`] type serves every system. Its components are read according
//! to [`System`]: `(M, F)` for →d/→b/→l, `(M, F, C, cflct)` for →c and
//! `(M, Fl, C, cflct, lnt)` for the restart/forget family, where the clauses
//! seen by the guards are `F0 @ Fl`. [`StateD`], [`StateC`] and [`StateR`]
//! are plain-value views of those tuples.

mod entail;
mod index;
mod levels;
mod state;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, Formula, HasVars, Literal, VarSet};
use crate::oracle::{OracleError, DEFAULT_VAR_BUDGET};

pub use levels::{is_backjump_level, is_minimal_backjump_level, is_uip};
pub use state::{Outcome, State, StateC, StateD, StateR};

/// Which transition relation is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    /// →d: decide, unitPropagate, backtrack
    Dpll,
    /// →b: decide, unitPropagate, backjump
    Backjump,
    /// →l: →b plus learn and forget
    LearnForget,
    /// →c: conflict analysis
    Cdcl,
    /// →r: the five-tuple rules without restart
    NoRestart,
    /// →f: the five-tuple rules without forget
    NoForget,
    /// →: all five-tuple rules
    Full,
}

impl System {
    pub const ALL: [System; 7] = [
        System::Dpll,
        System::Backjump,
        System::LearnForget,
        System::Cdcl,
        System::NoRestart,
        System::NoForget,
        System::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            System::Dpll => "dpll",
            System::Backjump => "backjump",
            System::LearnForget => "learn",
            System::Cdcl => "cdcl",
            System::NoRestart => "no-restart",
            System::NoForget => "no-forget",
            System::Full => "full",
        }
    }

    /// Systems over `(M, Fl, C, cflct, lnt)` states.
    pub fn is_five_tuple(self) -> bool {
        matches!(self, System::NoRestart | System::NoForget | System::Full)
    }

    /// Systems with a conflict-analysis clause `C` and the `cflct` flag.
    pub fn has_conflict_analysis(self) -> bool {
        self == System::Cdcl || self.is_five_tuple()
    }

    /// Rules of the system, in the order of their definition.
    pub fn rules(self) -> &'static [RuleName] {
        use RuleName::*;
        match self {
            System::Dpll => &[UnitPropagate, Backtrack, Decide],
            System::Backjump => &[UnitPropagate, Backjump, Decide],
            System::LearnForget => &[UnitPropagate, Backjump, Decide, Learn, Forget],
            System::Cdcl => &[Decide, UnitPropagate, Conflict, Explain, Backjump, Learn],
            System::NoRestart => &[Decide, UnitPropagate, Conflict, Explain, BackjumpLearn, Forget],
            System::NoForget => &[Decide, UnitPropagate, Conflict, Explain, BackjumpLearn, Restart],
            System::Full => {
                &[Decide, UnitPropagate, Conflict, Explain, BackjumpLearn, Forget, Restart]
            }
        }
    }

    pub fn has_rule(self, r: RuleName) -> bool {
        self.rules().contains(&r)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<System, String> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| format!("unknown system `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    Decide,
    UnitPropagate,
    Backtrack,
    Backjump,
    Learn,
    Forget,
    Conflict,
    Explain,
    BackjumpLearn,
    Restart,
}

impl RuleName {
    pub const ALL: [RuleName; 10] = [
        RuleName::Decide,
        RuleName::UnitPropagate,
        RuleName::Backtrack,
        RuleName::Backjump,
        RuleName::Learn,
        RuleName::Forget,
        RuleName::Conflict,
        RuleName::Explain,
        RuleName::BackjumpLearn,
        RuleName::Restart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Decide => "decide",
            RuleName::UnitPropagate => "unitPropagate",
            RuleName::Backtrack => "backtrack",
            RuleName::Backjump => "backjump",
            RuleName::Learn => "learn",
            RuleName::Forget => "forget",
            RuleName::Conflict => "conflict",
            RuleName::Explain => "explain",
            RuleName::BackjumpLearn => "backjumpLearn",
            RuleName::Restart => "restart",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleName {
    type Err = String;

    fn from_str(s: &str) -> Result<RuleName, String> {
        RuleName::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// A rule together with the witnesses of its existential quantifiers.
///
/// `clause` on `backjump` (in →c) and on `backjumpLearn` is optional: the
/// rule acts on the conflict-analysis clause `C`, and a recorded clause must
/// be set-equal to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleInstance {
    Decide { lit: Literal },
    UnitPropagate { clause: Clause, lit: Literal },
    Backtrack,
    Backjump { clause: Option<Clause>, lit: Literal, level: usize },
    Learn { clause: Option<Clause> },
    /// In →l exactly one clause, whose first occurrence is removed; in the
    /// five-tuple systems the set `Fc`.
    Forget { clauses: Vec<Clause> },
    Conflict { clause: Clause },
    Explain { lit: Literal, clause: Clause },
    BackjumpLearn { clause: Option<Clause>, lit: Literal, level: usize },
    Restart,
}

impl RuleInstance {
    pub fn name(&self) -> RuleName {
        match self {
            RuleInstance::Decide { .. } => RuleName::Decide,
            RuleInstance::UnitPropagate { .. } => RuleName::UnitPropagate,
            RuleInstance::Backtrack => RuleName::Backtrack,
            RuleInstance::Backjump { .. } => RuleName::Backjump,
            RuleInstance::Learn { .. } => RuleName::Learn,
            RuleInstance::Forget { .. } => RuleName::Forget,
            RuleInstance::Conflict { .. } => RuleName::Conflict,
            RuleInstance::Explain { .. } => RuleName::Explain,
            RuleInstance::BackjumpLearn { .. } => RuleName::BackjumpLearn,
            RuleInstance::Restart => RuleName::Restart,
        }
    }

    pub fn decide(lit: i32) -> RuleInstance {
        RuleInstance::Decide { lit: lit_of(lit) }
    }

    pub fn unit_propagate(clause: &[i32], lit: i32) -> RuleInstance {
        RuleInstance::UnitPropagate { clause: clause_of(clause), lit: lit_of(lit) }
    }

    pub fn backjump(clause: &[i32], lit: i32, level: usize) -> RuleInstance {
        RuleInstance::Backjump { clause: Some(clause_of(clause)), lit: lit_of(lit), level }
    }

    pub fn learn(clause: &[i32]) -> RuleInstance {
        RuleInstance::Learn { clause: Some(clause_of(clause)) }
    }

    pub fn forget(clauses: &[&[i32]]) -> RuleInstance {
        RuleInstance::Forget { clauses: clauses.iter().map(|c| clause_of(c)).collect() }
    }

    pub fn conflict(clause: &[i32]) -> RuleInstance {
        RuleInstance::Conflict { clause: clause_of(clause) }
    }

    pub fn explain(lit: i32, clause: &[i32]) -> RuleInstance {
        RuleInstance::Explain { lit: lit_of(lit), clause: clause_of(clause) }
    }

    pub fn backjump_learn(lit: i32, level: usize) -> RuleInstance {
        RuleInstance::BackjumpLearn { clause: None, lit: lit_of(lit), level }
    }
}

/// Test and fixture shorthand; panics on 0.
fn lit_of(v: i32) -> Literal {
    Literal::from_dimacs(v).expect("non-zero literal")
}

fn clause_of(v: &[i32]) -> Clause {
    Clause::from_dimacs(v).expect("non-zero literals")
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self {
            RuleInstance::Decide { lit } => write!(f, " (l = {lit})"),
            RuleInstance::UnitPropagate { clause, lit } => write!(f, " (c = {clause}, l = {lit})"),
            RuleInstance::Backtrack | RuleInstance::Restart => Ok(()),
            RuleInstance::Backjump { clause, lit, level }
            | RuleInstance::BackjumpLearn { clause, lit, level } => match clause {
                Some(c) => write!(f, " (c = {c}, l = {lit}, level = {level})"),
                None => write!(f, " (l = {lit}, level = {level})"),
            },
            RuleInstance::Learn { clause } => match clause {
                Some(c) => write!(f, " (c = {c})"),
                None => Ok(()),
            },
            RuleInstance::Forget { clauses } => {
                f.write_str(" (")?;
                for (i, c) in clauses.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            RuleInstance::Conflict { clause } => write!(f, " (c = {clause})"),
            RuleInstance::Explain { lit, clause } => write!(f, " (l = {lit}, c = {clause})"),
        }
    }
}

/// The guard conjunct a rejected step violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guard {
    RuleInSystem,
    DecVar,
    LiteralUndefined,
    NoUnitClause,
    ClauseInFormula,
    IsUnit,
    VarInVars,
    VarsWithinVars,
    FormulaFalse,
    HasDecisions,
    LevelBelowCurrent,
    ConflictUnset,
    ConflictSet,
    ClauseFalse,
    LiteralInC,
    IsReason,
    IsBackjumpLevel,
    IsMinimalBackjumpLevel,
    NotYetLearnt,
    MatchesC,
    Entailed,
    Redundant,
    LearntSinceLast,
    OnlyLearnt,
    NotAReason,
    SingleClause,
}

impl Guard {
    pub fn name(self) -> &'static str {
        match self {
            Guard::RuleInSystem => "rule belongs to the system",
            Guard::DecVar => "var l ∈ DecVars",
            Guard::LiteralUndefined => "l ∉ M ∧ opposite l ∉ M",
            Guard::NoUnitClause => "no unit clause",
            Guard::ClauseInFormula => "c ∈ F",
            Guard::IsUnit => "isUnit",
            Guard::VarInVars => "var l ∈ Vars",
            Guard::VarsWithinVars => "vars c ⊆ Vars",
            Guard::FormulaFalse => "M ⊨¬ F",
            Guard::HasDecisions => "decisions M ≠ []",
            Guard::LevelBelowCurrent => "level < currentLevel M",
            Guard::ConflictUnset => "cflct = ⊥",
            Guard::ConflictSet => "cflct = ⊤",
            Guard::ClauseFalse => "M ⊨¬ c",
            Guard::LiteralInC => "l ∈ C",
            Guard::IsReason => "isReason",
            Guard::IsBackjumpLevel => "isBackjumpLevel",
            Guard::IsMinimalBackjumpLevel => "isMinimalBackjumpLevel",
            Guard::NotYetLearnt => "C ∉ F",
            Guard::MatchesC => "c = C",
            Guard::Entailed => "F ⊨ c",
            Guard::Redundant => "F ∖ c ⊨ c",
            Guard::LearntSinceLast => "lnt = ⊤",
            Guard::OnlyLearnt => "Fc ⊆ Fl",
            Guard::NotAReason => "no clause of Fc is a reason",
            Guard::SingleClause => "exactly one clause",
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rejected {rule} step: guard `{guard}` does not hold")]
    Rejected { rule: RuleName, guard: Guard },
    #[error("{rule} step: uncertifiable entailment of {clause}: {reason}")]
    Uncertifiable { rule: RuleName, clause: Clause, reason: OracleError },
}

impl RuleError {
    pub fn guard(&self) -> Option<Guard> {
        match self {
            RuleError::Rejected { guard, .. } => Some(*guard),
            RuleError::Uncertifiable { .. } => None,
        }
    }
}

/// Solver parameters shared by every state of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Branching variables; `None` means the variables of `F0`.
    pub dec_vars: Option<VarSet>,
    /// Largest variable count the oracle may enumerate.
    pub oracle_budget: usize,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig { dec_vars: None, oracle_budget: DEFAULT_VAR_BUDGET }
    }
}

impl SolverConfig {
    pub fn with_dec_vars(dec_vars: VarSet) -> SolverConfig {
        SolverConfig { dec_vars: Some(dec_vars), ..SolverConfig::default() }
    }
}

/// Everything a rule application may consult besides the state: the system,
/// `F0`, `DecVars`, `Vars`, the oracle budget and the clauses already known to
/// be entailed by `F0`.
#[derive(Debug, Clone)]
pub struct Context {
    pub system: System,
    f0: Formula,
    dec_vars: VarSet,
    vars: VarSet,
    oracle_budget: usize,
    certified: HashSet<Vec<Literal>>,
    certified_list: Vec<Clause>,
}

impl Context {
    pub fn new(system: System, f0: Formula, config: &SolverConfig) -> Context {
        let dec_vars = config.dec_vars.clone().unwrap_or_else(|| f0.vars());
        let mut vars = f0.vars();
        vars.extend(dec_vars.iter().copied());
        Context {
            system,
            f0,
            dec_vars,
            vars,
            oracle_budget: config.oracle_budget,
            certified: HashSet::new(),
            certified_list: Vec::new(),
        }
    }

    pub fn f0(&self) -> &Formula {
        &self.f0
    }

    pub fn dec_vars(&self) -> &VarSet {
        &self.dec_vars
    }

    /// `vars F0 ∪ DecVars`
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn oracle_budget(&self) -> usize {
        self.oracle_budget
    }

    pub fn max_var(&self) -> u32 {
        self.vars.iter().next_back().copied().unwrap_or(0)
    }

    /// Records `c` as entailed by `F0` without checking. Callers vouch for
    /// it, e.g. because `c` was derived by resolution from entailed clauses.
    pub fn certify(&mut self, c: &Clause) {
        if self.certified.insert(c.normalized()) {
            self.certified_list.push(c.clone());
        }
    }

    pub fn is_certified(&self, c: &Clause) -> bool {
        self.certified.contains(&c.normalized())
    }

    /// Certified clauses in the order they were added.
    pub fn certified_clauses(&self) -> &[Clause] {
        &self.certified_list
    }
}
