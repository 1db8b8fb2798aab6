//! Deterministic strategies driving the transition systems to an outcome.
//!
//! Every step the engine takes goes through [`State::apply`], so its guards
//! are checked like any other caller's. Rule priority: conflict, explain,
//! backjump (learning first in →c), unit propagation, restart or forget
//! when the policy asks for one, decide.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{resolvent, Clause, Formula, HasVars, Literal, Valuation, Var};
use crate::oracle::is_model;
use crate::orderings::{check_step, CertifyError, CheckMode, Snapshot, StepReport};
use crate::rules::{
    is_minimal_backjump_level, is_uip, Context, Outcome, RuleError, RuleInstance, SolverConfig,
    State, System,
};
use crate::trail::Trail;

/// Default cap on rule applications per run.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

/// The family of rules a strategy drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineSystem {
    Dpll,
    Backjump,
    Learn,
    Cdcl,
    Full,
}

impl EngineSystem {
    pub const ALL: [EngineSystem; 5] = [
        EngineSystem::Dpll,
        EngineSystem::Backjump,
        EngineSystem::Learn,
        EngineSystem::Cdcl,
        EngineSystem::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineSystem::Dpll => "dpll",
            EngineSystem::Backjump => "backjump",
            EngineSystem::Learn => "learn",
            EngineSystem::Cdcl => "cdcl",
            EngineSystem::Full => "full",
        }
    }
}

impl fmt::Display for EngineSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<EngineSystem, String> {
        EngineSystem::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown system `{s}` (expected dpll, backjump, learn, cdcl or full)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DecideOrder {
    /// smallest undefined variable, positive polarity
    #[default]
    Ascending,
    /// uniformly random undefined variable and polarity
    RandomSeeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RestartPolicy {
    #[default]
    None,
    EveryConflict,
    /// restart after `unit * luby(k)` conflicts
    Luby { unit: u64 },
    /// restart after `base * factor^k` conflicts
    Geometric { base: u64, factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForgetPolicy {
    #[default]
    None,
    /// Once more than `max_learnt` clauses are learnt, forget every
    /// forgettable one except the `keep_recent` newest.
    SizeThreshold { max_learnt: usize, keep_recent: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub system: EngineSystem,
    pub decide_order: DecideOrder,
    pub restart: RestartPolicy,
    pub forget: ForgetPolicy,
    pub step_budget: u64,
    /// Certify every step (invariants and measure) as it is taken.
    pub check: Option<CheckMode>,
}

impl Strategy {
    pub fn new(system: EngineSystem) -> Strategy {
        Strategy {
            system,
            decide_order: DecideOrder::Ascending,
            restart: RestartPolicy::None,
            forget: ForgetPolicy::None,
            step_budget: DEFAULT_STEP_BUDGET,
            check: None,
        }
    }

    pub fn with_restart(mut self, restart: RestartPolicy) -> Strategy {
        self.restart = restart;
        self
    }

    pub fn with_forget(mut self, forget: ForgetPolicy) -> Strategy {
        self.forget = forget;
        self
    }

    pub fn with_decide_order(mut self, order: DecideOrder) -> Strategy {
        self.decide_order = order;
        self
    }

    pub fn with_step_budget(mut self, budget: u64) -> Strategy {
        self.step_budget = budget;
        self
    }

    pub fn with_check(mut self, mode: CheckMode) -> Strategy {
        self.check = Some(mode);
        self
    }

    /// The transition system whose rules (and measure) the run follows.
    pub fn rule_system(&self) -> System {
        match self.system {
            EngineSystem::Dpll => System::Dpll,
            EngineSystem::Backjump => System::Backjump,
            EngineSystem::Learn => System::LearnForget,
            EngineSystem::Cdcl => System::Cdcl,
            EngineSystem::Full => match (self.restart, self.forget) {
                (_, ForgetPolicy::None) => System::NoForget,
                (RestartPolicy::None, _) => System::NoRestart,
                _ => System::Full,
            },
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let policies = self.restart != RestartPolicy::None || self.forget != ForgetPolicy::None;
        if policies && self.system != EngineSystem::Full {
            return Err(EngineError::Config(format!(
                "restart and forget policies need system full, not {}",
                self.system
            )));
        }
        match self.restart {
            RestartPolicy::Luby { unit: 0 } => {
                return Err(EngineError::Config("luby unit must be positive".into()))
            }
            RestartPolicy::Geometric { base, factor } if base == 0 || factor < 1.0 => {
                return Err(EngineError::Config(
                    "geometric restarts need base ≥ 1 and factor ≥ 1".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub steps: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub learnt: u64,
    pub restarts: u64,
    pub forgotten: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub verdict: Verdict,
    /// The final trail, on sat.
    pub model: Option<Valuation>,
    pub stats: Stats,
    pub system: System,
}

impl Answer {
    /// `Sat` with a model of `f`, or `Unsat`.
    pub fn model_checks(&self, f: &Formula) -> bool {
        match (&self.model, self.verdict) {
            (Some(m), Verdict::Sat) => is_model(m, f),
            (None, Verdict::Unsat) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("step budget of {budget} rule applications exhausted")]
    Budget { budget: u64, stats: Stats },
    #[error("invalid strategy: {0}")]
    Config(String),
    #[error("illegal step {step}: {source}")]
    IllegalStep { step: RuleInstance, source: RuleError },
    #[error("step {index} ({step}) failed certification: {source}")]
    Certification { index: u64, step: RuleInstance, source: CertifyError },
    #[error("no reason clause for {0}")]
    MissingReason(Literal),
    #[error("no backjump level: {0}")]
    NoBackjumpLevel(String),
}

/// Receives every step of a run, with its certification report when the
/// strategy asks for checking.
pub trait TraceSink {
    fn step(&mut self, r: &RuleInstance, report: Option<&StepReport>);
}

impl TraceSink for Vec<RuleInstance> {
    fn step(&mut self, r: &RuleInstance, _: Option<&StepReport>) {
        self.push(r.clone());
    }
}

impl TraceSink for Vec<(RuleInstance, Option<StepReport>)> {
    fn step(&mut self, r: &RuleInstance, report: Option<&StepReport>) {
        self.push((r.clone(), report.cloned()));
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, …; `i ≥ 1`.
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1, "the Luby sequence starts at 1");
    let mut i = i;
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// The level of a 1-UIP backjump: the highest level among the other
/// literals of `c`, 0 for a singleton. Requires `isUIP l c m` with `¬l`
/// above level 0.
pub fn minimal_backjump_level(c: &Clause, l: Literal, m: &Trail) -> Result<usize, EngineError> {
    let top = m.level(l.opposite()).unwrap_or(0);
    if !is_uip(l, c, m) || top == 0 {
        return Err(EngineError::NoBackjumpLevel(format!("{l} is not a UIP of {c} above level 0")));
    }
    let level = c
        .iter()
        .filter(|&&x| x != l)
        .map(|x| m.level(x.opposite()).expect("clause is false"))
        .max()
        .unwrap_or(0);
    debug_assert!(is_minimal_backjump_level(level, l, c, m));
    Ok(level)
}

/// The literal of `c` falsified last in `m`.
fn last_falsified(c: &Clause, m: &Trail) -> Option<Literal> {
    m.last_asserted_literal(&c.opposites()).ok().map(Literal::opposite)
}

/// One 1-UIP analysis step: `None` when `c` is empty or has a UIP above
/// level 0, else the literal to explain and its reason.
fn next_explain(
    c: &Clause,
    m: &Trail,
    reason_of: impl Fn(Literal) -> Option<Clause>,
) -> Result<Option<(Literal, Clause)>, EngineError> {
    if c.is_empty() {
        return Ok(None);
    }
    let l = last_falsified(c, m).ok_or(EngineError::MissingReason(c.literals()[0]))?;
    if is_uip(l, c, m) && m.level(l.opposite()).unwrap_or(0) > 0 {
        return Ok(None);
    }
    let reason = reason_of(l.opposite()).ok_or(EngineError::MissingReason(l.opposite()))?;
    Ok(Some((l, reason)))
}

/// The explain steps of 1-UIP conflict analysis from a state with
/// `cflct = ⊤`, taking for each literal the first member clause that is its
/// reason.
pub fn analyze_conflict(s: &State) -> Result<Vec<RuleInstance>, EngineError> {
    let m = s.trail();
    let mut c = s.conflict_clause().clone();
    let mut out = Vec::new();
    while let Some((l, reason)) = next_explain(&c, m, |x| s.reasons_for(x).into_iter().next())? {
        c = resolvent(&c, &reason, l);
        out.push(RuleInstance::Explain { lit: l, clause: reason });
    }
    Ok(out)
}

/// Applies unit propagation in clause order until no clause is unit or some
/// clause is false; returns the steps taken.
pub fn propagate_exhaustively(
    ctx: &mut Context,
    s: &mut State,
) -> Result<Vec<RuleInstance>, RuleError> {
    let mut out = Vec::new();
    while !s.formula_false() {
        let Some((clause, lit)) = s.first_unit() else { break };
        let r = RuleInstance::UnitPropagate { clause, lit };
        s.apply(ctx, &r)?;
        out.push(r);
    }
    Ok(out)
}

struct Run<'a> {
    ctx: Context,
    s: State,
    /// reason clause of each trail entry, for implied literals
    reasons: Vec<Option<Clause>>,
    strategy: &'a Strategy,
    sink: Option<&'a mut dyn TraceSink>,
    stats: Stats,
    rng: Option<ChaCha8Rng>,
    conflicts_since_restart: u64,
    restarts_done: u64,
}

impl Run<'_> {
    fn take(&mut self, r: RuleInstance) -> Result<(), EngineError> {
        if self.stats.steps >= self.strategy.step_budget {
            return Err(EngineError::Budget { budget: self.strategy.step_budget, stats: self.stats });
        }
        let snap = self.strategy.check.map(|_| Snapshot::of(&self.s));
        let keep = match &r {
            RuleInstance::Backtrack => self.s.trail().prefix_before_last_decision().len(),
            RuleInstance::Backjump { level, .. } | RuleInstance::BackjumpLearn { level, .. } => {
                self.s.trail().prefix_len_to_level(*level)
            }
            RuleInstance::Restart => self.s.trail().prefix_len_to_level(0),
            _ => self.s.trail().len(),
        };
        let conflict = self.s.conflict_clause().clone();
        if let Err(source) = self.s.apply(&mut self.ctx, &r) {
            return Err(EngineError::IllegalStep { step: r, source });
        }
        self.reasons.truncate(keep);
        match &r {
            RuleInstance::Decide { .. } => {
                self.reasons.push(None);
                self.stats.decisions += 1;
            }
            RuleInstance::UnitPropagate { clause, .. } => {
                self.reasons.push(Some(clause.clone()));
                self.stats.propagations += 1;
            }
            RuleInstance::Backtrack => self.reasons.push(None),
            RuleInstance::Backjump { clause, .. } => {
                self.reasons.push(Some(clause.clone().unwrap_or(conflict)));
            }
            RuleInstance::BackjumpLearn { .. } => {
                self.reasons.push(Some(conflict));
                self.stats.learnt += 1;
            }
            RuleInstance::Learn { .. } => self.stats.learnt += 1,
            RuleInstance::Conflict { .. } => self.stats.conflicts += 1,
            RuleInstance::Restart => {
                self.stats.restarts += 1;
                self.restarts_done += 1;
                self.conflicts_since_restart = 0;
            }
            RuleInstance::Forget { clauses } => self.stats.forgotten += clauses.len() as u64,
            RuleInstance::Explain { .. } => {}
        }
        debug_assert_eq!(self.reasons.len(), self.s.trail().len());
        let report = match (snap, self.strategy.check) {
            (Some(snap), Some(mode)) => {
                match check_step(&mut self.ctx, &snap, &r, &self.s, mode) {
                    Ok(report) => Some(report),
                    Err(source) => {
                        return Err(EngineError::Certification {
                            index: self.stats.steps,
                            step: r,
                            source,
                        })
                    }
                }
            }
            _ => None,
        };
        self.stats.steps += 1;
        if let Some(sink) = self.sink.as_deref_mut() {
            sink.step(&r, report.as_ref());
        }
        Ok(())
    }

    fn reason_of(&self, l: Literal) -> Option<Clause> {
        let p = self.s.trail().position(l)?;
        self.reasons[p].clone()
    }

    fn decision(&mut self) -> Option<Literal> {
        match self.rng.as_mut() {
            None => self.s.first_undefined_dec_var(&self.ctx).map(Literal::pos),
            Some(rng) => {
                let m = self.s.trail();
                let open: Vec<Var> = self
                    .ctx
                    .dec_vars()
                    .iter()
                    .copied()
                    .filter(|&v| m.is_undefined(Literal::pos(v)))
                    .collect();
                let &v = open.choose(rng)?;
                Some(Literal::new(v, rng.gen_bool(0.5)))
            }
        }
    }

    fn finish(&self, verdict: Verdict) -> Answer {
        let model = (verdict == Verdict::Sat).then(|| self.s.trail().elements());
        Answer { verdict, model, stats: self.stats, system: self.ctx.system }
    }

    /// 1-UIP clause of the current conflict, from the reasons recorded on
    /// the trail.
    fn learn_uip(&self, conflict: Clause) -> Result<(Clause, Literal, usize), EngineError> {
        let m = self.s.trail();
        let mut c = conflict;
        while let Some((l, reason)) = next_explain(&c, m, |x| self.reason_of(x))? {
            c = resolvent(&c, &reason, l);
        }
        let l = last_falsified(&c, m)
            .ok_or_else(|| EngineError::NoBackjumpLevel("conflict analysis reached []".into()))?;
        let level = minimal_backjump_level(&c, l, m)?;
        Ok((c, l, level))
    }

    fn run_two_tuple(&mut self) -> Result<Answer, EngineError> {
        let sys = self.ctx.system;
        loop {
            if let Some(conflict) = self.s.first_false() {
                if self.s.trail().decisions().is_empty() {
                    return Ok(self.finish(Verdict::Unsat));
                }
                if sys == System::Dpll {
                    self.take(RuleInstance::Backtrack)?;
                    continue;
                }
                self.stats.conflicts += 1;
                let (c, lit, level) = self.learn_uip(conflict)?;
                self.ctx.certify(&c);
                self.take(RuleInstance::Backjump { clause: Some(c.clone()), lit, level })?;
                if sys == System::LearnForget && !self.s.contains_clause_set(&c) {
                    self.take(RuleInstance::Learn { clause: Some(c) })?;
                }
            } else if let Some((clause, lit)) = self.s.first_unit() {
                self.take(RuleInstance::UnitPropagate { clause, lit })?;
            } else if let Some(lit) = self.decision() {
                self.take(RuleInstance::Decide { lit })?;
            } else {
                return Ok(self.finish(Verdict::Sat));
            }
        }
    }

    fn restart_due(&self) -> bool {
        let n = self.conflicts_since_restart;
        match self.strategy.restart {
            RestartPolicy::None => false,
            RestartPolicy::EveryConflict => n >= 1,
            RestartPolicy::Luby { unit } => n >= unit * luby(self.restarts_done + 1),
            RestartPolicy::Geometric { base, factor } => {
                n as f64 >= base as f64 * factor.powi(self.restarts_done.min(i32::MAX as u64) as i32)
            }
        }
    }

    fn forget_set(&self) -> Option<Vec<Clause>> {
        let ForgetPolicy::SizeThreshold { max_learnt, keep_recent } = self.strategy.forget else {
            return None;
        };
        let fl = self.s.formula();
        if fl.len() <= max_learnt {
            return None;
        }
        let cut = fl.len().saturating_sub(keep_recent);
        let kept = &fl.clauses()[cut..];
        let m = self.s.trail();
        let mut out: Vec<Clause> = Vec::new();
        for c in &fl.clauses()[..cut] {
            if out.contains(c) || kept.contains(c) {
                continue;
            }
            let is_reason = c.iter().any(|&l| {
                m.position(l).is_some_and(|p| self.reasons[p].as_ref() == Some(c))
                    || (m.contains(l) && crate::cnf::is_reason(c, l, m))
            });
            if !is_reason {
                out.push(c.clone());
            }
        }
        (!out.is_empty()).then_some(out)
    }

    fn run_conflict_analysis(&mut self) -> Result<Answer, EngineError> {
        let five = self.ctx.system.is_five_tuple();
        loop {
            if self.s.cflct() {
                let c = self.s.conflict_clause().clone();
                if c.is_empty() {
                    return Ok(self.finish(Verdict::Unsat));
                }
                if let Some((lit, clause)) = next_explain(&c, self.s.trail(), |x| self.reason_of(x))? {
                    self.take(RuleInstance::Explain { lit, clause })?;
                    continue;
                }
                let lit = last_falsified(&c, self.s.trail()).expect("non-empty false clause");
                let level = minimal_backjump_level(&c, lit, self.s.trail())?;
                if five {
                    self.take(RuleInstance::BackjumpLearn { clause: Some(c), lit, level })?;
                    self.conflicts_since_restart += 1;
                } else {
                    if !self.s.contains_clause_set(&c) {
                        self.take(RuleInstance::Learn { clause: Some(c.clone()) })?;
                    }
                    self.take(RuleInstance::Backjump { clause: Some(c), lit, level })?;
                }
            } else if let Some(clause) = self.s.first_false() {
                self.take(RuleInstance::Conflict { clause })?;
            } else if let Some((clause, lit)) = self.s.first_unit() {
                self.take(RuleInstance::UnitPropagate { clause, lit })?;
            } else if five && self.s.lnt() && self.restart_due() {
                self.take(RuleInstance::Restart)?;
            } else if let Some(clauses) = self.forget_set().filter(|_| five && self.s.lnt()) {
                self.take(RuleInstance::Forget { clauses })?;
            } else if let Some(lit) = self.decision() {
                self.take(RuleInstance::Decide { lit })?;
            } else {
                return Ok(self.finish(Verdict::Sat));
            }
        }
    }
}

/// Runs `strategy` on `f0` to an accepting or rejecting state.
pub fn solve(f0: &Formula, config: &SolverConfig, strategy: &Strategy) -> Result<Answer, EngineError> {
    solve_traced(f0, config, strategy, None)
}

/// [`solve`], reporting each step to `sink`.
pub fn solve_traced<'a>(
    f0: &Formula,
    config: &SolverConfig,
    strategy: &'a Strategy,
    sink: Option<&'a mut dyn TraceSink>,
) -> Result<Answer, EngineError> {
    strategy.validate()?;
    let ctx = Context::new(strategy.rule_system(), f0.clone(), config);
    let s = State::initial(&ctx);
    let rng = match strategy.decide_order {
        DecideOrder::Ascending => None,
        DecideOrder::RandomSeeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut run = Run {
        ctx,
        s,
        reasons: Vec::new(),
        strategy,
        sink,
        stats: Stats::default(),
        rng,
        conflicts_since_restart: 0,
        restarts_done: 0,
    };
    let answer = if run.ctx.system.has_conflict_analysis() {
        run.run_conflict_analysis()?
    } else {
        run.run_two_tuple()?
    };
    debug_assert_ne!(run.s.classify(&run.ctx), Outcome::Intermediate);
    Ok(answer)
}

/// `vars F0 ∪ {1..declared}`, the default branching variables for a
/// formula read with a declared variable count.
pub fn default_dec_vars(f0: &Formula, declared: u32) -> crate::cnf::VarSet {
    let mut vars = f0.vars();
    vars.extend(1..=declared);
    vars
}
