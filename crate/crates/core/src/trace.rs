//! Rule-application traces: a JSON-lines format, a replaying verifier and
//! the worked examples as fixtures.
//!
//! A trace file starts with a header record
//! `{"format":"satt","version":1,"system":…,"dec_vars":[…],"f0_sha256":…}`
//! followed by one step record per line, e.g.
//! `{"rule":"unitPropagate","clause":[-1,2],"lit":2}`. The digest is the
//! SHA-256 of `F0` written one clause per line as `lit … 0\n`.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{Clause, Formula, HasVars, Literal, VarSet};
use crate::engine::TraceSink;
use crate::error::CnfError;
use crate::orderings::{check_step, CertifyError, CheckMode, Snapshot, StepReport};
use crate::rules::{Context, Outcome, RuleInstance, RuleName, SolverConfig, State, System};

mod fixtures;

pub use fixtures::{cycle_formula, example_formula, fixture, fixtures, Fixture};

pub const FORMAT: &str = "satt";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty trace: the header record is missing")]
    MissingHeader,
    #[error("unsupported trace format {format} version {version}")]
    Version { format: String, version: u32 },
    #[error("the trace was recorded for a different formula (digest {found}, expected {expected})")]
    DigestMismatch { found: String, expected: String },
    #[error("the trace branches on {found:?} but the configuration fixes {expected:?}")]
    DecVarsMismatch { found: Vec<u32>, expected: Vec<u32> },
}

/// SHA-256 of the clause list, one `lit … 0` line per clause.
pub fn f0_digest(f: &Formula) -> String {
    let mut h = Sha256::new();
    for c in f.iter() {
        for l in c.iter() {
            h.update(l.to_dimacs().to_string().as_bytes());
            h.update(b" ");
        }
        h.update(b"0\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord {
    format: String,
    version: u32,
    system: String,
    dec_vars: Vec<u32>,
    f0_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub system: System,
    pub dec_vars: VarSet,
    pub f0_sha256: String,
}

impl Header {
    pub fn new(system: System, dec_vars: VarSet, f0: &Formula) -> Header {
        Header { system, dec_vars, f0_sha256: f0_digest(f0) }
    }

    /// Header for a run over `f0` whose branching variables come from
    /// `config`.
    pub fn for_run(system: System, f0: &Formula, config: &SolverConfig) -> Header {
        let dec_vars = config.dec_vars.clone().unwrap_or_else(|| f0.vars());
        Header::new(system, dec_vars, f0)
    }

    pub fn emit(&self) -> String {
        let rec = HeaderRecord {
            format: FORMAT.into(),
            version: VERSION,
            system: self.system.name().into(),
            dec_vars: self.dec_vars.iter().copied().collect(),
            f0_sha256: self.f0_sha256.clone(),
        };
        serde_json::to_string(&rec).expect("header serializes")
    }

    fn parse(line: &str) -> Result<Header, TraceError> {
        let err = |message: String| TraceError::Parse { line: 1, message };
        let rec: HeaderRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if rec.format != FORMAT || rec.version != VERSION {
            return Err(TraceError::Version { format: rec.format, version: rec.version });
        }
        let system = rec.system.parse().map_err(err)?;
        if rec.dec_vars.contains(&0) {
            return Err(err("variable 0 in dec_vars".into()));
        }
        Ok(Header { system, dec_vars: rec.dec_vars.into_iter().collect(), f0_sha256: rec.f0_sha256 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRecord {
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clause: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lit: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forgotten: Option<Vec<Vec<i32>>>,
}

/// One step as a single JSON line (without the newline).
pub fn emit(r: &RuleInstance) -> String {
    let mut rec = StepRecord {
        rule: r.name().name().into(),
        clause: None,
        lit: None,
        level: None,
        forgotten: None,
    };
    match r {
        RuleInstance::Decide { lit } => rec.lit = Some(lit.to_dimacs()),
        RuleInstance::UnitPropagate { clause, lit } | RuleInstance::Explain { lit, clause } => {
            rec.clause = Some(clause.to_dimacs());
            rec.lit = Some(lit.to_dimacs());
        }
        RuleInstance::Backtrack | RuleInstance::Restart => {}
        RuleInstance::Backjump { clause, lit, level }
        | RuleInstance::BackjumpLearn { clause, lit, level } => {
            rec.clause = clause.as_ref().map(Clause::to_dimacs);
            rec.lit = Some(lit.to_dimacs());
            rec.level = Some(*level);
        }
        RuleInstance::Learn { clause } => rec.clause = clause.as_ref().map(Clause::to_dimacs),
        RuleInstance::Forget { clauses } => {
            rec.forgotten = Some(clauses.iter().map(Clause::to_dimacs).collect())
        }
        RuleInstance::Conflict { clause } => rec.clause = Some(clause.to_dimacs()),
    }
    serde_json::to_string(&rec).expect("step serializes")
}

/// Parses one step record.
pub fn parse_step(line: &str) -> Result<RuleInstance, String> {
    let rec: StepRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let rule: RuleName = rec.rule.parse()?;
    let lit_of = |v: i32| Literal::from_dimacs(v).map_err(|e: CnfError| e.to_string());
    let clause_of = |v: &[i32]| Clause::from_dimacs(v).map_err(|e: CnfError| e.to_string());
    let need_lit = || rec.lit.ok_or_else(|| format!("{rule} needs `lit`")).and_then(lit_of);
    let need_clause = || {
        rec.clause.as_deref().ok_or_else(|| format!("{rule} needs `clause`")).and_then(clause_of)
    };
    let opt_clause = || rec.clause.as_deref().map(clause_of).transpose();
    let need_level = || rec.level.ok_or_else(|| format!("{rule} needs `level`"));

    let allowed: &[&str] = match rule {
        RuleName::Decide => &["lit"],
        RuleName::UnitPropagate | RuleName::Explain => &["clause", "lit"],
        RuleName::Backtrack | RuleName::Restart => &[],
        RuleName::Backjump | RuleName::BackjumpLearn => &["clause", "lit", "level"],
        RuleName::Learn | RuleName::Conflict => &["clause"],
        RuleName::Forget => &["forgotten"],
    };
    let present = [
        ("clause", rec.clause.is_some()),
        ("lit", rec.lit.is_some()),
        ("level", rec.level.is_some()),
        ("forgotten", rec.forgotten.is_some()),
    ];
    if let Some((field, _)) = present.iter().find(|(f, p)| *p && !allowed.contains(f)) {
        return Err(format!("{rule} takes no `{field}`"));
    }

    Ok(match rule {
        RuleName::Decide => RuleInstance::Decide { lit: need_lit()? },
        RuleName::UnitPropagate => {
            RuleInstance::UnitPropagate { clause: need_clause()?, lit: need_lit()? }
        }
        RuleName::Explain => RuleInstance::Explain { lit: need_lit()?, clause: need_clause()? },
        RuleName::Backtrack => RuleInstance::Backtrack,
        RuleName::Restart => RuleInstance::Restart,
        RuleName::Backjump => {
            RuleInstance::Backjump { clause: opt_clause()?, lit: need_lit()?, level: need_level()? }
        }
        RuleName::BackjumpLearn => RuleInstance::BackjumpLearn {
            clause: opt_clause()?,
            lit: need_lit()?,
            level: need_level()?,
        },
        RuleName::Learn => RuleInstance::Learn { clause: opt_clause()? },
        RuleName::Conflict => RuleInstance::Conflict { clause: need_clause()? },
        RuleName::Forget => {
            let cs = rec.forgotten.as_ref().ok_or("forget needs `forgotten`")?;
            RuleInstance::Forget {
                clauses: cs.iter().map(|c| clause_of(c)).collect::<Result<_, _>>()?,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub header: Header,
    pub steps: Vec<RuleInstance>,
}

impl TraceFile {
    pub fn parse(text: &str) -> Result<TraceFile, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TraceError::MissingHeader)?;
        let header = Header::parse(first)?;
        let steps = lines
            .map(|(i, l)| parse_step(l).map_err(|message| TraceError::Parse { line: i + 1, message }))
            .collect::<Result<_, _>>()?;
        Ok(TraceFile { header, steps })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header.emit())?;
        for r in &self.steps {
            writeln!(w, "{}", emit(r))?;
        }
        Ok(())
    }
}

impl fmt::Display for TraceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header.emit())?;
        for r in &self.steps {
            writeln!(f, "{}", emit(r))?;
        }
        Ok(())
    }
}

/// Streams a run to a writer: the header at creation, then one line per
/// step. The first I/O error is kept and later steps are dropped.
pub struct TraceWriter<W: Write> {
    out: W,
    error: Option<io::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, header: &Header) -> io::Result<TraceWriter<W>> {
        writeln!(out, "{}", header.emit())?;
        Ok(TraceWriter { out, error: None })
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    fn step(&mut self, r: &RuleInstance, _: Option<&StepReport>) {
        if self.error.is_none() {
            if let Err(e) = writeln!(self.out, "{}", emit(r)) {
                self.error = Some(e);
            }
        }
    }
}

/// A step that failed to certify.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {index} ({step}): {reason}")]
pub struct Failure {
    pub index: usize,
    pub step: RuleInstance,
    pub reason: CertifyError,
}

/// Replays steps from the initial state, certifying each one.
#[derive(Debug, Clone)]
pub struct Verifier {
    ctx: Context,
    state: State,
    mode: CheckMode,
    index: usize,
}

impl Verifier {
    /// Checks the header against `f0` and `config`.
    pub fn new(
        f0: &Formula,
        config: &SolverConfig,
        header: &Header,
        mode: CheckMode,
    ) -> Result<Verifier, TraceError> {
        let digest = f0_digest(f0);
        if digest != header.f0_sha256 {
            return Err(TraceError::DigestMismatch {
                found: header.f0_sha256.clone(),
                expected: digest,
            });
        }
        if let Some(expected) = &config.dec_vars {
            if expected != &header.dec_vars {
                return Err(TraceError::DecVarsMismatch {
                    found: header.dec_vars.iter().copied().collect(),
                    expected: expected.iter().copied().collect(),
                });
            }
        }
        let config = SolverConfig { dec_vars: Some(header.dec_vars.clone()), ..config.clone() };
        let ctx = Context::new(header.system, f0.clone(), &config);
        let state = State::initial(&ctx);
        Ok(Verifier { ctx, state, mode, index: 0 })
    }

    /// Applies and certifies the next step; on failure the state is left
    /// as it was.
    pub fn step(&mut self, r: &RuleInstance) -> Result<StepReport, Failure> {
        let fail = |reason| Failure { index: self.index, step: r.clone(), reason };
        let snap = Snapshot::of(&self.state);
        let mut next = self.state.clone();
        next.apply(&mut self.ctx, r).map_err(|e| fail(e.into()))?;
        let report = check_step(&mut self.ctx, &snap, r, &next, self.mode).map_err(fail)?;
        self.state = next;
        self.index += 1;
        Ok(report)
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn classify(&self) -> Outcome {
        self.state.classify(&self.ctx)
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    /// `Ok` when every step certified.
    pub result: Result<(), Failure>,
    /// Steps certified before the first failure.
    pub certified: usize,
    /// The state after the certified steps.
    pub state: State,
    pub outcome: Outcome,
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        self.result.is_ok()
    }
}

/// Replays `trace` over `f0`, certifying each step, and classifies the
/// state reached.
pub fn verify_trace(
    f0: &Formula,
    config: &SolverConfig,
    trace: &TraceFile,
    mode: CheckMode,
) -> Result<Verification, TraceError> {
    let mut v = Verifier::new(f0, config, &trace.header, mode)?;
    let mut result = Ok(());
    for r in &trace.steps {
        if let Err(f) = v.step(r) {
            result = Err(f);
            break;
        }
    }
    Ok(Verification { result, certified: v.index, outcome: v.classify(), state: v.state })
}

#[cfg(test)]
mod tests;
