//! The solver's assignment stack.
//!
//! A [`Trail`] is a list of `(literal, is_decision)` entries. Besides the
//! entries it keeps a first-occurrence index per literal and the decision
//! level of every entry, so membership, `level` and `prefix_to_level` are
//! O(1) or O(log n) instead of list scans. The index is derived data; two
//! trails are equal iff their entry lists are equal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, HasVars, Literal, Valuation, VarSet};
use crate::error::CnfError;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrailEntry {
    pub literal: Literal,
    pub decision: bool,
}

impl TrailEntry {
    pub fn decision(literal: Literal) -> TrailEntry {
        TrailEntry { literal, decision: true }
    }

    pub fn implied(literal: Literal) -> TrailEntry {
        TrailEntry { literal, decision: false }
    }
}

impl fmt::Debug for TrailEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TrailEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.decision {
            write!(f, "{}•", self.literal)
        } else {
            write!(f, "{}", self.literal)
        }
    }
}

#[derive(Clone, Default)]
pub struct Trail {
    entries: Vec<TrailEntry>,
    /// decision level of `entries[i]`
    levels: Vec<u32>,
    /// first position of each literal, indexed by `Literal::code`
    first: Vec<u32>,
    /// entries whose literal already occurred earlier
    duplicates: usize,
    /// first occurrences whose opposite occurred earlier
    clashes: usize,
}

impl PartialEq for Trail {
    fn eq(&self, other: &Trail) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Trail {}

impl std::hash::Hash for Trail {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl Trail {
    pub fn new() -> Trail {
        Trail::default()
    }

    pub fn from_entries<I: IntoIterator<Item = TrailEntry>>(entries: I) -> Trail {
        let mut t = Trail::new();
        for e in entries {
            t.push(e);
        }
        t
    }

    /// Builds a trail from DIMACS integers; `decisions` lists the literals
    /// (as integers) flagged as decisions.
    pub fn from_dimacs(lits: &[i32], decisions: &[i32]) -> Result<Trail, CnfError> {
        let mut t = Trail::new();
        for &v in lits {
            let l = Literal::from_dimacs(v)?;
            t.push(TrailEntry { literal: l, decision: decisions.contains(&v) });
        }
        Ok(t)
    }

    pub fn entries(&self) -> &[TrailEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.entries.iter().map(|e| e.literal)
    }

    /// The underlying literal list as a valuation.
    pub fn elements(&self) -> Valuation {
        Valuation(self.literals().collect())
    }

    fn first_of(&self, l: Literal) -> Option<usize> {
        match self.first.get(l.code()) {
            Some(&p) if p != ABSENT => Some(p as usize),
            _ => None,
        }
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.first_of(l).is_some()
    }

    /// Neither `l` nor its opposite occurs.
    pub fn is_undefined(&self, l: Literal) -> bool {
        !self.contains(l) && !self.contains(l.opposite())
    }

    pub fn push(&mut self, e: TrailEntry) {
        let idx = self.entries.len();
        let code = e.literal.code();
        if self.first.len() <= code + 1 {
            self.first.resize((code + 2).next_power_of_two(), ABSENT);
        }
        if self.first[code] != ABSENT {
            self.duplicates += 1;
        } else {
            self.first[code] = idx as u32;
            if self.contains(e.literal.opposite()) {
                self.clashes += 1;
            }
        }
        let prev = self.levels.last().copied().unwrap_or(0);
        self.levels.push(prev + u32::from(e.decision));
        self.entries.push(e);
    }

    pub fn push_decision(&mut self, l: Literal) {
        self.push(TrailEntry::decision(l));
    }

    pub fn push_implied(&mut self, l: Literal) {
        self.push(TrailEntry::implied(l));
    }

    pub fn pop(&mut self) -> Option<TrailEntry> {
        let e = self.entries.pop()?;
        self.levels.pop();
        let idx = self.entries.len();
        let code = e.literal.code();
        if self.first[code] as usize == idx {
            self.first[code] = ABSENT;
            if self.contains(e.literal.opposite()) {
                self.clashes -= 1;
            }
        } else {
            self.duplicates -= 1;
        }
        Some(e)
    }

    pub fn truncate(&mut self, len: usize) {
        while self.entries.len() > len {
            self.pop();
        }
    }

    /// Index of the first occurrence of `l`.
    pub fn position(&self, l: Literal) -> Option<usize> {
        self.first_of(l)
    }

    pub fn is_consistent(&self) -> bool {
        self.clashes == 0
    }

    pub fn is_distinct(&self) -> bool {
        self.duplicates == 0
    }

    /// Decision literals, in trail order.
    pub fn decisions(&self) -> Vec<Literal> {
        self.entries.iter().filter(|e| e.decision).map(|e| e.literal).collect()
    }

    pub fn current_level(&self) -> usize {
        self.levels.last().copied().unwrap_or(0) as usize
    }

    pub fn last_decision(&self) -> Result<Literal, CnfError> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.decision)
            .map(|e| e.literal)
            .ok_or(CnfError::NoDecision)
    }

    /// Decision level of the entry at `idx`.
    pub fn level_at(&self, idx: usize) -> usize {
        self.levels[idx] as usize
    }

    /// Number of decisions up to and including the first occurrence of `l`.
    pub fn level(&self, l: Literal) -> Result<usize, CnfError> {
        self.first_of(l)
            .map(|p| self.levels[p] as usize)
            .ok_or(CnfError::LiteralNotInTrail(l))
    }

    /// Decision literals up to and including the first occurrence of `l`.
    pub fn decisions_to(&self, l: Literal) -> Result<Vec<Literal>, CnfError> {
        let p = self.first_of(l).ok_or(CnfError::LiteralNotInTrail(l))?;
        Ok(self.entries[..=p].iter().filter(|e| e.decision).map(|e| e.literal).collect())
    }

    /// Length of the maximal prefix whose entries have level `<= level`.
    pub fn prefix_len_to_level(&self, level: usize) -> usize {
        self.levels.partition_point(|&lv| lv as usize <= level)
    }

    pub fn prefix(&self, len: usize) -> Trail {
        Trail::from_entries(self.entries[..len.min(self.len())].iter().copied())
    }

    pub fn prefix_to_level(&self, level: usize) -> Trail {
        self.prefix(self.prefix_len_to_level(level))
    }

    /// The entries strictly before the last decision; the whole trail when
    /// there is no decision.
    pub fn prefix_before_last_decision(&self) -> Trail {
        match self.entries.iter().rposition(|e| e.decision) {
            Some(p) => self.prefix(p),
            None => self.clone(),
        }
    }

    /// The literal of `c` occurring in the trail with the greatest first
    /// position.
    pub fn last_asserted_literal(&self, c: &[Literal]) -> Result<Literal, CnfError> {
        c.iter()
            .filter_map(|&l| self.first_of(l).map(|p| (p, l)))
            .max_by_key(|&(p, _)| p)
            .map(|(_, l)| l)
            .ok_or(CnfError::NoClauseLiteralInTrail)
    }

    /// Maximum level over the literals of `c` that occur in the trail.
    pub fn max_level(&self, c: &[Literal]) -> Result<usize, CnfError> {
        c.iter()
            .filter_map(|&l| self.first_of(l).map(|p| self.levels[p] as usize))
            .max()
            .ok_or(CnfError::NoClauseLiteralInTrail)
    }

    /// Length of the longest common prefix of the two entry lists.
    pub fn common_prefix_len(&self, other: &Trail) -> usize {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn vars_within(&self, vars: &VarSet) -> bool {
        self.literals().all(|l| vars.contains(&l.var()))
    }
}

impl Assignment for Trail {
    fn holds(&self, l: Literal) -> bool {
        self.contains(l)
    }

    fn position(&self, l: Literal) -> Option<usize> {
        self.first_of(l)
    }

    fn literal_list(&self) -> Vec<Literal> {
        self.literals().collect()
    }
}

impl HasVars for Trail {
    fn vars(&self) -> VarSet {
        self.literals().map(|l| l.var()).collect()
    }
}

impl fmt::Debug for Trail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Trail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for Trail {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trail {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Trail, D::Error> {
        Vec::<TrailEntry>::deserialize(d).map(Trail::from_entries)
    }
}
