//! Incremental clause status for the clauses a state's guards range over.
//!
//! Each clause gets a stable id in list order. For every clause the index
//! keeps how many of its distinct literals are true and false in the trail,
//! updated through occurrence lists as literals enter and leave the trail.
//! Unit and false clauses are kept in ordered sets, so "smallest index"
//! queries are a `first()` away. The counts are exact for any trail, but the
//! unit/false classification only matches the list semantics on consistent
//! trails; callers fall back to scanning otherwise.

use std::collections::{BTreeSet, HashMap};

use crate::cnf::{Clause, Literal, VarSet};
use crate::trail::Trail;

#[derive(Debug, Clone)]
struct Slot {
    clause: Clause,
    /// distinct literals of the clause
    lits: Box<[Literal]>,
    n_true: u32,
    n_false: u32,
}

impl Slot {
    fn is_false(&self) -> bool {
        self.n_false as usize == self.lits.len()
    }

    fn is_unit(&self) -> bool {
        self.n_true == 0 && self.n_false as usize + 1 == self.lits.len()
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ClauseIndex {
    slots: Vec<Option<Slot>>,
    /// live ids in list order
    order: Vec<u32>,
    occ: Vec<Vec<u32>>,
    units: BTreeSet<u32>,
    falsified: BTreeSet<u32>,
    exact: HashMap<Clause, u32>,
    sets: HashMap<Vec<Literal>, u32>,
    /// live clauses mentioning a variable outside `Vars`
    outside: usize,
}

impl ClauseIndex {
    pub fn new() -> ClauseIndex {
        ClauseIndex::default()
    }

    fn occ_mut(&mut self, l: Literal) -> &mut Vec<u32> {
        let code = l.code();
        if self.occ.len() <= code + 1 {
            self.occ.resize((code + 2).next_power_of_two(), Vec::new());
        }
        &mut self.occ[code]
    }

    fn occ(&self, l: Literal) -> &[u32] {
        self.occ.get(l.code()).map(Vec::as_slice).unwrap_or(&[])
    }

    fn refresh(&mut self, id: u32) {
        let slot = self.slots[id as usize].as_ref().expect("live clause");
        let (unit, falsified) = (slot.is_unit(), slot.is_false());
        if unit {
            self.units.insert(id);
        } else {
            self.units.remove(&id);
        }
        if falsified {
            self.falsified.insert(id);
        } else {
            self.falsified.remove(&id);
        }
    }

    /// Appends `c` at the end of the list.
    pub fn push(&mut self, c: Clause, trail: &Trail, vars: &VarSet) {
        let id = self.slots.len() as u32;
        let lits: Box<[Literal]> = c.dedup().literals().into();
        let n_true = lits.iter().filter(|&&l| trail.contains(l)).count() as u32;
        let n_false = lits.iter().filter(|&&l| trail.contains(l.opposite())).count() as u32;
        for &l in lits.iter() {
            self.occ_mut(l).push(id);
        }
        if lits.iter().any(|l| !vars.contains(&l.var())) {
            self.outside += 1;
        }
        *self.exact.entry(c.clone()).or_insert(0) += 1;
        *self.sets.entry(c.normalized()).or_insert(0) += 1;
        self.slots.push(Some(Slot { clause: c, lits, n_true, n_false }));
        self.order.push(id);
        self.refresh(id);
    }

    /// Removes the clause at list position `pos`.
    pub fn remove_at(&mut self, pos: usize, vars: &VarSet) {
        let id = self.order.remove(pos);
        let slot = self.slots[id as usize].take().expect("live clause");
        for &l in slot.lits.iter() {
            let list = self.occ_mut(l);
            if let Some(i) = list.iter().position(|&x| x == id) {
                list.swap_remove(i);
            }
        }
        if slot.lits.iter().any(|l| !vars.contains(&l.var())) {
            self.outside -= 1;
        }
        decrement(&mut self.exact, &slot.clause);
        decrement(&mut self.sets, &slot.clause.normalized());
        self.units.remove(&id);
        self.falsified.remove(&id);
    }

    /// `l` became true in the trail (its first occurrence was pushed).
    pub fn assign(&mut self, l: Literal) {
        for i in 0..self.occ(l).len() {
            let id = self.occ(l)[i];
            self.slots[id as usize].as_mut().expect("live clause").n_true += 1;
            self.refresh(id);
        }
        let neg = l.opposite();
        for i in 0..self.occ(neg).len() {
            let id = self.occ(neg)[i];
            self.slots[id as usize].as_mut().expect("live clause").n_false += 1;
            self.refresh(id);
        }
    }

    /// The first occurrence of `l` was popped from the trail.
    pub fn unassign(&mut self, l: Literal) {
        for i in 0..self.occ(l).len() {
            let id = self.occ(l)[i];
            self.slots[id as usize].as_mut().expect("live clause").n_true -= 1;
            self.refresh(id);
        }
        let neg = l.opposite();
        for i in 0..self.occ(neg).len() {
            let id = self.occ(neg)[i];
            self.slots[id as usize].as_mut().expect("live clause").n_false -= 1;
            self.refresh(id);
        }
    }

    pub fn clause(&self, id: u32) -> &Clause {
        &self.slots[id as usize].as_ref().expect("live clause").clause
    }

    /// Live clauses in list order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> + Clone + '_ {
        self.order.iter().map(|&id| self.clause(id))
    }

    pub fn contains_exact(&self, c: &Clause) -> bool {
        self.exact.contains_key(c)
    }

    pub fn contains_set(&self, c: &Clause) -> bool {
        self.sets.contains_key(&c.normalized())
    }

    pub fn set_count(&self, c: &Clause) -> u32 {
        self.sets.get(&c.normalized()).copied().unwrap_or(0)
    }

    pub fn has_outside_vars(&self) -> bool {
        self.outside > 0
    }

    /// Ids of unit clauses, ascending; valid on consistent trails.
    pub fn unit_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.units.iter().copied()
    }

    /// Ids of false clauses, ascending; valid on consistent trails.
    pub fn false_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.falsified.iter().copied()
    }

    pub fn has_unit(&self) -> bool {
        !self.units.is_empty()
    }

    pub fn has_false(&self) -> bool {
        !self.falsified.is_empty()
    }

    /// The literal of a unit clause that is not false.
    pub fn unit_literal(&self, id: u32, trail: &Trail) -> Literal {
        let slot = self.slots[id as usize].as_ref().expect("live clause");
        slot.lits
            .iter()
            .copied()
            .find(|&l| !trail.contains(l.opposite()))
            .expect("unit clause has a non-false literal")
    }

    /// Ids of live clauses containing `l`, in no particular order.
    pub fn occurrences(&self, l: Literal) -> &[u32] {
        self.occ(l)
    }
}

fn decrement<K: std::hash::Hash + Eq>(map: &mut HashMap<K, u32>, key: &K) {
    if let Some(n) = map.get_mut(key) {
        *n -= 1;
        if *n == 0 {
            map.remove(key);
        }
    }
}
