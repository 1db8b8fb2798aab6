//! Literals, clauses, formulae and valuations, together with their truth
//! semantics.
//!
//! Clauses and formulae are *lists*: order is kept and duplicates are legal.
//! Set-like comparisons are offered separately (`set_eq`, `normalized`) and
//! are used only where a rule or an ordering asks for them.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::CnfError;

/// Propositional variable, numbered from 1.
pub type Var = u32;

/// A finite set of variables, iterated in increasing order.
pub type VarSet = BTreeSet<Var>;

/// A signed variable, encoded as a non-zero DIMACS integer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: Var, positive: bool) -> Literal {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable out of range: {var}");
        let v = var as i32;
        Literal(if positive { v } else { -v })
    }

    pub fn pos(var: Var) -> Literal {
        Literal::new(var, true)
    }

    pub fn neg(var: Var) -> Literal {
        Literal::new(var, false)
    }

    pub fn from_dimacs(value: i32) -> Result<Literal, CnfError> {
        if value == 0 || value == i32::MIN {
            Err(CnfError::InvalidLiteral(value))
        } else {
            Ok(Literal(value))
        }
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn opposite(self) -> Literal {
        Literal(-self.0)
    }

    /// Dense index: `2 * var + (negative as usize)`.
    pub(crate) fn code(self) -> usize {
        2 * self.var() as usize + usize::from(self.0 < 0)
    }
}

impl TryFrom<i32> for Literal {
    type Error = CnfError;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        Literal::from_dimacs(value)
    }
}

impl From<Literal> for i32 {
    fn from(l: Literal) -> i32 {
        l.0
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

/// The opposite literal: same variable, flipped polarity.
pub fn opposite(l: Literal) -> Literal {
    l.opposite()
}

fn write_literals(f: &mut fmt::Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    f.write_str("[")?;
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}")?;
    }
    f.write_str("]")
}

/// An ordered list of literals. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Literal>", into = "Vec<Literal>")]
pub struct Clause(Arc<[Literal]>);

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Clause {
        Clause(literals.into())
    }

    pub fn empty() -> Clause {
        Clause::new(Vec::new())
    }

    pub fn from_dimacs(values: &[i32]) -> Result<Clause, CnfError> {
        values
            .iter()
            .map(|&v| Literal::from_dimacs(v))
            .collect::<Result<Vec<_>, _>>()
            .map(Clause::new)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0.contains(&l)
    }

    /// `c ∖ l`: every occurrence of `l` removed.
    pub fn without(&self, l: Literal) -> Clause {
        Clause::new(self.0.iter().copied().filter(|&x| x != l).collect())
    }

    /// Duplicate literals removed, first occurrences kept in order.
    pub fn dedup(&self) -> Clause {
        let mut seen = Vec::with_capacity(self.len());
        for &l in self.iter() {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        Clause::new(seen)
    }

    /// The clause as a literal set (sorted, duplicate free).
    pub fn normalized(&self) -> Vec<Literal> {
        let mut lits = self.0.to_vec();
        lits.sort_unstable();
        lits.dedup();
        lits
    }

    /// Equality of the underlying literal sets.
    pub fn set_eq(&self, other: &Clause) -> bool {
        self.normalized() == other.normalized()
    }

    /// The list of opposites of the literals of the clause.
    pub fn opposites(&self) -> Vec<Literal> {
        self.0.iter().map(|l| l.opposite()).collect()
    }

    pub fn is_tautology(&self) -> bool {
        clause_tautology(self)
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl From<Vec<Literal>> for Clause {
    fn from(v: Vec<Literal>) -> Clause {
        Clause::new(v)
    }
}

impl From<Clause> for Vec<Literal> {
    fn from(c: Clause) -> Vec<Literal> {
        c.0.to_vec()
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Clause {
        Clause::new(iter.into_iter().collect())
    }
}

impl AsRef<[Literal]> for Clause {
    fn as_ref(&self) -> &[Literal] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Literal;
    type IntoIter = std::slice::Iter<'a, Literal>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literals(f, &self.0)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literals(f, &self.0)
    }
}

/// An ordered list of clauses.
///
/// The clause list sits behind an `Arc`, so clones share storage until one
/// side is modified and an unchanged formula compares equal in O(1).
#[derive(Clone, Default, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Clause>", into = "Vec<Clause>")]
pub struct Formula(Arc<Vec<Clause>>);

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Formula {
    pub fn new(clauses: Vec<Clause>) -> Formula {
        Formula(Arc::new(clauses))
    }

    pub fn from_dimacs(clauses: &[&[i32]]) -> Result<Formula, CnfError> {
        clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>, _>>()
            .map(Formula::new)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// List membership (exact literal order).
    pub fn contains(&self, c: &Clause) -> bool {
        self.0.contains(c)
    }

    /// Membership of a clause compared as a literal set.
    pub fn contains_set(&self, c: &Clause) -> bool {
        let key = c.normalized();
        self.0.iter().any(|d| d.normalized() == key)
    }

    pub fn push(&mut self, c: Clause) {
        Arc::make_mut(&mut self.0).push(c);
    }

    /// `F @ [c]`
    pub fn with(&self, c: Clause) -> Formula {
        let mut f = self.clone();
        f.push(c);
        f
    }

    /// `F1 @ F2`
    pub fn concat(&self, other: &Formula) -> Formula {
        if other.is_empty() {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend(self.iter().cloned());
        v.extend(other.iter().cloned());
        Formula::new(v)
    }

    /// `F ∖ c`: every occurrence of `c` removed.
    pub fn without(&self, c: &Clause) -> Formula {
        Formula::new(self.0.iter().filter(|d| *d != c).cloned().collect())
    }

    /// Removes the first occurrence of `c`; returns whether one was found.
    pub fn remove_first(&mut self, c: &Clause) -> bool {
        match self.0.iter().position(|d| d == c) {
            Some(i) => {
                Arc::make_mut(&mut self.0).remove(i);
                true
            }
            None => false,
        }
    }

    /// Removes every occurrence of every clause in `cs`; returns the count.
    pub fn remove_all(&mut self, cs: &[Clause]) -> usize {
        let before = self.len();
        if self.0.iter().any(|d| cs.contains(d)) {
            Arc::make_mut(&mut self.0).retain(|d| !cs.contains(d));
        }
        before - self.len()
    }

    pub fn to_dimacs(&self) -> Vec<Vec<i32>> {
        self.0.iter().map(Clause::to_dimacs).collect()
    }
}

impl From<Vec<Clause>> for Formula {
    fn from(v: Vec<Clause>) -> Formula {
        Formula::new(v)
    }
}

impl From<Formula> for Vec<Clause> {
    fn from(f: Formula) -> Vec<Clause> {
        f.0.as_ref().clone()
    }
}

impl FromIterator<Clause> for Formula {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Formula {
        Formula::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Formula {
    type Item = &'a Clause;
    type IntoIter = std::slice::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// An ordered list of literals read as an assignment.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation(pub Vec<Literal>);

impl Valuation {
    pub fn new(literals: Vec<Literal>) -> Valuation {
        Valuation(literals)
    }

    pub fn from_dimacs(values: &[i32]) -> Result<Valuation, CnfError> {
        Clause::from_dimacs(values).map(|c| Valuation(c.literals().to_vec()))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literals(f, &self.0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literals(f, &self.0)
    }
}

/// Anything that can be read as a list of literals: valuations and trails.
pub trait Assignment {
    /// `l ∈ v`
    fn holds(&self, l: Literal) -> bool;

    /// Index of the first occurrence of `l`.
    fn position(&self, l: Literal) -> Option<usize>;

    /// The underlying literal list, in order.
    fn literal_list(&self) -> Vec<Literal>;
}

impl Assignment for Valuation {
    fn holds(&self, l: Literal) -> bool {
        self.0.contains(&l)
    }

    fn position(&self, l: Literal) -> Option<usize> {
        self.0.iter().position(|&x| x == l)
    }

    fn literal_list(&self) -> Vec<Literal> {
        self.0.clone()
    }
}

impl Assignment for [Literal] {
    fn holds(&self, l: Literal) -> bool {
        self.contains(&l)
    }

    fn position(&self, l: Literal) -> Option<usize> {
        self.iter().position(|&x| x == l)
    }

    fn literal_list(&self) -> Vec<Literal> {
        self.to_vec()
    }
}

/// Variables occurring in a value.
pub trait HasVars {
    fn vars(&self) -> VarSet;
}

impl HasVars for Literal {
    fn vars(&self) -> VarSet {
        std::iter::once(self.var()).collect()
    }
}

impl HasVars for Clause {
    fn vars(&self) -> VarSet {
        self.iter().map(|l| l.var()).collect()
    }
}

impl HasVars for Formula {
    fn vars(&self) -> VarSet {
        self.iter().flat_map(|c| c.iter().map(|l| l.var())).collect()
    }
}

impl HasVars for Valuation {
    fn vars(&self) -> VarSet {
        self.0.iter().map(|l| l.var()).collect()
    }
}

pub fn vars_of<T: HasVars + ?Sized>(x: &T) -> VarSet {
    x.vars()
}

pub fn literal_true<A: Assignment + ?Sized>(l: Literal, v: &A) -> bool {
    v.holds(l)
}

pub fn literal_false<A: Assignment + ?Sized>(l: Literal, v: &A) -> bool {
    v.holds(l.opposite())
}

pub fn clause_true<A: Assignment + ?Sized>(c: &Clause, v: &A) -> bool {
    c.iter().any(|&l| v.holds(l))
}

/// Vacuously true for the empty clause.
pub fn clause_false<A: Assignment + ?Sized>(c: &Clause, v: &A) -> bool {
    c.iter().all(|&l| v.holds(l.opposite()))
}

pub fn formula_true<A: Assignment + ?Sized>(f: &Formula, v: &A) -> bool {
    f.iter().all(|c| clause_true(c, v))
}

pub fn formula_false<A: Assignment + ?Sized>(f: &Formula, v: &A) -> bool {
    f.iter().any(|c| clause_false(c, v))
}

/// No literal occurs together with its opposite.
pub fn is_consistent<A: Assignment + ?Sized>(v: &A) -> bool {
    let lits = v.literal_list();
    let set: std::collections::HashSet<Literal> = lits.iter().copied().collect();
    !lits.iter().any(|l| set.contains(&l.opposite()))
}

/// No literal occurs twice.
pub fn is_distinct<A: Assignment + ?Sized>(v: &A) -> bool {
    let lits = v.literal_list();
    let set: std::collections::HashSet<Literal> = lits.iter().copied().collect();
    set.len() == lits.len()
}

/// `c` is unit in `v` with unit literal `l`.
pub fn is_unit<A: Assignment + ?Sized>(c: &Clause, l: Literal, v: &A) -> bool {
    c.contains(l)
        && !v.holds(l)
        && !v.holds(l.opposite())
        && c.iter().filter(|&&x| x != l).all(|&x| v.holds(x.opposite()))
}

/// `c` is a reason for the propagation of `l` in `v`.
pub fn is_reason<A: Assignment + ?Sized>(c: &Clause, l: Literal, v: &A) -> bool {
    if !c.contains(l) {
        return false;
    }
    let Some(lpos) = v.position(l) else {
        return false;
    };
    c.iter()
        .filter(|&&x| x != l)
        .all(|&x| matches!(v.position(x.opposite()), Some(p) if p < lpos))
}

/// `(c1 ∖ l) @ (c2 ∖ opposite l)` with duplicate literals removed.
pub fn resolvent(c1: &Clause, c2: &Clause, l: Literal) -> Clause {
    let neg = l.opposite();
    let mut out: Vec<Literal> = Vec::with_capacity(c1.len() + c2.len());
    for &x in c1.iter().filter(|&&x| x != l).chain(c2.iter().filter(|&&x| x != neg)) {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    Clause::new(out)
}

pub fn clause_tautology(c: &Clause) -> bool {
    c.iter().any(|&l| c.contains(l.opposite()))
}

/// One singleton clause per literal, in order.
pub fn valuation_to_formula(v: &Valuation) -> Formula {
    v.0.iter().map(|&l| Clause::new(vec![l])).collect()
}

/// Unit clauses `[opposite l]` for every literal of `c`.
pub fn negated_unit_clauses(c: &Clause) -> Formula {
    c.iter().map(|&l| Clause::new(vec![l.opposite()])).collect()
}
