//! Truth-table semantics: satisfiability, entailment and equivalence by
//! exhaustive enumeration of total valuations.
//!
//! Valuations are enumerated as binary counters over the sorted variable
//! list, the smallest variable being the most significant bit and `false`
//! coming first. The first model found is therefore the lexicographically
//! least one.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{
    formula_true, is_consistent, Clause, Formula, HasVars, Literal, Valuation, Var,
    VarSet,
};

pub const DEFAULT_VAR_BUDGET: usize = 20;

/// Enumeration is done over `u64` masks.
const HARD_LIMIT: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle refused: {needed} variables exceed the budget of {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("variable {0} of the formula is not among the enumerated variables")]
    UncoveredVariable(Var),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub satisfiable: bool,
    pub model: Option<Valuation>,
}

/// A clause compiled to bit masks over a fixed variable order.
#[derive(Clone, Copy)]
struct MaskClause {
    pos: u64,
    neg: u64,
}

impl MaskClause {
    fn holds(self, a: u64) -> bool {
        (a & self.pos) != 0 || (!a & self.neg) != 0
    }
}

struct Compiler {
    vars: Vec<Var>,
    bit: HashMap<Var, u64>,
}

impl Compiler {
    fn new(vars: &VarSet, budget: usize) -> Result<Compiler, OracleError> {
        let n = vars.len();
        if n > budget.min(HARD_LIMIT) {
            return Err(OracleError::BudgetExceeded { needed: n, budget });
        }
        let vars: Vec<Var> = vars.iter().copied().collect();
        let bit = vars
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, 1u64 << (n - 1 - i)))
            .collect();
        Ok(Compiler { vars, bit })
    }

    fn literal(&self, l: Literal) -> Result<(u64, bool), OracleError> {
        self.bit
            .get(&l.var())
            .map(|&b| (b, l.is_positive()))
            .ok_or(OracleError::UncoveredVariable(l.var()))
    }

    fn clause(&self, c: &Clause) -> Result<MaskClause, OracleError> {
        let mut m = MaskClause { pos: 0, neg: 0 };
        for &l in c {
            let (b, positive) = self.literal(l)?;
            if positive {
                m.pos |= b;
            } else {
                m.neg |= b;
            }
        }
        Ok(m)
    }

    fn formula(&self, f: &Formula) -> Result<Vec<MaskClause>, OracleError> {
        f.iter().map(|c| self.clause(c)).collect()
    }

    fn count(&self) -> u64 {
        1u64 << self.vars.len()
    }

    fn valuation(&self, a: u64) -> Valuation {
        Valuation(
            self.vars
                .iter()
                .map(|&v| Literal::new(v, a & self.bit[&v] != 0))
                .collect(),
        )
    }
}

/// Brute-force oracle with a variable budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub budget: usize,
}

impl Default for Oracle {
    fn default() -> Oracle {
        Oracle { budget: DEFAULT_VAR_BUDGET }
    }
}

impl Oracle {
    pub fn new(budget: usize) -> Oracle {
        Oracle { budget }
    }

    /// Enumerates all total valuations of `vars`; `vars` must cover the
    /// formula's variables.
    pub fn brute_sat(&self, f: &Formula, vars: &VarSet) -> Result<OracleResult, OracleError> {
        let comp = Compiler::new(vars, self.budget)?;
        let clauses = comp.formula(f)?;
        let found = (0..comp.count()).find(|&a| clauses.iter().all(|c| c.holds(a)));
        Ok(OracleResult {
            satisfiable: found.is_some(),
            model: found.map(|a| comp.valuation(a)),
        })
    }

    pub fn sat(&self, f: &Formula) -> Result<OracleResult, OracleError> {
        self.brute_sat(f, &f.vars())
    }

    /// `c` holds in every model of `f`.
    pub fn entails(&self, f: &Formula, c: &Clause) -> Result<bool, OracleError> {
        let mut vars = f.vars();
        vars.extend(c.vars());
        ModelTable::build(f, &vars, self.budget).map(|t| t.entails_clause(c))
    }

    pub fn entails_literal(&self, f: &Formula, l: Literal) -> Result<bool, OracleError> {
        self.entails(f, &Clause::new(vec![l]))
    }

    /// Every literal of `v` holds in every model of `f`.
    pub fn entails_valuation(&self, f: &Formula, v: &Valuation) -> Result<bool, OracleError> {
        let mut vars = f.vars();
        vars.extend(v.vars());
        let t = ModelTable::build(f, &vars, self.budget)?;
        Ok(v.literals().iter().all(|&l| t.entails_literal(l)))
    }

    /// Same models over the union of both variable sets.
    pub fn equivalent(&self, f1: &Formula, f2: &Formula) -> Result<bool, OracleError> {
        let mut vars = f1.vars();
        vars.extend(f2.vars());
        let t1 = ModelTable::build(f1, &vars, self.budget)?;
        let t2 = ModelTable::build(f2, &vars, self.budget)?;
        Ok(t1.models == t2.models)
    }
}

pub fn brute_sat(f: &Formula, vars: &VarSet) -> Result<OracleResult, OracleError> {
    Oracle::default().brute_sat(f, vars)
}

pub fn entails(f: &Formula, c: &Clause) -> Result<bool, OracleError> {
    Oracle::default().entails(f, c)
}

pub fn entails_literal(f: &Formula, l: Literal) -> Result<bool, OracleError> {
    Oracle::default().entails_literal(f, l)
}

pub fn entails_valuation(f: &Formula, v: &Valuation) -> Result<bool, OracleError> {
    Oracle::default().entails_valuation(f, v)
}

pub fn equivalent(f1: &Formula, f2: &Formula) -> Result<bool, OracleError> {
    Oracle::default().equivalent(f1, f2)
}

/// `v` is consistent and makes every clause of `f` true.
pub fn is_model(v: &Valuation, f: &Formula) -> bool {
    is_consistent(v) && formula_true(f, v)
}

/// The complete model set of a formula over a fixed variable set, for
/// answering many entailment queries against the same formula.
pub struct ModelTable {
    comp: Compiler,
    models: Vec<u64>,
}

impl ModelTable {
    pub fn build(f: &Formula, vars: &VarSet, budget: usize) -> Result<ModelTable, OracleError> {
        let comp = Compiler::new(vars, budget)?;
        let clauses = comp.formula(f)?;
        let models = (0..comp.count()).filter(|&a| clauses.iter().all(|c| c.holds(a))).collect();
        Ok(ModelTable { comp, models })
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.models.is_empty()
    }

    pub fn model_count(&self) -> usize {
        self.models.len()
    }

    /// Same model set; both tables must range over the same variables.
    pub fn same_models(&self, other: &ModelTable) -> bool {
        self.comp.vars == other.comp.vars && self.models == other.models
    }

    /// Literals over variables outside the table are unconstrained, so a
    /// model can always falsify them.
    fn split(&self, c: &[Literal]) -> Option<MaskClause> {
        let mut m = MaskClause { pos: 0, neg: 0 };
        for &l in c {
            match self.comp.literal(l) {
                Ok((b, true)) => m.pos |= b,
                Ok((b, false)) => m.neg |= b,
                Err(_) => {
                    if c.contains(&l.opposite()) {
                        return None;
                    }
                }
            }
        }
        Some(m)
    }

    pub fn entails_clause(&self, c: &Clause) -> bool {
        self.entails_under(&[], c.literals())
    }

    pub fn entails_literal(&self, l: Literal) -> bool {
        self.entails_under(&[], &[l])
    }

    /// `F @ [[a] | a <- assumptions] ⊨ c`
    pub fn entails_under(&self, assumptions: &[Literal], c: &[Literal]) -> bool {
        if c.iter().any(|l| assumptions.contains(l)) {
            return true;
        }
        let Some(target) = self.split(c) else {
            return true;
        };
        let mut need_pos = 0u64;
        let mut need_neg = 0u64;
        for &a in assumptions {
            match self.comp.literal(a) {
                Ok((b, true)) => need_pos |= b,
                Ok((b, false)) => need_neg |= b,
                // a fresh assumed variable does not restrict the models of c
                Err(_) => {
                    if assumptions.contains(&a.opposite()) {
                        return true;
                    }
                }
            }
        }
        if need_pos & need_neg != 0 {
            return true;
        }
        self.models
            .iter()
            .filter(|&&a| a & need_pos == need_pos && !a & need_neg == need_neg)
            .all(|&a| target.holds(a))
    }

    /// The table's models as valuations (for diagnostics and tests).
    pub fn models(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.models.iter().map(|&a| self.comp.valuation(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::negated_unit_clauses;
    use crate::cnf::clause_true;
    use proptest::prelude::*;

    fn holds_in_all(models: &[Valuation], c: &Clause) -> bool {
        models.iter().all(|m| clause_true(c, m))
    }

    fn cl(v: &[i32]) -> Clause {
        Clause::from_dimacs(v).unwrap()
    }

    fn f0() -> Formula {
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
        .unwrap()
    }

    #[test]
    fn contradictory_units_are_unsat() {
        let f = Formula::from_dimacs(&[&[1], &[-1]]).unwrap();
        let r = brute_sat(&f, &[1].into_iter().collect()).unwrap();
        assert!(!r.satisfiable && r.model.is_none());
    }

    #[test]
    fn empty_formula_has_empty_model() {
        let r = brute_sat(&Formula::default(), &VarSet::new()).unwrap();
        assert!(r.satisfiable);
        assert_eq!(r.model, Some(Valuation::default()));
    }

    #[test]
    fn example_formula_model() {
        let f = f0();
        let r = brute_sat(&f, &(1..=7).collect()).unwrap();
        assert!(r.satisfiable);
        assert!(is_model(r.model.as_ref().unwrap(), &f));
        let v = Valuation::from_dimacs(&[-1, 2, 3, 4, -5, 6, -7]).unwrap();
        assert!(is_model(&v, &f));
    }

    #[test]
    fn first_model_is_lexicographically_least() {
        // x1 false first: the model of [[1,2]] found first is -1,+2
        let f = Formula::from_dimacs(&[&[1, 2]]).unwrap();
        let m = brute_sat(&f, &[1, 2].into_iter().collect()).unwrap().model.unwrap();
        assert_eq!(m, Valuation::from_dimacs(&[-1, 2]).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let vars: VarSet = (1..=21).collect();
        assert_eq!(
            brute_sat(&Formula::default(), &vars),
            Err(OracleError::BudgetExceeded { needed: 21, budget: 20 })
        );
        assert!(Oracle::new(21).brute_sat(&Formula::default(), &vars).is_ok());
    }

    #[test]
    fn uncovered_variables_are_rejected() {
        let f = Formula::from_dimacs(&[&[3]]).unwrap();
        assert_eq!(
            brute_sat(&f, &[1].into_iter().collect()),
            Err(OracleError::UncoveredVariable(3))
        );
    }

    #[test]
    fn entailment_examples() {
        assert!(entails(&f0(), &cl(&[-2, -3, -5])).unwrap());
        assert!(entails(&f0(), &cl(&[-5, 6])).unwrap());
        assert!(!entails(&Formula::default(), &cl(&[1])).unwrap());
        assert!(entails(&Formula::default(), &cl(&[1, -1])).unwrap());
        assert!(entails_literal(&Formula::from_dimacs(&[&[4]]).unwrap(), Literal::pos(4)).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        let f = f0();
        assert!(equivalent(&f, &f.with(cl(&[-2, -3, -5]))).unwrap());
        let a = Formula::from_dimacs(&[&[1]]).unwrap();
        let b = Formula::from_dimacs(&[&[-1]]).unwrap();
        assert!(!equivalent(&a, &b).unwrap());
        let mut rev: Vec<Clause> = f.clauses().to_vec();
        rev.reverse();
        assert!(equivalent(&f, &Formula::new(rev)).unwrap());
    }

    #[test]
    fn is_model_examples() {
        assert!(is_model(&Valuation::default(), &Formula::default()));
        let bad = Valuation::from_dimacs(&[1, -1]).unwrap();
        assert!(!is_model(&bad, &Formula::default()));
    }

    #[test]
    fn entailment_under_assumptions() {
        let t = ModelTable::build(&f0(), &(1..=7).collect(), 20).unwrap();
        let l = |v| Literal::from_dimacs(v).unwrap();
        assert!(t.entails_under(&[l(1)], &[l(2)]));
        assert!(t.entails_under(&[l(1)], &[l(3)]));
        assert!(!t.entails_under(&[], &[l(2)]));
        assert!(t.entails_under(&[l(1), l(-1)], &[l(-4)]));
    }

    fn small_formula(max_var: i32) -> impl Strategy<Value = Formula> {
        let lit = (1..=max_var, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clause = prop::collection::vec(lit, 0..4);
        prop::collection::vec(clause, 0..8).prop_map(|cs| {
            Formula::new(cs.iter().map(|c| Clause::from_dimacs(c).unwrap()).collect())
        })
    }

    fn small_clause(max_var: i32) -> impl Strategy<Value = Clause> {
        let lit = (1..=max_var, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(lit, 0..4).prop_map(|c| Clause::from_dimacs(&c).unwrap())
    }

    proptest! {
        #[test]
        fn returned_models_are_models(f in small_formula(6)) {
            let r = Oracle::default().sat(&f).unwrap();
            if let Some(m) = r.model {
                prop_assert!(is_model(&m, &f));
            }
        }

        #[test]
        fn entailment_matches_refutation(f in small_formula(5), c in small_clause(6)) {
            let refuted = f.concat(&negated_unit_clauses(&c));
            let mut vars = f.vars();
            vars.extend(c.vars());
            let r = brute_sat(&refuted, &vars).unwrap();
            prop_assert_eq!(entails(&f, &c).unwrap(), !r.satisfiable);
        }

        #[test]
        fn entailment_is_monotone(f in small_formula(5), g in small_formula(5), c in small_clause(5)) {
            if entails(&f, &c).unwrap() {
                prop_assert!(entails(&f.concat(&g), &c).unwrap());
            }
        }

        #[test]
        fn table_agrees_with_model_list(f in small_formula(4), c in small_clause(5)) {
            let mut vars = f.vars();
            vars.extend(c.vars());
            let t = ModelTable::build(&f, &vars, 20).unwrap();
            let models: Vec<Valuation> = t.models().collect();
            prop_assert_eq!(t.entails_clause(&c), holds_in_all(&models, &c));
        }
    }
}
