#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sat_transys::cnf::{Clause, Formula, Literal};
use sat_transys::rules::RuleInstance as R;

/// Random CNF over `n` variables: `m` clauses of width 1 to 4, mostly 3.
pub fn random_cnf(rng: &mut impl Rng, n: u32, m: usize) -> Formula {
    let clauses = (0..m)
        .map(|_| {
            let width = *[1, 2, 3, 3, 3, 4].choose(rng).unwrap();
            let lits = (0..width)
                .map(|_| Literal::new(rng.gen_range(1..=n), rng.gen_bool(0.5)))
                .collect();
            Clause::new(lits)
        })
        .collect();
    Formula::new(clauses)
}

/// Random 3-SAT: three distinct variables per clause.
pub fn random_3sat(rng: &mut impl Rng, n: u32, m: usize) -> Formula {
    let vars: Vec<u32> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let vs: Vec<u32> = vars.choose_multiple(rng, 3).copied().collect();
            Clause::new(vs.into_iter().map(|v| Literal::new(v, rng.gen_bool(0.5))).collect())
        })
        .collect();
    Formula::new(clauses)
}

/// `copies` disjoint copies of `[-a,-b,c], [-a,-b,d], [-a,-c,-d]`, copy `k`
/// on variables `4k+1 ..= 4k+4`.
pub fn gadget_copies(copies: i32) -> Formula {
    let mut cs: Vec<Vec<i32>> = Vec::new();
    for k in 0..copies {
        let (a, b, c, d) = (4 * k + 1, 4 * k + 2, 4 * k + 3, 4 * k + 4);
        cs.extend([vec![-a, -b, c], vec![-a, -b, d], vec![-a, -c, -d]]);
    }
    let refs: Vec<&[i32]> = cs.iter().map(|c| c.as_slice()).collect();
    Formula::from_dimacs(&refs).unwrap()
}

/// Decisions on `a` and `a+1` from level `base`, propagation, conflict
/// analysis and `backjumpLearn` of `[-a, -(a+1)]` to level `base + 1`.
pub fn learn_round(a: i32, base: usize, decide_a: bool) -> Vec<R> {
    let (b, c, d) = (a + 1, a + 2, a + 3);
    let mut s = Vec::new();
    if decide_a {
        s.push(R::decide(a));
    }
    s.extend([
        R::decide(b),
        R::unit_propagate(&[-a, -b, c], c),
        R::unit_propagate(&[-a, -b, d], d),
        R::conflict(&[-a, -c, -d]),
        R::explain(-d, &[-a, -b, d]),
        R::explain(-c, &[-a, -b, c]),
        R::backjump_learn(-b, base + 1),
    ]);
    s
}

/// From `([], X, [], ⊥, ⊥)` with `[-p,-(p+1)]` and `[-q,-(q+1)]` not in `X`,
/// a derivation ending in `([], [[-p,-(p+1)], [-q,-(q+1)]], [], ⊥, ⊥)`.
pub fn swap_round(p: i32, q: i32, x: &[[i32; 2]]) -> Vec<R> {
    let mut s = vec![R::decide(p)];
    s.extend(learn_round(q, 1, true));
    s.extend(learn_round(p, 0, false));
    let mut forgotten: Vec<&[i32]> = x.iter().map(|c| c.as_slice()).collect();
    let cq = [-q, -(q + 1)];
    forgotten.push(&cq);
    s.push(R::forget(&forgotten));
    s.extend(learn_round(q, 1, true));
    s.push(R::Restart);
    s
}

/// A legal derivation over four gadget copies that returns to
/// `([], [[-5,-6], [-1,-2]], [], ⊥, ⊥)`; the two occurrences are after the
/// first and the third restart.
pub fn legal_cycle() -> (Formula, Vec<R>) {
    let mut s = swap_round(5, 1, &[]);
    s.extend(swap_round(13, 9, &[[-5, -6], [-1, -2]]));
    s.extend(swap_round(5, 1, &[[-13, -14], [-9, -10]]));
    (gadget_copies(4), s)
}
