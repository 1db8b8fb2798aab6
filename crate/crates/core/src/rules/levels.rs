//! Backjump levels and unique implication points.

use crate::cnf::{clause_false, Clause, Literal};
use crate::trail::Trail;

/// `¬l` is the last asserted of the opposites of `c`, with `c` false in `m`.
fn last_falsified(l: Literal, c: &Clause, m: &Trail) -> bool {
    if !clause_false(c, m) {
        return false;
    }
    match m.last_asserted_literal(&c.opposites()) {
        Ok(last) => last == l.opposite(),
        Err(_) => false,
    }
}

/// Levels of `¬l'` for every `l'` in `c ∖ l`; `c` must be false in `m`.
fn other_levels<'a>(
    l: Literal,
    c: &'a Clause,
    m: &'a Trail,
) -> impl Iterator<Item = usize> + 'a {
    c.iter()
        .filter(move |&&x| x != l)
        .map(move |x| m.level(x.opposite()).expect("clause is false in the trail"))
}

/// `level` is strictly below the level of the last falsified literal `l` of
/// `c` and at or above the levels of all other literals of `c`.
pub fn is_backjump_level(level: usize, l: Literal, c: &Clause, m: &Trail) -> bool {
    if !last_falsified(l, c, m) {
        return false;
    }
    let top = m.level(l.opposite()).expect("last falsified literal is in the trail");
    level < top && other_levels(l, c, m).all(|lv| lv <= level)
}

/// A backjump level with no smaller backjump level.
pub fn is_minimal_backjump_level(level: usize, l: Literal, c: &Clause, m: &Trail) -> bool {
    is_backjump_level(level, l, c, m) && (0..level).all(|lv| !is_backjump_level(lv, l, c, m))
}

/// The last falsified literal `l` of `c` is alone on the highest level of
/// `c`'s literals.
pub fn is_uip(l: Literal, c: &Clause, m: &Trail) -> bool {
    if !last_falsified(l, c, m) {
        return false;
    }
    let top = m.level(l.opposite()).expect("last falsified literal is in the trail");
    other_levels(l, c, m).all(|lv| lv < top)
}
