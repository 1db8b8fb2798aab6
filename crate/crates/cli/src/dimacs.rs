//! DIMACS CNF reading and writing.

use std::fmt::Write as _;

use sat_transys::cnf::{Clause, Formula, Literal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsProblem {
    pub declared_vars: u32,
    pub declared_clauses: usize,
    pub formula: Formula,
    /// Header disagreements tolerated outside strict mode.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: clause data before the header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: variable {var} exceeds the declared {declared}")]
    VarAboveDeclared { line: usize, var: u32, declared: u32 },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("the last clause is not terminated by 0")]
    Unterminated,
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends the
/// data. Outside strict mode, variables above the declared count and a
/// wrong clause count only produce warnings.
pub fn parse_dimacs(text: &str, strict: bool) -> Result<DimacsProblem, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut warnings = Vec::new();
    let mut max_var = 0u32;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let bad = || DimacsError::BadHeader { line, text: trimmed.to_string() };
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() || fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(bad());
            }
            let vars = fields[2].parse().map_err(|_| bad())?;
            let count = fields[3].parse().map_err(|_| bad())?;
            header = Some((vars, count));
            continue;
        }
        let Some((declared, _)) = header else {
            return Err(DimacsError::DataBeforeHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let bad = || DimacsError::BadLiteral { line, token: token.to_string() };
            let v: i32 = token.parse().map_err(|_| bad())?;
            if v == 0 {
                if token != "0" {
                    return Err(bad());
                }
                clauses.push(Clause::new(std::mem::take(&mut current)));
                continue;
            }
            let lit = Literal::from_dimacs(v).map_err(|_| bad())?;
            if lit.var() > declared {
                if strict {
                    return Err(DimacsError::VarAboveDeclared { line, var: lit.var(), declared });
                }
                if lit.var() > max_var {
                    warnings.push(format!(
                        "line {line}: variable {} exceeds the declared {declared}",
                        lit.var()
                    ));
                }
            }
            max_var = max_var.max(lit.var());
            current.push(lit);
        }
    }
    let (declared_vars, declared_clauses) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared_clauses {
        if strict {
            return Err(DimacsError::ClauseCount { declared: declared_clauses, found: clauses.len() });
        }
        warnings.push(format!(
            "header declares {declared_clauses} clauses but {} were read",
            clauses.len()
        ));
    }
    Ok(DimacsProblem { declared_vars, declared_clauses, formula: Formula::new(clauses), warnings })
}

/// Writes `p cnf` with the declared counts followed by one clause per line.
pub fn write_dimacs(p: &DimacsProblem) -> String {
    let mut out = format!("p cnf {} {}\n", p.declared_vars, p.declared_clauses);
    for c in p.formula.iter() {
        for l in c.iter() {
            write!(out, "{} ", l.to_dimacs()).expect("writing to a String");
        }
        out.push_str("0\n");
    }
    out
}
