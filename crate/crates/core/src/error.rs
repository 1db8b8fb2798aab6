use thiserror::Error;

use crate::cnf::Literal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("invalid literal {0}: literals are non-zero signed integers")]
    InvalidLiteral(i32),
    #[error("literal {0} does not occur in the trail")]
    LiteralNotInTrail(Literal),
    #[error("the trail contains no decision literal")]
    NoDecision,
    #[error("no literal of the clause occurs in the trail")]
    NoClauseLiteralInTrail,
}
