pub mod cnf;
pub mod error;
pub mod trail;
pub mod oracle;
pub mod rules;
pub mod orderings;
pub mod engine;
pub mod trace;
