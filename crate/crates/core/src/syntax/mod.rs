//! ASP-Core-2 front end: lexer, recursive-descent parser and safety check.
//!
//! The accepted fragment covers normal, disjunctive and choice rules,
//! integrity constraints, `#count`/`#sum`/`#min`/`#max` aggregates, weak
//! constraints and a single `atom?` query. Printing an AST with `Display`
//! yields text that parses back to the same AST.

mod ast;
mod lexer;
mod parser;
mod safety;

use thiserror::Error;

pub use ast::*;
pub use parser::{parse_facts, parse_program};
pub use safety::{check_rule as check_rule_safety, check_weak as check_weak_safety};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}: unsafe variable `{variable}` in `{statement}`")]
    UnsafeRule {
        line: usize,
        statement: String,
        variable: String,
    },
    #[error("{line}:{col}: a program may contain at most one query")]
    DuplicateQuery { line: usize, col: usize },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, expected: Vec<String>, found: String) -> Self {
        ParseError::Syntax {
            line,
            col,
            expected,
            found,
        }
    }
}
