//! Textual field definitions: lexing, parsing, and parameter binding.
//!
//! The grammar covers polynomial vector-field components over `x`, `y`,
//! and a caller-declared set of parameter names. Parsing expands the
//! expression fully into a canonical polynomial; parameters stay symbolic
//! until [`bind`] substitutes values.

mod lexer;
mod parser;
mod symbolic;

use std::collections::BTreeSet;

pub use lexer::{tokenize, Token, TokenKind};
pub use symbolic::SymPoly2;

use crate::poly::Poly2;

/// A named parameter value, e.g. `theta = 0.2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBinding {
    pub name: String,
    pub value: f64,
}

impl ParamBinding {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        ParamBinding {
            name: name.into(),
            value,
        }
    }
}

/// Errors from tokenizing, parsing, or binding a field expression.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("unexpected character at byte {offset}")]
    Lex { offset: usize },
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    #[error("parameter `{name}` has no binding")]
    UnboundParam { name: String },
    #[error("parameter `{name}` bound more than once")]
    DuplicateParam { name: String },
    #[error("`{name}` is reserved and cannot be a parameter name")]
    ReservedParam { name: String },
}

/// Parses `text` into a polynomial symbolic in the declared `params`.
/// `x` and `y` are reserved and may not appear in the parameter set.
pub fn parse_poly(text: &str, params: &BTreeSet<String>) -> Result<SymPoly2, ExprError> {
    for reserved in ["x", "y"] {
        if params.contains(reserved) {
            return Err(ExprError::ReservedParam {
                name: reserved.to_string(),
            });
        }
    }
    let tokens = tokenize(text)?;
    parser::Parser::new(&tokens, params, text.len()).parse()
}

/// Substitutes parameter values into a symbolic polynomial. Every
/// parameter occurring in `poly` must be bound exactly once; coefficients
/// that evaluate to zero are dropped so the result stays canonical.
pub fn bind(poly: &SymPoly2, bindings: &[ParamBinding]) -> Result<Poly2, ExprError> {
    poly.bind(bindings)
}

/// Convenience for parameter-free expressions: parse and bind in one step.
pub fn parse_numeric(text: &str) -> Result<Poly2, ExprError> {
    bind(&parse_poly(text, &BTreeSet::new())?, &[])
}
