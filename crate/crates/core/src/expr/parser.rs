//! Recursive-descent parser producing symbolic polynomials.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := number | 'x' | 'y' | param | '(' expr ')' | '-' factor
//! ```
//!
//! Multiplication is explicit (no juxtaposition), exponents are
//! nonnegative integer literals, and unary minus applies to a whole
//! factor: `-x^2` is `-(x^2)`.

use std::collections::BTreeSet;

use crate::expr::lexer::{Token, TokenKind};
use crate::expr::symbolic::SymPoly2;
use crate::expr::ExprError;

/// Parenthesis / unary-minus nesting beyond this depth is rejected rather
/// than risking a stack overflow on pathological input.
const MAX_DEPTH: usize = 256;
/// Exponents above this would expand to uselessly huge polynomials.
const MAX_EXPONENT: u32 = 64;

pub(crate) struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    params: &'a BTreeSet<String>,
    end_offset: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [Token], params: &'a BTreeSet<String>, end_offset: usize) -> Self {
        Parser {
            tokens,
            pos: 0,
            params,
            end_offset,
        }
    }

    pub(crate) fn parse(mut self) -> Result<SymPoly2, ExprError> {
        let poly = self.expr(0)?;
        if let Some(tok) = self.peek() {
            return Err(self.error_at(tok.offset, "operator or end of input"));
        }
        Ok(poly)
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end_offset, |t| t.offset)
    }

    fn error_at(&self, offset: usize, expected: &str) -> ExprError {
        ExprError::Parse {
            offset,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek().map(|t| t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self, depth: usize) -> Result<SymPoly2, ExprError> {
        let mut acc = self.term(depth)?;
        loop {
            if self.eat(TokenKind::Plus) {
                acc = acc.add(&self.term(depth)?);
            } else if self.eat(TokenKind::Minus) {
                acc = acc.sub(&self.term(depth)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<SymPoly2, ExprError> {
        let mut acc = self.factor(depth)?;
        while self.eat(TokenKind::Star) {
            acc = acc.mul(&self.factor(depth)?);
        }
        Ok(acc)
    }

    fn factor(&mut self, depth: usize) -> Result<SymPoly2, ExprError> {
        let base = self.base(depth)?;
        if self.eat(TokenKind::Caret) {
            let exp = self.uint_exponent()?;
            Ok(base.powi(exp))
        } else {
            Ok(base)
        }
    }

    fn uint_exponent(&mut self) -> Result<u32, ExprError> {
        let offset = self.here();
        let Some(tok) = self.advance() else {
            return Err(self.error_at(offset, "nonnegative integer exponent"));
        };
        if tok.kind != TokenKind::Number {
            return Err(self.error_at(tok.offset, "nonnegative integer exponent"));
        }
        let exp: u32 = tok
            .text
            .parse()
            .map_err(|_| self.error_at(tok.offset, "nonnegative integer exponent"))?;
        if exp > MAX_EXPONENT {
            return Err(self.error_at(tok.offset, "exponent of at most 64"));
        }
        Ok(exp)
    }

    fn base(&mut self, depth: usize) -> Result<SymPoly2, ExprError> {
        if depth > MAX_DEPTH {
            return Err(self.error_at(self.here(), "shallower expression nesting"));
        }
        let offset = self.here();
        let Some(tok) = self.advance() else {
            return Err(self.error_at(offset, "number, x, y, parameter, '(' or '-'"));
        };
        match tok.kind {
            TokenKind::Number => {
                let v: f64 = tok
                    .text
                    .parse()
                    .map_err(|_| self.error_at(tok.offset, "finite decimal number"))?;
                if !v.is_finite() {
                    return Err(self.error_at(tok.offset, "finite decimal number"));
                }
                Ok(SymPoly2::number(v))
            }
            TokenKind::Identifier => match tok.text.as_str() {
                "x" => Ok(SymPoly2::var_x()),
                "y" => Ok(SymPoly2::var_y()),
                name if self.params.contains(name) => Ok(SymPoly2::param(name)),
                _ => Err(self.error_at(tok.offset, "x, y, or a declared parameter")),
            },
            TokenKind::LParen => {
                let inner = self.expr(depth + 1)?;
                if !self.eat(TokenKind::RParen) {
                    return Err(self.error_at(self.here(), "')'"));
                }
                Ok(inner)
            }
            TokenKind::Minus => Ok(self.factor(depth + 1)?.neg()),
            _ => Err(self.error_at(tok.offset, "number, x, y, parameter, '(' or '-'")),
        }
    }
}
